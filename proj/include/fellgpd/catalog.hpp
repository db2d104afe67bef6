#pragma once

#include <functional>
#include <string>
#include <vector>

#include "fellgpd/groupoid.hpp"
#include "fellgpd/morphism.hpp"

namespace fellgpd::catalog {

/// Full equivalence relation on the given points. Units carry the point
/// names; the arrow from y to x is named "(x,y)".
GroupoidPtr pair_groupoid(const std::vector<std::string>& points);
/// Points "1".."n".
GroupoidPtr pair_groupoid(std::size_t n);

/// Only units: a finite space viewed as a groupoid.
GroupoidPtr space(const std::vector<std::string>& points);

/// One-unit groupoid from a multiplication rule on 0..order-1. Element 0 must
/// be the identity.
GroupoidPtr group(std::size_t order, const std::function<std::size_t(std::size_t, std::size_t)>& mul,
                  const std::function<std::string(std::size_t)>& name);

/// Z_k with elements named "0".."k-1".
GroupoidPtr cyclic_group(std::size_t k);

/// Z_n × Z_n with elements named "(a,b)", index a*n+b.
GroupoidPtr z_n_squared(std::size_t n);

/// Heisenberg group over Z_n: [a,b,c][a',b',c'] = [a+a', b+b', c+c'+ab'].
/// Elements named "[a,b,c]", index (a*n + b)*n + c.
GroupoidPtr heisenberg_group(std::size_t n);

/// π[a,b,c] = (a,b) onto Z_n².
GroupoidMorphism heisenberg_quotient(std::size_t n);

/// Symmetric group on three letters, identity first.
GroupoidPtr symmetric_group_3();

/// Componentwise product; arrow (a, b) named "a;b".
GroupoidPtr product(const FiniteGroupoid& a, const FiniteGroupoid& b);

/// Disjoint union; names are prefixed with "L:" / "R:".
GroupoidPtr disjoint_union(const FiniteGroupoid& a, const FiniteGroupoid& b);

}  // namespace fellgpd::catalog
