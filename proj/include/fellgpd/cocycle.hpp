#pragma once

#include <span>
#include <vector>

#include "fellgpd/check.hpp"
#include "fellgpd/groupoid.hpp"
#include "fellgpd/linalg.hpp"

namespace fellgpd {

/// Unit-modulus function on composable pairs, stored by pair index.
class Cocycle {
 public:
  Cocycle(GroupoidPtr base, std::vector<cplx> values);
  static Cocycle trivial(GroupoidPtr base);

  const GroupoidPtr& base() const noexcept { return base_; }
  cplx operator()(Arrow g, Arrow h) const { return values_[base_->pair_index(g, h)]; }
  std::span<const cplx> values() const noexcept { return values_; }
  bool is_trivial() const;

 private:
  GroupoidPtr base_;
  std::vector<cplx> values_;
};

/// Exhaustive check over composable triples and pairs. Entries: "cocycle_identity",
/// "unit_modulus", "normalization".
CheckList cocycle_check(const Cocycle& omega, double tol = 1e-12);

/// Throws CocycleIdentityFailure (with the triple or pair) if any entry fails.
void require_cocycle(const Cocycle& omega, double tol = 1e-12);

/// ω restricted to a subgroupoid.
Cocycle restrict_cocycle(const Cocycle& omega, const Subgroupoid& sub);

/// Normalized cocycle (g, h) ↦ b(g) b(h) / b(gh) with b(unit) = 1 and random
/// phases b elsewhere; a coboundary, so the identity holds by construction.
Cocycle random_coboundary(const GroupoidPtr& g, std::mt19937_64& rng);

}  // namespace fellgpd
