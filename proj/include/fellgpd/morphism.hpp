#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fellgpd/groupoid.hpp"

namespace fellgpd {

/// Arrow map between two finite groupoids. Construction does not check the
/// morphism laws; classify_morphism() does.
class GroupoidMorphism {
 public:
  GroupoidMorphism(GroupoidPtr domain, GroupoidPtr codomain, std::vector<Arrow> map);

  const GroupoidPtr& domain() const noexcept { return domain_; }
  const GroupoidPtr& codomain() const noexcept { return codomain_; }
  Arrow operator()(Arrow g) const { return map_[idx(g)]; }
  std::span<const Arrow> map() const noexcept { return map_; }

  /// Arrows of the domain lying over h, in domain order.
  std::vector<Arrow> preimage(Arrow h) const;

  static GroupoidMorphism identity(GroupoidPtr g);

 private:
  GroupoidPtr domain_;
  GroupoidPtr codomain_;
  std::vector<Arrow> map_;
};

struct MorphismClassification {
  bool is_morphism = false;
  bool surjective = false;
  bool surjective_on_units = false;
  bool fibration = false;
  bool covering = false;
  // Topological clauses hold vacuously for finite discrete groupoids.
  bool continuous = true;
  bool open = true;
  /// Counterexample for the first flag that fails: an arrow not hit, or (h, x)
  /// with no lift / several lifts.
  std::vector<std::string> witness;
};

/// Returns a witness pair if π is not a morphism, nothing otherwise.
std::optional<std::vector<std::string>> morphism_defect(const GroupoidMorphism& pi);

/// Throws NotAMorphism with the failing pair.
MorphismClassification classify_morphism(const GroupoidMorphism& pi);

struct KernelFiber {
  Arrow unit;  // x in H⁰
  Subgroupoid fiber;  // K(x) = π⁻¹(x), embedded in the domain
};

struct KernelDecomposition {
  Subgroupoid kernel;  // K = π⁻¹(H⁰)
  std::vector<KernelFiber> fibers;
  bool amenable = true;  // automatic for finite groupoids
};

/// K = π⁻¹(H⁰) with its partition by units of H. π must be a surjective
/// morphism (NotAMorphism / NotSurjective otherwise).
KernelDecomposition kernel(const GroupoidMorphism& pi);

struct IsotropyQuotient {
  GroupoidPtr relation;  // orbit equivalence relation on G⁰
  GroupoidMorphism projection;  // g ↦ (r(g), s(g))
};

IsotropyQuotient isotropy_quotient(const GroupoidPtr& g);

/// Arrows of G on which both s and r are injective.
class Bisection {
 public:
  const std::vector<Arrow>& arrows() const noexcept { return arrows_; }

 private:
  friend Bisection check_bisection(const FiniteGroupoid&, std::span<const Arrow>);
  std::vector<Arrow> arrows_;
};

/// Throws NotABisection with the colliding pair.
Bisection check_bisection(const FiniteGroupoid& g, std::span<const Arrow> subset);

/// Maximal bisections covering every arrow, built greedily in arrow order.
std::vector<Bisection> greedy_bisection_cover(const FiniteGroupoid& g);

}  // namespace fellgpd
