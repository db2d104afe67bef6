#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "fellgpd/check.hpp"
#include "fellgpd/cocycle.hpp"
#include "fellgpd/groupoid.hpp"
#include "fellgpd/linalg.hpp"
#include "fellgpd/morphism.hpp"
#include "fellgpd/wedderburn.hpp"

namespace fellgpd {

/// Sparse coordinate vector: (basis position, coefficient).
using SparseVec = std::vector<std::pair<std::uint32_t, cplx>>;

/// Raw bundle tables over a base groupoid H.
///   basis[h]        names of the basis of E_h
///   mul[p][i*d2+j]  b_i·b_j for the composable pair p = (h1, h2), in E_{h1h2}
///   star[h][i]      b_i* in E_{h⁻¹}
struct BundleTables {
  GroupoidPtr base;
  std::vector<std::vector<std::string>> basis;
  std::vector<std::vector<SparseVec>> mul;
  std::vector<std::vector<SparseVec>> star;
};

/// A finite-dimensional Fell bundle given by tables, together with a faithful
/// *-representation ρ_u of every unit fiber used for C*-norms. Norms on E_h
/// come from ‖ξ‖² = ‖ρ_{s(h)}(ξ*ξ)‖.
class FellBundle {
 public:
  /// Checks table shapes (Parse errors). Unit fibers are represented on
  /// themselves with the inner product τ(x*y), τ(a) = Tr(left multiplication
  /// by a); a fiber where that form is degenerate gets no representation and
  /// a note instead.
  static FellBundle from_tables(BundleTables tables);

  const GroupoidPtr& base() const noexcept { return t_.base; }
  const BundleTables& tables() const noexcept { return t_; }
  std::size_t dim(Arrow h) const { return t_.basis[idx(h)].size(); }
  const std::vector<std::string>& basis(Arrow h) const { return t_.basis[idx(h)]; }
  std::size_t total_dim() const noexcept { return total_; }
  /// Position of E_h inside the section space ⊕_h E_h.
  std::size_t offset(Arrow h) const { return offset_[idx(h)]; }

  const SparseVec& mul(std::size_t pair, std::size_t i, std::size_t j) const;
  const SparseVec& star(Arrow h, std::size_t i) const { return t_.star[idx(h)][i]; }

  /// ρ_u of every basis element of E_u, or nullptr when unavailable.
  const std::vector<BlockMatrix>* unit_representation(Arrow u) const;
  const std::string& unit_representation_note(Arrow u) const { return rep_note_[idx(u)]; }
  /// τ_u(b_l) = Tr ρ_u(b_l).
  const Vec& unit_trace(Arrow u) const { return trace_[idx(u)]; }
  /// Q_h[i][j] = τ_{s(h)}(b_i* b_j): the inner product of E_h as a right
  /// Hilbert module, evaluated through τ. Empty when ρ_{s(h)} is unavailable.
  const Mat& module_gram(Arrow h) const { return gram_[idx(h)]; }
  /// Q_h^{1/2} and Q_h^{-1/2}; nullptr when Q_h is unavailable. inv_sqrt is
  /// empty when Q_h is singular.
  const PsdRoots* module_roots(Arrow h) const {
    return roots_[idx(h)] ? &*roots_[idx(h)] : nullptr;
  }

  /// Set for bundles built from a morphism.
  const std::optional<GroupoidMorphism>& morphism() const noexcept { return morphism_; }
  const std::optional<Cocycle>& cocycle() const noexcept { return cocycle_; }

 private:
  friend FellBundle build_bundle(const GroupoidMorphism&, const std::optional<Cocycle>&);
  explicit FellBundle(BundleTables t);
  void trace_representations();
  void finish();

  BundleTables t_;
  std::vector<std::size_t> offset_;
  std::size_t total_ = 0;
  std::vector<std::optional<std::vector<BlockMatrix>>> rep_;
  std::vector<std::string> rep_note_;
  std::vector<Vec> trace_;
  std::vector<Mat> gram_;
  std::vector<std::optional<PsdRoots>> roots_;
  std::vector<std::size_t> pair_right_dim_;
  std::optional<GroupoidMorphism> morphism_;
  std::optional<Cocycle> cocycle_;
};

/// E(π): E_h spanned by δ_g, g ∈ π⁻¹(h), with δ_g·δ_g' = ω(g,g')δ_{gg'} when
/// composable in G (else 0) and δ_g* = conj ω(g,g⁻¹) δ_{g⁻¹}. Unit fibers are
/// represented by the (twisted) regular representation of K(x) = π⁻¹(x).
/// Throws NotAMorphism / NotSurjective.
FellBundle build_bundle(const GroupoidMorphism& pi, const std::optional<Cocycle>& omega = std::nullopt);

struct FiberElement {
  Arrow arrow;
  Vec coeffs;
};

FiberElement fiber_zero(const FellBundle& e, Arrow h);
FiberElement fiber_basis_element(const FellBundle& e, Arrow h, std::size_t i);
FiberElement fiber_random(const FellBundle& e, Arrow h, std::mt19937_64& rng);

/// ξ·η ∈ E_{h1h2}; NotComposable unless s(h1) = r(h2).
FiberElement fiber_mul(const FellBundle& e, const FiberElement& x, const FiberElement& y);
/// Conjugate-linear extension of the star table.
FiberElement fiber_star(const FellBundle& e, const FiberElement& x);
/// ρ_u(a) for a in a unit fiber. BundleNotVerified if ρ_u is unavailable.
BlockMatrix unit_fiber_image(const FellBundle& e, const FiberElement& a);
/// ‖ξ‖ = ‖ξ*ξ‖^{1/2} in E_{s(h)}.
double fiber_norm(const FellBundle& e, const FiberElement& x);
/// Norm of a ↦ ξ·a from E_{s(h)} to E_h for the τ-inner products; equals
/// ‖ξ‖ when the bundle is a Fell bundle.
double fiber_module_norm(const FellBundle& e, const FiberElement& x);

/// Finite form of C*_r(K) ≅ ⊕_x C*_r(K(x)): the fibers partition K, no pair of
/// arrows from different fibers is composable, and the block multisets agree.
CheckList kernel_decomposition_check(const GroupoidMorphism& pi, std::mt19937_64& rng);

/// One entry per Fell-bundle axiom (in the standard order) plus
/// "unit_fiber_representation" and "saturated". Table identities are checked
/// exhaustively on basis elements; norm conditions on basis elements plus
/// `samples` random elements per fiber (or fiber pair).
CheckList verify_axioms(const FellBundle& e, std::mt19937_64& rng, std::size_t samples, double tol);

/// Names of the axiom entries of verify_axioms, in order.
const std::vector<std::string>& axiom_names();

/// The section algebra C_c(E) = ⊕_h E_h acting on ⊕_u V_u, V_u = ⊕_{s(h)=u} E_h,
/// with inner product τ_u(P(ξ*η)). Sections are coefficient vectors indexed by
/// (offset(h) + i).
class SectionAlgebra {
 public:
  /// BundleNotVerified if some unit fiber has no representation or some
  /// fiber's module Gram matrix is singular.
  explicit SectionAlgebra(const FellBundle& e);

  const FellBundle& bundle() const noexcept { return *e_; }
  std::size_t dim() const noexcept { return e_->total_dim(); }
  std::pair<Arrow, std::size_t> locate(std::size_t k) const { return loc_[k]; }

  Vec multiply(const Vec& a, const Vec& b) const;
  Vec star(const Vec& a) const;
  /// P: keep the unit-fiber components.
  Vec expectation(const Vec& a) const;

  SparseVec basis_product(std::size_t a, std::size_t b) const;
  SparseVec basis_star(std::size_t a) const;

  BlockMatrix represent(const Vec& a) const;
  double norm(const Vec& a) const { return op_norm(represent(a)); }
  std::vector<BlockMatrix> basis_images() const;

  Vec random(std::mt19937_64& rng) const { return random_gaussian(dim(), rng); }

 private:
  const FellBundle* e_;
  std::vector<std::pair<Arrow, std::size_t>> loc_;
  std::vector<std::size_t> vpos_;     // by arrow: start of E_h inside V_{s(h)}
  std::vector<std::size_t> vdim_;     // by unit position
  std::vector<Mat> s_, s_inv_;        // Q_u^{±1/2} on V_u, by unit position
  std::vector<std::size_t> unit_slot_;  // arrow index -> unit position
};

/// P as a conditional expectation onto the unit fibers: idempotent,
/// positive, contractive, module map over C(E⁰) (random samples), and faithful
/// (every module Gram matrix positive definite: exhaustive over basis pairs).
CheckList verify_expectation(const SectionAlgebra& s, std::mt19937_64& rng, std::size_t samples, double tol);

struct IsoReport {
  CheckList checks;
  WedderburnInvariants groupoid_side;
  WedderburnInvariants bundle_side;
};

/// Checks that ψ(δ_g) = (basis section at π(g)) is a bijective *-isomorphism
/// C*_r(G, ω) → C*_r(E(π, ω)): permutation of bases, multiplicative and
/// *-preserving on all basis pairs, isometric on `samples` random elements
/// (relative tolerance `iso_tol`), equal Wedderburn invariants, and inner
/// products Φ(f*f') = P(ψ(f)*ψ(f')) on basis pairs.
IsoReport psi_iso_check(const GroupoidMorphism& pi, const std::optional<Cocycle>& omega, std::mt19937_64& rng,
                        std::size_t samples, double tol, double iso_tol = 1e-8);

/// Sections over a bisection U as an A–B bimodule, A = ⊕_{h∈U} E_{r(h)},
/// B = ⊕_{h∈U} E_{s(h)}: positivity of both inner products, fullness (rank),
/// and ⟨ξ,η⟩_A·ζ = ξ·⟨η,ζ⟩_B on basis triples. A non-saturated bundle shows
/// up as a fullness failure.
CheckList bisection_bimodule_check(const FellBundle& e, const Bisection& u, std::mt19937_64& rng,
                                   std::size_t samples, double tol);

}  // namespace fellgpd
