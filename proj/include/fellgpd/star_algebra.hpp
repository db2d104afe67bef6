#pragma once

#include <optional>
#include <random>
#include <span>
#include <vector>

#include "fellgpd/check.hpp"
#include "fellgpd/cocycle.hpp"
#include "fellgpd/groupoid.hpp"
#include "fellgpd/linalg.hpp"

namespace fellgpd {

/// Complex function on the arrows of a groupoid.
class AlgebraElement {
 public:
  explicit AlgebraElement(GroupoidPtr base);
  AlgebraElement(GroupoidPtr base, Vec coeffs);

  static AlgebraElement delta(GroupoidPtr base, Arrow g);
  /// Independent standard complex Gaussian coefficients.
  static AlgebraElement random(GroupoidPtr base, std::mt19937_64& rng);
  /// Σ_u δ_u, the identity of the convolution algebra.
  static AlgebraElement identity(GroupoidPtr base);

  const GroupoidPtr& base() const noexcept { return base_; }
  const Vec& coeffs() const noexcept { return coeffs_; }
  Vec& coeffs() noexcept { return coeffs_; }
  cplx operator[](Arrow g) const { return coeffs_[static_cast<Eigen::Index>(idx(g))]; }
  cplx& operator[](Arrow g) { return coeffs_[static_cast<Eigen::Index>(idx(g))]; }

  AlgebraElement& operator+=(const AlgebraElement& o);
  AlgebraElement& operator-=(const AlgebraElement& o);
  AlgebraElement& operator*=(cplx s);
  friend AlgebraElement operator+(AlgebraElement a, const AlgebraElement& b) { return a += b; }
  friend AlgebraElement operator-(AlgebraElement a, const AlgebraElement& b) { return a -= b; }
  friend AlgebraElement operator*(cplx s, AlgebraElement a) { return a *= s; }

  double max_abs() const { return coeffs_.size() ? coeffs_.cwiseAbs().maxCoeff() : 0.0; }

 private:
  GroupoidPtr base_;
  Vec coeffs_;
};

/// The (possibly twisted) convolution *-algebra of a finite groupoid together
/// with its left regular representation. Untwisted when no cocycle is given.
///
///   (f1*f2)(g) = Σ_{g=g1g2} ω(g1,g2) f1(g1) f2(g2)
///   f*(g)      = conj(ω(g,g⁻¹)) conj(f(g⁻¹))
///   λ_u(f) on ℓ²(G_u), G_u = {g : s(g) = u}:  λ_u(f) δ_k = Σ_{s(g)=r(k)} ω(g,k) f(g) δ_{gk}
class ConvolutionAlgebra {
 public:
  explicit ConvolutionAlgebra(GroupoidPtr g);
  /// Validates ω first (CocycleIdentityFailure).
  ConvolutionAlgebra(GroupoidPtr g, Cocycle omega, double cocycle_tol = 1e-12);

  const GroupoidPtr& groupoid() const noexcept { return g_; }
  const std::optional<Cocycle>& cocycle() const noexcept { return omega_; }
  cplx omega(Arrow a, Arrow b) const { return omega_ ? (*omega_)(a, b) : cplx(1.0, 0.0); }

  AlgebraElement multiply(const AlgebraElement& a, const AlgebraElement& b) const;
  AlgebraElement star(const AlgebraElement& a) const;

  /// Position of g inside with_source(src(g)).
  std::size_t basis_position(Arrow g) const { return pos_[idx(g)]; }
  /// λ(f) as one block per unit, in unit order.
  BlockMatrix regular(const AlgebraElement& f) const;
  /// λ(δ_g) for every arrow g.
  std::vector<BlockMatrix> basis_images() const;

  double norm(const AlgebraElement& f) const;
  /// Smallest eigenvalue of the Hermitian part of λ(f).
  double min_spectrum(const AlgebraElement& f) const;

 private:
  void check_base(const AlgebraElement& f) const;

  GroupoidPtr g_;
  std::optional<Cocycle> omega_;
  std::vector<std::size_t> pos_;
};

/// Untwisted convolution; BaseMismatch if bases differ.
AlgebraElement convolve(const AlgebraElement& f1, const AlgebraElement& f2);
/// f*(g) = conj f(g⁻¹).
AlgebraElement involute(const AlgebraElement& f);
/// Reduced C*-norm: max over units of the largest singular value of λ_u(f).
double cstar_norm(const FiniteGroupoid& g, const AlgebraElement& f);
/// True iff every λ_u(f) has min eigenvalue ≥ −tol·‖f‖ (f assumed self-adjoint).
bool positivity_check(const FiniteGroupoid& g, const AlgebraElement& f, double tol = 1e-9);

/// Restriction of coefficients to K, as an element on K.groupoid. K must
/// contain every unit of the parent (NotASubgroupoid otherwise).
AlgebraElement conditional_expectation(const Subgroupoid& k, const AlgebraElement& f);

/// Properties of restriction to K as a conditional expectation of the
/// (twisted) algebra of the parent: idempotence, K-bimodularity, positivity,
/// contractivity on random samples, and faithfulness from the exhaustive
/// Gram matrix of f ↦ τ(Φ(f*f)) on the arrow basis.
CheckList verify_conditional_expectation(const ConvolutionAlgebra& parent, const Subgroupoid& k,
                                         std::mt19937_64& rng, std::size_t samples, double tol);

/// Rank of f ↦ λ(f) over the arrow basis (equals |G| iff λ is faithful).
std::size_t regular_rank(const ConvolutionAlgebra& a);

}  // namespace fellgpd
