#include "fellgpd/star_algebra.hpp"

#include <algorithm>
#include <cmath>

#include "fellgpd/error.hpp"

namespace fellgpd {

AlgebraElement::AlgebraElement(GroupoidPtr base)
    : base_(std::move(base)), coeffs_(Vec::Zero(static_cast<Eigen::Index>(base_->size()))) {}

AlgebraElement::AlgebraElement(GroupoidPtr base, Vec coeffs) : base_(std::move(base)), coeffs_(std::move(coeffs)) {
  if (static_cast<std::size_t>(coeffs_.size()) != base_->size())
    throw Error(Errc::BaseMismatch, "coefficient vector length differs from arrow count");
}

AlgebraElement AlgebraElement::delta(GroupoidPtr base, Arrow g) {
  AlgebraElement out(std::move(base));
  out[g] = 1.0;
  return out;
}

AlgebraElement AlgebraElement::random(GroupoidPtr base, std::mt19937_64& rng) {
  const std::size_t n = base->size();
  return AlgebraElement(std::move(base), random_gaussian(n, rng));
}

AlgebraElement AlgebraElement::identity(GroupoidPtr base) {
  AlgebraElement out(std::move(base));
  for (Arrow u : out.base()->units()) out[u] = 1.0;
  return out;
}

AlgebraElement& AlgebraElement::operator+=(const AlgebraElement& o) {
  if (o.base_ != base_) throw Error(Errc::BaseMismatch, "elements live on different groupoids");
  coeffs_ += o.coeffs_;
  return *this;
}

AlgebraElement& AlgebraElement::operator-=(const AlgebraElement& o) {
  if (o.base_ != base_) throw Error(Errc::BaseMismatch, "elements live on different groupoids");
  coeffs_ -= o.coeffs_;
  return *this;
}

AlgebraElement& AlgebraElement::operator*=(cplx s) {
  coeffs_ *= s;
  return *this;
}

ConvolutionAlgebra::ConvolutionAlgebra(GroupoidPtr g) : g_(std::move(g)), pos_(g_->size()) {
  for (Arrow u : g_->units()) {
    const auto basis = g_->with_source(u);
    for (std::size_t i = 0; i < basis.size(); ++i) pos_[idx(basis[i])] = i;
  }
}

ConvolutionAlgebra::ConvolutionAlgebra(GroupoidPtr g, Cocycle omega, double cocycle_tol)
    : ConvolutionAlgebra(std::move(g)) {
  if (omega.base() != g_) throw Error(Errc::BaseMismatch, "cocycle is defined on another groupoid");
  require_cocycle(omega, cocycle_tol);
  if (!omega.is_trivial()) omega_ = std::move(omega);
}

void ConvolutionAlgebra::check_base(const AlgebraElement& f) const {
  if (f.base() != g_) throw Error(Errc::BaseMismatch, "element lives on another groupoid");
}

AlgebraElement ConvolutionAlgebra::multiply(const AlgebraElement& a, const AlgebraElement& b) const {
  check_base(a);
  check_base(b);
  AlgebraElement out(g_);
  g_->for_each_pair([&](Arrow x, Arrow y, Arrow xy, std::size_t p) {
    const cplx w = omega_ ? omega_->values()[p] : cplx(1.0, 0.0);
    out[xy] += w * a[x] * b[y];
  });
  return out;
}

AlgebraElement ConvolutionAlgebra::star(const AlgebraElement& a) const {
  check_base(a);
  AlgebraElement out(g_);
  for (std::size_t i = 0; i < g_->size(); ++i) {
    const Arrow g = arrow_at(i);
    out[g] = std::conj(omega(g, g_->inv(g))) * std::conj(a[g_->inv(g)]);
  }
  return out;
}

BlockMatrix ConvolutionAlgebra::regular(const AlgebraElement& f) const {
  check_base(f);
  BlockMatrix out;
  out.blocks.reserve(g_->unit_count());
  for (Arrow u : g_->units()) {
    const auto basis = g_->with_source(u);
    const auto n = static_cast<Eigen::Index>(basis.size());
    Mat m = Mat::Zero(n, n);
    for (std::size_t col = 0; col < basis.size(); ++col) {
      const Arrow k = basis[col];
      for (Arrow x : g_->with_source(g_->rng(k))) {
        const cplx fx = f[x];
        if (fx == cplx(0.0, 0.0)) continue;
        m(static_cast<Eigen::Index>(pos_[idx(g_->mul(x, k))]), static_cast<Eigen::Index>(col)) +=
            omega(x, k) * fx;
      }
    }
    out.blocks.push_back(std::move(m));
  }
  return out;
}

std::vector<BlockMatrix> ConvolutionAlgebra::basis_images() const {
  std::vector<BlockMatrix> out;
  out.reserve(g_->size());
  for (std::size_t i = 0; i < g_->size(); ++i) out.push_back(regular(AlgebraElement::delta(g_, arrow_at(i))));
  return out;
}

double ConvolutionAlgebra::norm(const AlgebraElement& f) const { return op_norm(regular(f)); }

double ConvolutionAlgebra::min_spectrum(const AlgebraElement& f) const {
  return min_hermitian_eigenvalue(regular(f));
}

AlgebraElement convolve(const AlgebraElement& f1, const AlgebraElement& f2) {
  if (f1.base() != f2.base()) throw Error(Errc::BaseMismatch, "elements live on different groupoids");
  const FiniteGroupoid& G = *f1.base();
  AlgebraElement out(f1.base());
  G.for_each_pair([&](Arrow x, Arrow y, Arrow xy, std::size_t) { out[xy] += f1[x] * f2[y]; });
  return out;
}

AlgebraElement involute(const AlgebraElement& f) {
  const FiniteGroupoid& G = *f.base();
  AlgebraElement out(f.base());
  for (std::size_t i = 0; i < G.size(); ++i) out[arrow_at(i)] = std::conj(f[G.inv(arrow_at(i))]);
  return out;
}

double cstar_norm(const FiniteGroupoid& g, const AlgebraElement& f) {
  if (f.base().get() != &g) throw Error(Errc::BaseMismatch, "element lives on another groupoid");
  return ConvolutionAlgebra(f.base()).norm(f);
}

bool positivity_check(const FiniteGroupoid& g, const AlgebraElement& f, double tol) {
  if (f.base().get() != &g) throw Error(Errc::BaseMismatch, "element lives on another groupoid");
  ConvolutionAlgebra a(f.base());
  const BlockMatrix m = a.regular(f);
  return min_hermitian_eigenvalue(m) >= -tol * op_norm(m);
}

AlgebraElement conditional_expectation(const Subgroupoid& k, const AlgebraElement& f) {
  const FiniteGroupoid& parent = *f.base();
  if (k.from_parent.size() != parent.size())
    throw Error(Errc::BaseMismatch, "subgroupoid is not embedded in the element's groupoid");
  for (Arrow u : parent.units())
    if (!k.from_parent[idx(u)])
      throw Error(Errc::NotASubgroupoid, "subgroupoid misses a unit of the parent", {parent.name(u)});
  AlgebraElement out(k.groupoid);
  for (std::size_t i = 0; i < k.to_parent.size(); ++i) out[arrow_at(i)] = f[k.to_parent[i]];
  return out;
}

namespace {

AlgebraElement extend(const Subgroupoid& k, const GroupoidPtr& parent, const AlgebraElement& a) {
  AlgebraElement out(parent);
  for (std::size_t i = 0; i < k.to_parent.size(); ++i) out[k.to_parent[i]] = a[arrow_at(i)];
  return out;
}

AlgebraElement random_on(const Subgroupoid& k, const GroupoidPtr& parent, std::mt19937_64& rng) {
  return extend(k, parent, AlgebraElement::random(k.groupoid, rng));
}

}  // namespace

CheckList verify_conditional_expectation(const ConvolutionAlgebra& parent, const Subgroupoid& k,
                                         std::mt19937_64& rng, std::size_t samples, double tol) {
  const GroupoidPtr& G = parent.groupoid();
  const ConvolutionAlgebra sub = parent.cocycle()
                                     ? ConvolutionAlgebra(k.groupoid, restrict_cocycle(*parent.cocycle(), k))
                                     : ConvolutionAlgebra(k.groupoid);

  ResidualTracker idempotent("expectation_idempotent", tol);
  ResidualTracker bimodule("expectation_bimodule", tol);
  ResidualTracker positive("expectation_positive", tol);
  ResidualTracker contractive("expectation_contractive", tol);
  ResidualTracker faithful("expectation_faithful", tol);

  for (std::size_t s = 0; s < samples; ++s) {
    const std::string tag = "sample " + std::to_string(s);
    const AlgebraElement on_k = random_on(k, G, rng);
    const AlgebraElement back = conditional_expectation(k, on_k);
    idempotent.observe((extend(k, G, back) - on_k).max_abs(), tag);

    const AlgebraElement a = random_on(k, G, rng);
    const AlgebraElement b = random_on(k, G, rng);
    const AlgebraElement f = AlgebraElement::random(G, rng);
    const AlgebraElement lhs = conditional_expectation(k, parent.multiply(parent.multiply(a, f), b));
    const AlgebraElement rhs = sub.multiply(sub.multiply(conditional_expectation(k, a), conditional_expectation(k, f)),
                                            conditional_expectation(k, b));
    const double scale = std::max(1.0, lhs.max_abs());
    bimodule.observe((lhs - rhs).max_abs() / scale, tag);

    const AlgebraElement phi_ff = conditional_expectation(k, parent.multiply(parent.star(f), f));
    const BlockMatrix rep = sub.regular(phi_ff);
    const double n = op_norm(rep);
    positive.observe(std::max(0.0, -min_hermitian_eigenvalue(rep)) / std::max(1.0, n), tag);

    const double nf = parent.norm(f);
    const double nphi = sub.norm(conditional_expectation(k, f));
    contractive.observe(std::max(0.0, nphi - nf) / std::max(1.0, nf), tag);
  }

  // Gram[g][h] = τ(Φ(δ_g* δ_h)) with τ = sum of unit coefficients. δ_g* δ_h is
  // supported on g⁻¹h, which is a unit iff g == h.
  const FiniteGroupoid& g = *G;
  const auto n = static_cast<Eigen::Index>(g.size());
  Mat gram = Mat::Zero(n, n);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Arrow x = arrow_at(i);
    const Arrow xi = g.inv(x);
    const cplx sx = std::conj(parent.omega(x, xi));
    for (Arrow y : g.with_range(g.rng(x))) {
      const Arrow z = g.mul(xi, y);
      if (!g.is_unit(z) || !k.from_parent[idx(z)]) continue;
      gram(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(idx(y))) += sx * parent.omega(xi, y);
    }
  }
  const Mat herm = (gram + gram.adjoint()) * 0.5;
  Eigen::SelfAdjointEigenSolver<Mat> es(herm, Eigen::EigenvaluesOnly);
  const double lo = n ? es.eigenvalues().minCoeff() : 1.0;
  faithful.observe(lo > tol ? 0.0 : 1.0 - lo, "min eigenvalue " + std::to_string(lo));
  faithful.observe((gram - gram.adjoint()).cwiseAbs().maxCoeff(), "gram not hermitian");

  return {idempotent.done(), bimodule.done(), positive.done(), contractive.done(), faithful.done()};
}

std::size_t regular_rank(const ConvolutionAlgebra& a) {
  const auto images = a.basis_images();
  if (images.empty()) return 0;
  const Eigen::Index d = static_cast<Eigen::Index>(images.front().flat_size());
  Mat cols(d, static_cast<Eigen::Index>(images.size()));
  for (std::size_t i = 0; i < images.size(); ++i) cols.col(static_cast<Eigen::Index>(i)) = images[i].flatten();
  return numerical_rank(cols);
}

}  // namespace fellgpd
