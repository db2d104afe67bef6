#include "fellgpd/wedderburn.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>

#include "fellgpd/error.hpp"

namespace fellgpd {

std::string WedderburnInvariants::to_string() const {
  std::string s = "{";
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(blocks[i]);
  }
  return s + "}";
}

namespace {

/// Orthonormal (Frobenius) basis of a growing subspace of block matrices.
class SpanBasis {
 public:
  SpanBasis(std::vector<std::size_t> sizes, double tol) : sizes_(std::move(sizes)), tol_(tol) {
    std::size_t flat = 0;
    for (auto n : sizes_) flat += n * n;
    basis_ = Mat::Zero(static_cast<Eigen::Index>(flat), 0);
  }

  Eigen::Index dim() const noexcept { return d_; }
  const BlockMatrix& element(Eigen::Index i) const { return mats_[static_cast<std::size_t>(i)]; }
  const Mat& columns() const noexcept { return basis_; }
  const std::vector<std::size_t>& sizes() const noexcept { return sizes_; }

  /// Coordinates of v after (possibly) extending the basis by its residual.
  /// `abs_floor` is the residual norm below which v is treated as inside.
  Vec absorb(const Vec& v) {
    Vec c = Vec::Zero(d_);
    Vec r = v;
    if (d_ > 0) {
      // Two passes of classical Gram–Schmidt.
      for (int pass = 0; pass < 2; ++pass) {
        const Vec dc = basis_.leftCols(d_).adjoint() * r;
        r -= basis_.leftCols(d_) * dc;
        c += dc;
      }
    }
    const double rn = r.norm();
    if (rn > tol_) {
      if (d_ == basis_.cols()) basis_.conservativeResize(Eigen::NoChange, std::max<Eigen::Index>(8, 2 * d_));
      basis_.col(d_) = r / rn;
      mats_.push_back(BlockMatrix::unflatten(basis_.col(d_), sizes_));
      ++d_;
      c.conservativeResize(d_);
      c[d_ - 1] = rn;
    }
    return c;
  }

  Vec coordinates(const Vec& v) const { return basis_.leftCols(d_).adjoint() * v; }

 private:
  std::vector<std::size_t> sizes_;
  double tol_;
  Mat basis_;
  Eigen::Index d_ = 0;
  std::vector<BlockMatrix> mats_;
};

struct ClosedAlgebra {
  SpanBasis basis;
  // structure[i][j] = coordinates of b_i b_j
  std::vector<std::vector<Vec>> structure;
};

ClosedAlgebra close_span(std::span<const BlockMatrix> gens, const WedderburnOptions& opts) {
  const auto sizes = gens.front().block_sizes();
  ClosedAlgebra out{SpanBasis(sizes, opts.span_tol), {}};
  for (const auto& g : gens) {
    if (g.block_sizes() != sizes) throw Error(Errc::BaseMismatch, "generators have different block structure");
    Vec v = g.flatten();
    const double n = v.norm();
    if (n > 0) out.basis.absorb(v / n);
  }
  auto& st = out.structure;
  auto process = [&](Eigen::Index i, Eigen::Index j) {
    const BlockMatrix prod = out.basis.element(i) * out.basis.element(j);
    Vec c = out.basis.absorb(prod.flatten());
    const auto need = static_cast<std::size_t>(out.basis.dim());
    if (st.size() < need) st.resize(need);
    auto& row = st[static_cast<std::size_t>(i)];
    if (row.size() <= static_cast<std::size_t>(j)) row.resize(static_cast<std::size_t>(j) + 1);
    row[static_cast<std::size_t>(j)] = std::move(c);
  };
  for (Eigen::Index k = 0; k < out.basis.dim(); ++k) {
    for (Eigen::Index j = 0; j <= k; ++j) {
      process(k, j);
      if (j != k) process(j, k);
    }
  }
  const Eigen::Index d = out.basis.dim();
  st.resize(static_cast<std::size_t>(d));
  for (auto& row : st) {
    row.resize(static_cast<std::size_t>(d));
    for (auto& c : row) {
      const Eigen::Index old = c.size();
      c.conservativeResize(d);
      if (old < d) c.tail(d - old).setZero();
    }
  }
  return out;
}

/// Null space (as columns) of the commutator map x ↦ (x b_j − b_j x)_j.
Mat center_basis(const ClosedAlgebra& alg, const WedderburnOptions& opts) {
  const Eigen::Index d = alg.basis.dim();
  Mat gram = Mat::Zero(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    Mat m(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
      m.col(i) = alg.structure[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] -
                 alg.structure[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
    gram.noalias() += m.adjoint() * m;
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(gram);
  const Eigen::VectorXd sv = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const double top = sv.size() ? sv.maxCoeff() : 0.0;
  const double cut = opts.center_tol * std::max(top, 1.0);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] <= cut) keep.push_back(i);
  Mat z(d, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) z.col(static_cast<Eigen::Index>(k)) = es.eigenvectors().col(keep[k]);
  return z;
}

std::optional<std::vector<std::size_t>> split_center(const ClosedAlgebra& alg, const Mat& center,
                                                     std::mt19937_64& rng, const WedderburnOptions& opts) {
  const Eigen::Index d = alg.basis.dim();
  const Eigen::Index m = center.cols();
  const Vec coeff = center * random_gaussian(static_cast<std::size_t>(m), rng);
  const Vec flat = alg.basis.columns().leftCols(d) * coeff;
  const BlockMatrix x = BlockMatrix::unflatten(flat, alg.basis.sizes());

  struct Eig {
    double value;
    std::size_t block;
    Eigen::Index column;
  };
  std::vector<Eig> all;
  std::vector<Mat> vectors;
  double scale = 0.0;
  for (std::size_t b = 0; b < x.blocks.size(); ++b) {
    const Mat h = (x.blocks[b] + x.blocks[b].adjoint()) * 0.5;
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    vectors.push_back(es.eigenvectors());
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
      all.push_back({es.eigenvalues()[i], b, i});
      scale = std::max(scale, std::abs(es.eigenvalues()[i]));
    }
  }
  if (scale <= 0.0) return std::nullopt;
  std::sort(all.begin(), all.end(), [](const Eig& a, const Eig& b) { return a.value < b.value; });

  std::vector<std::vector<Eig>> clusters;
  for (const Eig& e : all) {
    if (clusters.empty() || e.value - clusters.back().back().value > opts.cluster_tol * scale)
      clusters.emplace_back();
    clusters.back().push_back(e);
  }
  if (static_cast<Eigen::Index>(clusters.size()) != m) return std::nullopt;

  // tr(L_{b_l}) = Σ_i c_{l i}^i
  Vec trace_l(d);
  for (Eigen::Index l = 0; l < d; ++l) {
    cplx t = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) t += alg.structure[static_cast<std::size_t>(l)][static_cast<std::size_t>(i)][i];
    trace_l[l] = t;
  }

  std::vector<std::size_t> blocks;
  for (const auto& cl : clusters) {
    BlockMatrix p = BlockMatrix::zero(alg.basis.sizes());
    for (const Eig& e : cl) {
      const Vec v = vectors[e.block].col(e.column);
      p.blocks[e.block] += v * v.adjoint();
    }
    const Vec pf = p.flatten();
    const Vec coords = alg.basis.coordinates(pf);
    const double outside = (pf - alg.basis.columns().leftCols(d) * coords).norm();
    if (outside > 1e-6 * std::max(1.0, pf.norm())) return std::nullopt;
    const double n2 = (coords.transpose() * trace_l)(0).real();
    const double n = std::round(std::sqrt(std::max(0.0, n2)));
    if (n < 1.0 || std::abs(n2 - n * n) > 1e-6 * std::max(1.0, n2)) return std::nullopt;
    // The projection's rank must be a multiple of the block size.
    const double rank = static_cast<double>(cl.size());
    if (std::abs(rank / n - std::round(rank / n)) > 1e-9) return std::nullopt;
    blocks.push_back(static_cast<std::size_t>(n));
  }
  std::size_t total = 0;
  for (auto n : blocks) total += n * n;
  if (total != static_cast<std::size_t>(d)) return std::nullopt;
  std::sort(blocks.rbegin(), blocks.rend());
  return blocks;
}

}  // namespace

WedderburnInvariants wedderburn(std::span<const BlockMatrix> generators, std::mt19937_64& rng,
                                const WedderburnOptions& opts) {
  WedderburnInvariants out;
  if (generators.empty()) return out;
  const ClosedAlgebra alg = close_span(generators, opts);
  out.dimension = static_cast<std::size_t>(alg.basis.dim());
  if (out.dimension == 0) return out;
  const Mat center = center_basis(alg, opts);
  out.center_dimension = static_cast<std::size_t>(center.cols());
  for (int attempt = 0; attempt <= opts.max_retries; ++attempt) {
    if (auto blocks = split_center(alg, center, rng, opts)) {
      out.blocks = std::move(*blocks);
      return out;
    }
  }
  throw Error(Errc::NumericalDegeneracy, "central eigenvalues could not be separated",
              {"dimension " + std::to_string(out.dimension), "center " + std::to_string(out.center_dimension)});
}

WedderburnInvariants wedderburn_regular(const ConvolutionAlgebra& a, std::mt19937_64& rng,
                                        const WedderburnOptions& opts) {
  const auto images = a.basis_images();
  return wedderburn(images, rng, opts);
}

WedderburnInvariants wedderburn(const ConvolutionAlgebra& a, std::mt19937_64& rng, const WedderburnOptions& opts) {
  const FiniteGroupoid& G = *a.groupoid();
  WedderburnInvariants out;
  out.dimension = G.size();
  for (const auto& orbit : unit_orbits(G)) {
    const Arrow u = orbit.front();
    std::vector<Arrow> iso;
    for (Arrow g : G.with_source(u))
      if (G.rng(g) == u) iso.push_back(g);
    std::vector<std::size_t> local{1};
    std::size_t local_center = 1;
    if (iso.size() > 1) {
      const Subgroupoid sub = restrict_to(G, iso);
      const ConvolutionAlgebra iso_alg = a.cocycle()
                                             ? ConvolutionAlgebra(sub.groupoid, restrict_cocycle(*a.cocycle(), sub))
                                             : ConvolutionAlgebra(sub.groupoid);
      const WedderburnInvariants w = wedderburn_regular(iso_alg, rng, opts);
      local = w.blocks;
      local_center = w.center_dimension;
    }
    for (auto n : local) out.blocks.push_back(n * orbit.size());
    out.center_dimension += local_center;
  }
  std::sort(out.blocks.rbegin(), out.blocks.rend());
  return out;
}

}  // namespace fellgpd
