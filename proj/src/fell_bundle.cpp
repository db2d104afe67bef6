#include "fellgpd/fell_bundle.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "fellgpd/error.hpp"
#include "fellgpd/star_algebra.hpp"

namespace fellgpd {

namespace {

void add_scaled(Vec& out, const SparseVec& s, cplx c) {
  for (const auto& [k, v] : s) out[k] += c * v;
}

Vec dense(const SparseVec& s, std::size_t n) {
  Vec out = Vec::Zero(static_cast<Eigen::Index>(n));
  add_scaled(out, s, 1.0);
  return out;
}

std::string label(const FellBundle& e, Arrow h, std::size_t i) {
  return e.base()->name(h) + ":" + e.basis(h)[i];
}

double rel(double residual, double scale) { return residual / std::max(1.0, scale); }

}  // namespace

// ---------------------------------------------------------------------------
// FellBundle

FellBundle::FellBundle(BundleTables t) : t_(std::move(t)) {
  const FiniteGroupoid& H = *t_.base;
  const std::size_t n = H.size();
  if (t_.basis.size() != n || t_.star.size() != n || t_.mul.size() != H.pair_count())
    throw Error(Errc::Parse, "bundle tables do not match the base groupoid");
  offset_.resize(n);
  for (std::size_t h = 0; h < n; ++h) {
    offset_[h] = total_;
    total_ += t_.basis[h].size();
  }
  pair_right_dim_.resize(H.pair_count());
  H.for_each_pair([&](Arrow a, Arrow b, Arrow ab, std::size_t p) {
    const std::size_t d1 = dim(a), d2 = dim(b), d12 = dim(ab);
    pair_right_dim_[p] = d2;
    if (t_.mul[p].size() != d1 * d2)
      throw Error(Errc::Parse, "multiplication table has the wrong size", {H.name(a), H.name(b)});
    for (const auto& entry : t_.mul[p])
      for (const auto& [k, v] : entry)
        if (k >= d12) throw Error(Errc::Parse, "product leaves the fiber of the composite", {H.name(a), H.name(b)});
  });
  for (std::size_t h = 0; h < n; ++h) {
    const Arrow a = arrow_at(h);
    if (t_.star[h].size() != dim(a)) throw Error(Errc::Parse, "star table has the wrong size", {H.name(a)});
    for (const auto& entry : t_.star[h])
      for (const auto& [k, v] : entry)
        if (k >= dim(H.inv(a))) throw Error(Errc::Parse, "adjoint leaves the fiber of the inverse", {H.name(a)});
  }
  rep_.resize(n);
  rep_note_.resize(n);
  trace_.resize(n);
  gram_.resize(n);
  roots_.resize(n);
}

const SparseVec& FellBundle::mul(std::size_t pair, std::size_t i, std::size_t j) const {
  return t_.mul[pair][i * pair_right_dim_[pair] + j];
}

const std::vector<BlockMatrix>* FellBundle::unit_representation(Arrow u) const {
  const auto& r = rep_[idx(u)];
  return r ? &*r : nullptr;
}

FellBundle FellBundle::from_tables(BundleTables tables) {
  FellBundle e(std::move(tables));
  e.trace_representations();
  e.finish();
  return e;
}

void FellBundle::trace_representations() {
  const FiniteGroupoid& H = *t_.base;
  for (Arrow u : H.units()) {
    const std::size_t d = dim(u);
    const auto di = static_cast<Eigen::Index>(d);
    const std::size_t p = H.pair_index(u, u);
    std::vector<Mat> left(d, Mat::Zero(di, di));
    for (std::size_t l = 0; l < d; ++l)
      for (std::size_t i = 0; i < d; ++i)
        for (const auto& [k, v] : mul(p, l, i)) left[l](k, static_cast<Eigen::Index>(i)) += v;
    Vec tau(di);
    for (std::size_t l = 0; l < d; ++l) tau[static_cast<Eigen::Index>(l)] = left[l].trace();
    Mat q = Mat::Zero(di, di);
    for (std::size_t i = 0; i < d; ++i)
      for (const auto& [l, c] : star(u, i))
        for (std::size_t j = 0; j < d; ++j)
          for (const auto& [k, v] : mul(p, l, j))
            q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += c * v * tau[k];
    if (d == 0) {
      rep_[idx(u)] = std::vector<BlockMatrix>{};
      continue;
    }
    const double scale = std::max(1e-300, q.cwiseAbs().maxCoeff());
    if ((q - q.adjoint()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
      rep_note_[idx(u)] = "trace form on the unit fiber is not hermitian";
      continue;
    }
    const PsdRoots r = psd_roots((q + q.adjoint()) * 0.5, 1e-10 * scale);
    if (r.inv_sqrt.size() == 0) {
      rep_note_[idx(u)] = "trace form on the unit fiber is degenerate";
      continue;
    }
    std::vector<BlockMatrix> images;
    for (std::size_t l = 0; l < d; ++l) images.push_back(BlockMatrix{{r.sqrt * left[l] * r.inv_sqrt}});
    rep_[idx(u)] = std::move(images);
  }
}

void FellBundle::finish() {
  const FiniteGroupoid& H = *t_.base;
  for (Arrow u : H.units()) {
    const auto* rep = unit_representation(u);
    if (!rep) continue;
    Vec tau(static_cast<Eigen::Index>(rep->size()));
    for (std::size_t l = 0; l < rep->size(); ++l) {
      cplx t = 0.0;
      for (const auto& b : (*rep)[l].blocks) t += b.trace();
      tau[static_cast<Eigen::Index>(l)] = t;
    }
    trace_[idx(u)] = std::move(tau);
  }
  for (std::size_t hi = 0; hi < H.size(); ++hi) {
    const Arrow h = arrow_at(hi);
    const Arrow s = H.src(h);
    if (!unit_representation(s)) continue;
    const std::size_t d = dim(h);
    const auto di = static_cast<Eigen::Index>(d);
    const std::size_t p = H.pair_index(H.inv(h), h);
    const Vec& tau = trace_[idx(s)];
    Mat q = Mat::Zero(di, di);
    for (std::size_t i = 0; i < d; ++i)
      for (const auto& [l, c] : star(h, i))
        for (std::size_t j = 0; j < d; ++j)
          for (const auto& [k, v] : mul(p, l, j))
            q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += c * v * tau[k];
    gram_[hi] = q;
    const double scale = d ? std::max(1e-300, q.cwiseAbs().maxCoeff()) : 1.0;
    roots_[hi] = d ? psd_roots((q + q.adjoint()) * 0.5, 1e-10 * scale) : PsdRoots{};
  }
}

FellBundle build_bundle(const GroupoidMorphism& pi, const std::optional<Cocycle>& omega) {
  const MorphismClassification cls = classify_morphism(pi);
  if (!cls.surjective) throw Error(Errc::NotSurjective, "E(π) requires a surjective morphism", cls.witness);
  const FiniteGroupoid& G = *pi.domain();
  const FiniteGroupoid& H = *pi.codomain();
  if (omega && omega->base() != pi.domain())
    throw Error(Errc::BaseMismatch, "cocycle is defined on another groupoid");
  auto w = [&](Arrow a, Arrow b) { return omega ? (*omega)(a, b) : cplx(1.0, 0.0); };

  std::vector<std::vector<Arrow>> fiber(H.size());
  std::vector<std::uint32_t> pos(G.size());
  for (std::size_t h = 0; h < H.size(); ++h) {
    fiber[h] = pi.preimage(arrow_at(h));
    for (std::size_t i = 0; i < fiber[h].size(); ++i) pos[idx(fiber[h][i])] = static_cast<std::uint32_t>(i);
  }

  BundleTables t;
  t.base = pi.codomain();
  for (const auto& f : fiber) {
    std::vector<std::string> names;
    for (Arrow g : f) names.push_back(G.name(g));
    t.basis.push_back(std::move(names));
  }
  t.mul.resize(H.pair_count());
  H.for_each_pair([&](Arrow a, Arrow b, Arrow, std::size_t p) {
    auto& table = t.mul[p];
    for (Arrow g1 : fiber[idx(a)])
      for (Arrow g2 : fiber[idx(b)]) {
        SparseVec v;
        if (G.composable(g1, g2)) v.emplace_back(pos[idx(G.mul(g1, g2))], w(g1, g2));
        table.push_back(std::move(v));
      }
  });
  t.star.resize(H.size());
  for (std::size_t h = 0; h < H.size(); ++h)
    for (Arrow g : fiber[h])
      t.star[h].push_back(SparseVec{{pos[idx(G.inv(g))], std::conj(w(g, G.inv(g)))}});

  FellBundle e(std::move(t));
  // Unit fibers: (twisted) regular representation of K(x) = π⁻¹(x).
  for (Arrow x : H.units()) {
    const Subgroupoid k = restrict_to(G, fiber[idx(x)]);
    const ConvolutionAlgebra alg =
        omega ? ConvolutionAlgebra(k.groupoid, restrict_cocycle(*omega, k)) : ConvolutionAlgebra(k.groupoid);
    std::vector<BlockMatrix> images;
    for (Arrow g : fiber[idx(x)])
      images.push_back(alg.regular(AlgebraElement::delta(k.groupoid, *k.from_parent[idx(g)])));
    e.rep_[idx(x)] = std::move(images);
  }
  e.finish();
  e.morphism_ = pi;
  if (omega) e.cocycle_ = *omega;
  return e;
}

// ---------------------------------------------------------------------------
// Fiber operations

FiberElement fiber_zero(const FellBundle& e, Arrow h) {
  return {h, Vec::Zero(static_cast<Eigen::Index>(e.dim(h)))};
}

FiberElement fiber_basis_element(const FellBundle& e, Arrow h, std::size_t i) {
  FiberElement x = fiber_zero(e, h);
  x.coeffs[static_cast<Eigen::Index>(i)] = 1.0;
  return x;
}

FiberElement fiber_random(const FellBundle& e, Arrow h, std::mt19937_64& rng) {
  return {h, random_gaussian(e.dim(h), rng)};
}

FiberElement fiber_mul(const FellBundle& e, const FiberElement& x, const FiberElement& y) {
  const FiniteGroupoid& H = *e.base();
  if (!H.composable(x.arrow, y.arrow))
    throw Error(Errc::NotComposable, "fibers are not composable", {H.name(x.arrow), H.name(y.arrow)});
  const std::size_t p = H.pair_index(x.arrow, y.arrow);
  FiberElement out = fiber_zero(e, H.mul(x.arrow, y.arrow));
  for (Eigen::Index i = 0; i < x.coeffs.size(); ++i) {
    if (x.coeffs[i] == cplx(0.0)) continue;
    for (Eigen::Index j = 0; j < y.coeffs.size(); ++j) {
      if (y.coeffs[j] == cplx(0.0)) continue;
      add_scaled(out.coeffs, e.mul(p, static_cast<std::size_t>(i), static_cast<std::size_t>(j)),
                 x.coeffs[i] * y.coeffs[j]);
    }
  }
  return out;
}

FiberElement fiber_star(const FellBundle& e, const FiberElement& x) {
  FiberElement out = fiber_zero(e, e.base()->inv(x.arrow));
  for (Eigen::Index i = 0; i < x.coeffs.size(); ++i)
    add_scaled(out.coeffs, e.star(x.arrow, static_cast<std::size_t>(i)), std::conj(x.coeffs[i]));
  return out;
}

BlockMatrix unit_fiber_image(const FellBundle& e, const FiberElement& a) {
  if (!e.base()->is_unit(a.arrow))
    throw Error(Errc::BaseMismatch, "element does not lie in a unit fiber", {e.base()->name(a.arrow)});
  const auto* rep = e.unit_representation(a.arrow);
  if (!rep)
    throw Error(Errc::BundleNotVerified, "unit fiber has no C*-representation",
                {e.base()->name(a.arrow), e.unit_representation_note(a.arrow)});
  if (rep->empty()) return BlockMatrix{};
  BlockMatrix out = BlockMatrix::zero(rep->front().block_sizes());
  for (std::size_t l = 0; l < rep->size(); ++l) {
    const cplx c = a.coeffs[static_cast<Eigen::Index>(l)];
    if (c == cplx(0.0)) continue;
    for (std::size_t b = 0; b < out.blocks.size(); ++b) out.blocks[b] += c * (*rep)[l].blocks[b];
  }
  return out;
}

double fiber_norm(const FellBundle& e, const FiberElement& x) {
  return std::sqrt(op_norm(unit_fiber_image(e, fiber_mul(e, fiber_star(e, x), x))));
}

double fiber_module_norm(const FellBundle& e, const FiberElement& x) {
  const FiniteGroupoid& H = *e.base();
  const Arrow h = x.arrow, s = H.src(h);
  const PsdRoots* rh = e.module_roots(h);
  const PsdRoots* rs = e.module_roots(s);
  if (!rh || !rs || (e.dim(s) > 0 && rs->inv_sqrt.size() == 0))
    throw Error(Errc::BundleNotVerified, "module inner product unavailable", {H.name(h)});
  const std::size_t dh = e.dim(h), ds = e.dim(s);
  if (dh == 0 || ds == 0) return 0.0;
  const std::size_t p = H.pair_index(h, s);
  Mat m = Mat::Zero(static_cast<Eigen::Index>(dh), static_cast<Eigen::Index>(ds));
  for (std::size_t i = 0; i < dh; ++i) {
    const cplx c = x.coeffs[static_cast<Eigen::Index>(i)];
    if (c == cplx(0.0)) continue;
    for (std::size_t l = 0; l < ds; ++l)
      for (const auto& [k, v] : e.mul(p, i, l)) m(k, static_cast<Eigen::Index>(l)) += c * v;
  }
  return op_norm(Mat(rh->sqrt * m * rs->inv_sqrt));
}

// ---------------------------------------------------------------------------
// Kernel decomposition

CheckList kernel_decomposition_check(const GroupoidMorphism& pi, std::mt19937_64& rng) {
  const KernelDecomposition kd = kernel(pi);
  const FiniteGroupoid& G = *pi.domain();
  Check partition{"fibers_partition_kernel", true, 0.0, {}};
  std::vector<int> hits(G.size(), 0);
  for (const auto& f : kd.fibers)
    for (Arrow a : f.fiber.to_parent) ++hits[idx(a)];
  std::vector<bool> in_k(G.size(), false);
  for (Arrow a : kd.kernel.to_parent) in_k[idx(a)] = true;
  for (std::size_t i = 0; i < G.size(); ++i)
    if (hits[i] != (in_k[i] ? 1 : 0)) {
      partition.pass = false;
      partition.residual = 1.0;
      partition.witness = G.name(arrow_at(i));
      break;
    }

  Check separated{"no_pairs_across_fibers", true, 0.0, {}};
  const FiniteGroupoid& K = *kd.kernel.groupoid;
  K.for_each_pair([&](Arrow a, Arrow b, Arrow, std::size_t) {
    const Arrow pa = pi(kd.kernel.to_parent[idx(a)]), pb = pi(kd.kernel.to_parent[idx(b)]);
    if (pa != pb && separated.pass) {
      separated.pass = false;
      separated.residual = 1.0;
      separated.witness = K.name(a) + "," + K.name(b);
    }
  });

  Check blocks{"direct_sum_blocks", true, 0.0, {}};
  const WedderburnInvariants whole = wedderburn(ConvolutionAlgebra(kd.kernel.groupoid), rng);
  std::vector<std::size_t> merged;
  for (const auto& f : kd.fibers) {
    const auto w = wedderburn(ConvolutionAlgebra(f.fiber.groupoid), rng);
    merged.insert(merged.end(), w.blocks.begin(), w.blocks.end());
  }
  std::sort(merged.rbegin(), merged.rend());
  if (merged != whole.blocks) {
    blocks.pass = false;
    blocks.residual = 1.0;
    WedderburnInvariants m;
    m.blocks = merged;
    blocks.witness = whole.to_string() + " vs " + m.to_string();
  }
  return {partition, separated, blocks};
}

// ---------------------------------------------------------------------------
// Axioms

const std::vector<std::string>& axiom_names() {
  static const std::vector<std::string> names{
      "fiber_of_product", "bilinear",          "associative",    "submultiplicative", "fiber_of_adjoint",
      "conjugate_linear", "involutive",        "adjoint_of_product", "cstar_identity", "positive"};
  return names;
}

CheckList verify_axioms(const FellBundle& e, std::mt19937_64& rng, std::size_t samples, double tol) {
  const FiniteGroupoid& H = *e.base();
  const auto& nm = axiom_names();
  ResidualTracker fiber_of_product(nm[0], tol), bilinear(nm[1], tol), associative(nm[2], tol),
      submult(nm[3], tol), fiber_of_adjoint(nm[4], tol), conj_linear(nm[5], tol), involutive(nm[6], tol),
      adjoint_product(nm[7], tol), cstar(nm[8], tol), positive(nm[9], tol);
  ResidualTracker representation("unit_fiber_representation", tol), saturated("saturated", tol);

  // Unit fiber representations: *-homomorphic and injective on basis elements.
  std::vector<bool> rep_ok(H.size(), false);
  for (Arrow u : H.units()) {
    const auto* rep = e.unit_representation(u);
    if (!rep) {
      representation.fail(H.name(u) + ": " + e.unit_representation_note(u));
      continue;
    }
    const std::size_t d = e.dim(u);
    const std::size_t p = H.pair_index(u, u);
    for (std::size_t i = 0; i < d; ++i) {
      const BlockMatrix& ri = (*rep)[i];
      const BlockMatrix si = unit_fiber_image(e, fiber_star(e, fiber_basis_element(e, u, i)));
      representation.observe((si - ri.adjoint()).max_abs(), label(e, u, i) + " adjoint");
      for (std::size_t j = 0; j < d; ++j) {
        FiberElement prod{u, dense(e.mul(p, i, j), d)};
        const BlockMatrix lhs = unit_fiber_image(e, prod);
        const BlockMatrix rhs = ri * (*rep)[j];
        representation.observe(rel((lhs - rhs).max_abs(), rhs.max_abs()), label(e, u, i) + "*" + label(e, u, j));
      }
    }
    if (d > 0) {
      Mat cols(static_cast<Eigen::Index>(rep->front().flat_size()), static_cast<Eigen::Index>(d));
      for (std::size_t i = 0; i < d; ++i) cols.col(static_cast<Eigen::Index>(i)) = (*rep)[i].flatten();
      const std::size_t rank = numerical_rank(cols);
      if (rank != d) representation.fail(H.name(u) + ": representation not injective");
    }
    rep_ok[idx(u)] = representation.pass();
  }
  auto norms_available = [&](Arrow h) { return rep_ok[idx(H.src(h))] && rep_ok[idx(H.rng(h))]; };

  // Structural: products and adjoints land in the right fibers (enforced by
  // table shapes, so these record a zero residual).
  fiber_of_product.observe(0.0, "");
  fiber_of_adjoint.observe(0.0, "");

  // Pairwise checks.
  H.for_each_pair([&](Arrow a, Arrow b, Arrow ab, std::size_t p) {
    const std::size_t d1 = e.dim(a), d2 = e.dim(b), d12 = e.dim(ab);
    const std::string tag = H.name(a) + "," + H.name(b);

    // Saturation: span of all basis products.
    if (d12 > 0) {
      Mat cols = Mat::Zero(static_cast<Eigen::Index>(d12), static_cast<Eigen::Index>(std::max<std::size_t>(1, d1 * d2)));
      for (std::size_t i = 0; i < d1; ++i)
        for (std::size_t j = 0; j < d2; ++j)
          for (const auto& [k, v] : e.mul(p, i, j)) cols(k, static_cast<Eigen::Index>(i * d2 + j)) += v;
      if (numerical_rank(cols) != d12) saturated.fail(tag);
    }

    // Adjoint of a product, exhaustive on basis pairs.
    for (std::size_t i = 0; i < d1; ++i)
      for (std::size_t j = 0; j < d2; ++j) {
        const FiberElement x = fiber_basis_element(e, a, i), y = fiber_basis_element(e, b, j);
        const FiberElement lhs = fiber_star(e, fiber_mul(e, x, y));
        const FiberElement rhs = fiber_mul(e, fiber_star(e, y), fiber_star(e, x));
        adjoint_product.observe((lhs.coeffs - rhs.coeffs).cwiseAbs().maxCoeff(),
                                label(e, a, i) + "," + label(e, b, j));
      }

    // Associativity on basis triples (a, b, c).
    for (Arrow c : H.with_range(H.src(b))) {
      const std::size_t d3 = e.dim(c);
      for (std::size_t i = 0; i < d1; ++i)
        for (std::size_t j = 0; j < d2; ++j)
          for (std::size_t k = 0; k < d3; ++k) {
            const FiberElement x = fiber_basis_element(e, a, i), y = fiber_basis_element(e, b, j),
                               z = fiber_basis_element(e, c, k);
            const FiberElement lhs = fiber_mul(e, fiber_mul(e, x, y), z);
            const FiberElement rhs = fiber_mul(e, x, fiber_mul(e, y, z));
            if (lhs.coeffs.size() == 0) continue;
            associative.observe((lhs.coeffs - rhs.coeffs).cwiseAbs().maxCoeff(),
                                label(e, a, i) + "," + label(e, b, j) + "," + label(e, c, k));
          }
    }

    // Bilinearity on a random combination.
    if (d1 > 0 && d2 > 0 && d12 > 0) {
      const FiberElement x = fiber_random(e, a, rng), x2 = fiber_random(e, a, rng);
      const FiberElement y = fiber_random(e, b, rng), y2 = fiber_random(e, b, rng);
      const cplx alpha = random_gaussian(1, rng)[0];
      const FiberElement lhs1 = fiber_mul(e, {a, alpha * x.coeffs + x2.coeffs}, y);
      const Vec rhs1 = alpha * fiber_mul(e, x, y).coeffs + fiber_mul(e, x2, y).coeffs;
      const FiberElement lhs2 = fiber_mul(e, x, {b, alpha * y.coeffs + y2.coeffs});
      const Vec rhs2 = alpha * fiber_mul(e, x, y).coeffs + fiber_mul(e, x, y2).coeffs;
      const double scale = std::max(rhs1.cwiseAbs().maxCoeff(), rhs2.cwiseAbs().maxCoeff());
      bilinear.observe(rel(std::max((lhs1.coeffs - rhs1).cwiseAbs().maxCoeff(),
                                    (lhs2.coeffs - rhs2).cwiseAbs().maxCoeff()),
                           scale),
                       tag);
    }

    // Submultiplicativity: basis pairs plus random pairs.
    if (norms_available(a) && norms_available(b) && d1 > 0 && d2 > 0) {
      auto observe = [&](const FiberElement& x, const FiberElement& y, const std::string& w) {
        const double nx = fiber_norm(e, x), ny = fiber_norm(e, y);
        const double nxy = fiber_norm(e, fiber_mul(e, x, y));
        submult.observe(rel(std::max(0.0, nxy - nx * ny), nx * ny), w);
      };
      for (std::size_t i = 0; i < d1; ++i)
        for (std::size_t j = 0; j < d2; ++j)
          observe(fiber_basis_element(e, a, i), fiber_basis_element(e, b, j), label(e, a, i) + "," + label(e, b, j));
      for (std::size_t s = 0; s < samples; ++s)
        observe(fiber_random(e, a, rng), fiber_random(e, b, rng), tag + " sample " + std::to_string(s));
    } else if (d1 > 0 && d2 > 0) {
      submult.fail(tag + ": no C*-norm on a unit fiber");
    }
  });

  // Per-arrow checks.
  for (std::size_t hi = 0; hi < H.size(); ++hi) {
    const Arrow h = arrow_at(hi);
    const std::size_t d = e.dim(h);
    if (d == 0) continue;
    for (std::size_t i = 0; i < d; ++i) {
      const FiberElement x = fiber_basis_element(e, h, i);
      involutive.observe((fiber_star(e, fiber_star(e, x)).coeffs - x.coeffs).cwiseAbs().maxCoeff(), label(e, h, i));
    }
    {
      const FiberElement x = fiber_random(e, h, rng), y = fiber_random(e, h, rng);
      const cplx alpha = random_gaussian(1, rng)[0];
      const Vec lhs = fiber_star(e, {h, alpha * x.coeffs + y.coeffs}).coeffs;
      const Vec rhs = std::conj(alpha) * fiber_star(e, x).coeffs + fiber_star(e, y).coeffs;
      conj_linear.observe(rel((lhs - rhs).cwiseAbs().maxCoeff(), rhs.cwiseAbs().maxCoeff()), H.name(h));
    }
    if (!norms_available(h)) {
      cstar.fail(H.name(h) + ": no C*-norm on a unit fiber");
      positive.fail(H.name(h) + ": no C*-norm on a unit fiber");
      continue;
    }
    auto observe = [&](const FiberElement& x, const std::string& w) {
      const BlockMatrix xx = unit_fiber_image(e, fiber_mul(e, fiber_star(e, x), x));
      const double n_xx = op_norm(xx);
      double module = 0.0;
      try {
        module = fiber_module_norm(e, x);
      } catch (const Error&) {
        cstar.fail(w + ": module inner product degenerate");
        return;
      }
      cstar.observe(rel(std::abs(n_xx - module * module), n_xx), w);
      positive.observe(rel(std::max(0.0, -min_hermitian_eigenvalue(xx)), n_xx), w);
    };
    for (std::size_t i = 0; i < d; ++i) observe(fiber_basis_element(e, h, i), label(e, h, i));
    for (std::size_t s = 0; s < samples; ++s) observe(fiber_random(e, h, rng), H.name(h) + " sample " + std::to_string(s));
  }

  return {fiber_of_product.done(), bilinear.done(),        associative.done(),      submult.done(),
          fiber_of_adjoint.done(), conj_linear.done(),     involutive.done(),       adjoint_product.done(),
          cstar.done(),            positive.done(),        representation.done(),   saturated.done()};
}

// ---------------------------------------------------------------------------
// Section algebra

SectionAlgebra::SectionAlgebra(const FellBundle& e) : e_(&e) {
  const FiniteGroupoid& H = *e.base();
  for (std::size_t hi = 0; hi < H.size(); ++hi)
    for (std::size_t i = 0; i < e.dim(arrow_at(hi)); ++i) loc_.emplace_back(arrow_at(hi), i);
  for (Arrow u : H.units())
    if (!e.unit_representation(u))
      throw Error(Errc::BundleNotVerified, "unit fiber has no C*-representation",
                  {H.name(u), e.unit_representation_note(u)});
  vpos_.assign(H.size(), 0);
  unit_slot_.assign(H.size(), 0);
  const auto units = H.units();
  for (std::size_t slot = 0; slot < units.size(); ++slot) {
    const Arrow u = units[slot];
    unit_slot_[idx(u)] = slot;
    std::size_t m = 0;
    for (Arrow h : H.with_source(u)) {
      vpos_[idx(h)] = m;
      m += e.dim(h);
    }
    vdim_.push_back(m);
    const auto mi = static_cast<Eigen::Index>(m);
    Mat s = Mat::Zero(mi, mi), si = Mat::Zero(mi, mi);
    for (Arrow h : H.with_source(u)) {
      const auto d = static_cast<Eigen::Index>(e.dim(h));
      if (d == 0) continue;
      const PsdRoots* r = e.module_roots(h);
      if (!r || r->inv_sqrt.size() == 0)
        throw Error(Errc::BundleNotVerified, "fiber inner product is degenerate", {H.name(h)});
      const auto at = static_cast<Eigen::Index>(vpos_[idx(h)]);
      s.block(at, at, d, d) = r->sqrt;
      si.block(at, at, d, d) = r->inv_sqrt;
    }
    s_.push_back(std::move(s));
    s_inv_.push_back(std::move(si));
  }
}

Vec SectionAlgebra::multiply(const Vec& a, const Vec& b) const {
  const FellBundle& e = *e_;
  const FiniteGroupoid& H = *e.base();
  Vec out = Vec::Zero(static_cast<Eigen::Index>(dim()));
  H.for_each_pair([&](Arrow x, Arrow y, Arrow xy, std::size_t p) {
    const std::size_t ox = e.offset(x), oy = e.offset(y), oxy = e.offset(xy);
    for (std::size_t i = 0; i < e.dim(x); ++i) {
      const cplx ci = a[static_cast<Eigen::Index>(ox + i)];
      if (ci == cplx(0.0)) continue;
      for (std::size_t j = 0; j < e.dim(y); ++j) {
        const cplx cj = b[static_cast<Eigen::Index>(oy + j)];
        if (cj == cplx(0.0)) continue;
        for (const auto& [k, v] : e.mul(p, i, j)) out[static_cast<Eigen::Index>(oxy + k)] += ci * cj * v;
      }
    }
  });
  return out;
}

Vec SectionAlgebra::star(const Vec& a) const {
  const FellBundle& e = *e_;
  const FiniteGroupoid& H = *e.base();
  Vec out = Vec::Zero(static_cast<Eigen::Index>(dim()));
  for (std::size_t hi = 0; hi < H.size(); ++hi) {
    const Arrow h = arrow_at(hi);
    const std::size_t oi = e.offset(H.inv(h));
    for (std::size_t i = 0; i < e.dim(h); ++i)
      for (const auto& [k, v] : e.star(h, i))
        out[static_cast<Eigen::Index>(oi + k)] += std::conj(a[static_cast<Eigen::Index>(e.offset(h) + i)]) * v;
  }
  return out;
}

Vec SectionAlgebra::expectation(const Vec& a) const {
  const FellBundle& e = *e_;
  Vec out = Vec::Zero(a.size());
  for (Arrow u : e.base()->units()) {
    const auto o = static_cast<Eigen::Index>(e.offset(u));
    const auto d = static_cast<Eigen::Index>(e.dim(u));
    out.segment(o, d) = a.segment(o, d);
  }
  return out;
}

SparseVec SectionAlgebra::basis_product(std::size_t a, std::size_t b) const {
  const FellBundle& e = *e_;
  const FiniteGroupoid& H = *e.base();
  const auto [x, i] = loc_[a];
  const auto [y, j] = loc_[b];
  SparseVec out;
  if (!H.composable(x, y)) return out;
  const std::size_t o = e.offset(H.mul(x, y));
  for (const auto& [k, v] : e.mul(H.pair_index(x, y), i, j)) out.emplace_back(static_cast<std::uint32_t>(o + k), v);
  return out;
}

SparseVec SectionAlgebra::basis_star(std::size_t a) const {
  const FellBundle& e = *e_;
  const auto [x, i] = loc_[a];
  const std::size_t o = e.offset(e.base()->inv(x));
  SparseVec out;
  for (const auto& [k, v] : e.star(x, i)) out.emplace_back(static_cast<std::uint32_t>(o + k), v);
  return out;
}

BlockMatrix SectionAlgebra::represent(const Vec& f) const {
  const FellBundle& e = *e_;
  const FiniteGroupoid& H = *e.base();
  BlockMatrix out;
  const auto units = H.units();
  for (std::size_t slot = 0; slot < units.size(); ++slot) {
    const Arrow u = units[slot];
    const auto m = static_cast<Eigen::Index>(vdim_[slot]);
    Mat l = Mat::Zero(m, m);
    for (Arrow k : H.with_source(u)) {
      const std::size_t dk = e.dim(k);
      for (Arrow h : H.with_source(H.rng(k))) {
        const std::size_t p = H.pair_index(h, k);
        const Arrow hk = H.mul(h, k);
        for (std::size_t i = 0; i < e.dim(h); ++i) {
          const cplx c = f[static_cast<Eigen::Index>(e.offset(h) + i)];
          if (c == cplx(0.0)) continue;
          for (std::size_t j = 0; j < dk; ++j)
            for (const auto& [t, v] : e.mul(p, i, j))
              l(static_cast<Eigen::Index>(vpos_[idx(hk)] + t), static_cast<Eigen::Index>(vpos_[idx(k)] + j)) += c * v;
        }
      }
    }
    out.blocks.push_back(s_[slot] * l * s_inv_[slot]);
  }
  return out;
}

std::vector<BlockMatrix> SectionAlgebra::basis_images() const {
  std::vector<BlockMatrix> out;
  out.reserve(dim());
  for (std::size_t k = 0; k < dim(); ++k) {
    Vec v = Vec::Zero(static_cast<Eigen::Index>(dim()));
    v[static_cast<Eigen::Index>(k)] = 1.0;
    out.push_back(represent(v));
  }
  return out;
}

CheckList verify_expectation(const SectionAlgebra& s, std::mt19937_64& rng, std::size_t samples, double tol) {
  const FellBundle& e = s.bundle();
  const FiniteGroupoid& H = *e.base();
  ResidualTracker idempotent("expectation_idempotent", tol), module("expectation_module_map", tol),
      positive("expectation_positive", tol), contractive("expectation_contractive", tol),
      faithful("expectation_faithful", tol);
  for (std::size_t k = 0; k < samples; ++k) {
    const std::string tag = "sample " + std::to_string(k);
    const Vec f = s.random(rng);
    const Vec pf = s.expectation(f);
    idempotent.observe((s.expectation(pf) - pf).cwiseAbs().maxCoeff(), tag);
    const Vec a = s.expectation(s.random(rng)), b = s.expectation(s.random(rng));
    const Vec lhs = s.expectation(s.multiply(s.multiply(a, f), b));
    const Vec rhs = s.multiply(s.multiply(a, pf), b);
    module.observe(rel((lhs - rhs).cwiseAbs().maxCoeff(), rhs.cwiseAbs().maxCoeff()), tag);
    const BlockMatrix pff = s.represent(s.expectation(s.multiply(s.star(f), f)));
    const double n = op_norm(pff);
    positive.observe(rel(std::max(0.0, -min_hermitian_eigenvalue(pff)), n), tag);
    const double nf = s.norm(f);
    contractive.observe(rel(std::max(0.0, s.norm(pf) - nf), nf), tag);
  }
  // τ(P(f*f)) = Σ_h ⟨f(h), f(h)⟩ through the module Gram matrices, so P is
  // faithful iff every Gram matrix is positive definite.
  for (std::size_t hi = 0; hi < H.size(); ++hi) {
    const Arrow h = arrow_at(hi);
    if (e.dim(h) == 0) continue;
    const PsdRoots* r = e.module_roots(h);
    if (!r) {
      faithful.fail(H.name(h) + ": no inner product");
      continue;
    }
    const double scale = std::max(1.0, e.module_gram(h).cwiseAbs().maxCoeff());
    faithful.observe(r->min_eigenvalue > tol * scale ? 0.0 : 1.0, H.name(h));
  }
  return {idempotent.done(), module.done(), positive.done(), contractive.done(), faithful.done()};
}

// ---------------------------------------------------------------------------
// ψ: C*_r(G) → C*_r(E(π))

IsoReport psi_iso_check(const GroupoidMorphism& pi, const std::optional<Cocycle>& omega, std::mt19937_64& rng,
                        std::size_t samples, double tol, double iso_tol) {
  IsoReport report;
  const GroupoidPtr& gp = pi.domain();
  const FiniteGroupoid& G = *gp;
  const FellBundle e = build_bundle(pi, omega);
  const SectionAlgebra s(e);
  const ConvolutionAlgebra alg = omega ? ConvolutionAlgebra(gp, *omega) : ConvolutionAlgebra(gp);
  auto w = [&](Arrow a, Arrow b) { return alg.omega(a, b); };

  // ψ on the arrow basis.
  std::vector<std::size_t> psi(G.size());
  std::vector<Arrow> psi_inv(s.dim(), Arrow{});
  std::vector<bool> hit(s.dim(), false);
  Check bijective{"psi_bijective", true, 0.0, {}};
  for (std::size_t hi = 0; hi < e.base()->size(); ++hi) {
    const auto fiber = pi.preimage(arrow_at(hi));
    for (std::size_t i = 0; i < fiber.size(); ++i) psi[idx(fiber[i])] = e.offset(arrow_at(hi)) + i;
  }
  if (s.dim() != G.size()) {
    bijective = {"psi_bijective", false, 1.0, "dimension " + std::to_string(s.dim()) + " vs " + std::to_string(G.size())};
  } else {
    for (std::size_t g = 0; g < G.size(); ++g) {
      if (hit[psi[g]] && bijective.pass) bijective = {"psi_bijective", false, 1.0, G.name(arrow_at(g))};
      hit[psi[g]] = true;
      psi_inv[psi[g]] = arrow_at(g);
    }
  }
  report.checks.push_back(bijective);
  if (!bijective.pass) return report;

  auto apply = [&](const AlgebraElement& f) {
    Vec out = Vec::Zero(static_cast<Eigen::Index>(s.dim()));
    for (std::size_t g = 0; g < G.size(); ++g) out[static_cast<Eigen::Index>(psi[g])] = f[arrow_at(g)];
    return out;
  };
  auto sparse_diff = [&](const SparseVec& a, const SparseVec& b) {
    std::map<std::uint32_t, cplx> acc;
    for (const auto& [k, v] : a) acc[k] += v;
    for (const auto& [k, v] : b) acc[k] -= v;
    double m = 0.0;
    for (const auto& [k, v] : acc) m = std::max(m, std::abs(v));
    return m;
  };

  ResidualTracker multiplicative("psi_multiplicative", tol), star("psi_star", tol), inner("psi_inner_product", tol);
  for (std::size_t i = 0; i < G.size(); ++i) {
    const Arrow g1 = arrow_at(i);
    const Arrow g1i = G.inv(g1);
    SparseVec lhs_star{{static_cast<std::uint32_t>(psi[idx(g1i)]), std::conj(w(g1, g1i))}};
    star.observe(sparse_diff(lhs_star, s.basis_star(psi[i])), G.name(g1));
    for (std::size_t j = 0; j < G.size(); ++j) {
      const Arrow g2 = arrow_at(j);
      SparseVec lhs;
      if (G.composable(g1, g2)) lhs.emplace_back(static_cast<std::uint32_t>(psi[idx(G.mul(g1, g2))]), w(g1, g2));
      multiplicative.observe(sparse_diff(lhs, s.basis_product(psi[i], psi[j])), G.name(g1) + "," + G.name(g2));

      // Φ(δ_g1* δ_g2) against P(ψ(δ_g1)* ψ(δ_g2)).
      SparseVec phi;
      if (G.rng(g1) == G.rng(g2)) {
        const Arrow z = G.mul(g1i, g2);
        if (e.base()->is_unit(pi(z)))
          phi.emplace_back(static_cast<std::uint32_t>(psi[idx(z)]), std::conj(w(g1, g1i)) * w(g1i, g2));
      }
      SparseVec pe;
      for (const auto& [k, c] : s.basis_star(psi[i]))
        for (const auto& [t, v] : s.basis_product(k, psi[j]))
          if (e.base()->is_unit(s.locate(t).first)) pe.emplace_back(t, c * v);
      inner.observe(sparse_diff(phi, pe), G.name(g1) + "," + G.name(g2));
    }
  }
  report.checks.push_back(multiplicative.done());
  report.checks.push_back(star.done());
  report.checks.push_back(inner.done());

  ResidualTracker isometric("psi_isometric", iso_tol);
  for (std::size_t k = 0; k < samples; ++k) {
    const AlgebraElement f = AlgebraElement::random(gp, rng);
    const double nf = alg.norm(f);
    const double ne = s.norm(apply(f));
    isometric.observe(std::abs(ne - nf) / std::max(nf, 1e-300), "sample " + std::to_string(k));
  }
  report.checks.push_back(isometric.done());

  report.groupoid_side = wedderburn(alg, rng);
  const auto images = s.basis_images();
  report.bundle_side = wedderburn(images, rng);
  Check equal{"wedderburn_equal", report.groupoid_side.blocks == report.bundle_side.blocks, 0.0, {}};
  if (!equal.pass) {
    equal.residual = 1.0;
    equal.witness = report.groupoid_side.to_string() + " vs " + report.bundle_side.to_string();
  }
  report.checks.push_back(equal);
  return report;
}

// ---------------------------------------------------------------------------
// Bisection bimodules

CheckList bisection_bimodule_check(const FellBundle& e, const Bisection& u, std::mt19937_64& rng,
                                   std::size_t samples, double tol) {
  const FiniteGroupoid& H = *e.base();
  ResidualTracker right_pos("right_inner_product_positive", tol), left_pos("left_inner_product_positive", tol),
      right_full("right_inner_product_full", tol), left_full("left_inner_product_full", tol),
      imprimitivity("imprimitivity", tol);
  for (Arrow h : u.arrows()) {
    const Arrow s = H.src(h), r = H.rng(h);
    const std::size_t d = e.dim(h);
    const std::string tag = H.name(h);

    // Fullness: ⟨E_h, E_h⟩_B spans E_s and ⟨E_h, E_h⟩_A spans E_r.
    auto full = [&](Arrow target, bool right) {
      const std::size_t dt = e.dim(target);
      if (dt == 0) return true;
      Mat cols = Mat::Zero(static_cast<Eigen::Index>(dt), static_cast<Eigen::Index>(std::max<std::size_t>(1, d * d)));
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
          const FiberElement bi = fiber_basis_element(e, h, i), bj = fiber_basis_element(e, h, j);
          const FiberElement v = right ? fiber_mul(e, fiber_star(e, bi), bj) : fiber_mul(e, bi, fiber_star(e, bj));
          cols.col(static_cast<Eigen::Index>(i * d + j)) = v.coeffs;
        }
      return numerical_rank(cols) == dt;
    };
    if (!full(s, true)) right_full.fail(tag);
    if (!full(r, false)) left_full.fail(tag);

    // ⟨ξ,η⟩_A ζ = ξ ⟨η,ζ⟩_B on basis triples.
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j)
        for (std::size_t k = 0; k < d; ++k) {
          const FiberElement x = fiber_basis_element(e, h, i), y = fiber_basis_element(e, h, j),
                             z = fiber_basis_element(e, h, k);
          const FiberElement lhs = fiber_mul(e, fiber_mul(e, x, fiber_star(e, y)), z);
          const FiberElement rhs = fiber_mul(e, x, fiber_mul(e, fiber_star(e, y), z));
          imprimitivity.observe((lhs.coeffs - rhs.coeffs).cwiseAbs().maxCoeff(),
                                label(e, h, i) + "," + label(e, h, j) + "," + label(e, h, k));
        }

    // Positivity on basis and random sections.
    if (d == 0) continue;
    if (!e.unit_representation(s) || !e.unit_representation(r)) {
      right_pos.fail(tag + ": no C*-norm on a unit fiber");
      left_pos.fail(tag + ": no C*-norm on a unit fiber");
      continue;
    }
    auto observe = [&](const FiberElement& x, const std::string& w) {
      const BlockMatrix b = unit_fiber_image(e, fiber_mul(e, fiber_star(e, x), x));
      const BlockMatrix a = unit_fiber_image(e, fiber_mul(e, x, fiber_star(e, x)));
      right_pos.observe(rel(std::max(0.0, -min_hermitian_eigenvalue(b)), op_norm(b)), w);
      left_pos.observe(rel(std::max(0.0, -min_hermitian_eigenvalue(a)), op_norm(a)), w);
    };
    for (std::size_t i = 0; i < d; ++i) observe(fiber_basis_element(e, h, i), label(e, h, i));
    for (std::size_t k = 0; k < samples; ++k) observe(fiber_random(e, h, rng), tag + " sample " + std::to_string(k));
  }
  return {right_pos.done(), left_pos.done(), right_full.done(), left_full.done(), imprimitivity.done()};
}

}  // namespace fellgpd
