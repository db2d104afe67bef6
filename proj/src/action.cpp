#include "fellgpd/action.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <set>
#include <unordered_map>

#include <Eigen/Eigenvalues>

#include "fellgpd/catalog.hpp"
#include "fellgpd/error.hpp"
#include "fellgpd/star_algebra.hpp"
#include "fellgpd/wedderburn.hpp"

namespace fellgpd {

// ---------------------------------------------------------------------------
// Actions

std::optional<std::size_t> GroupoidAction::apply(Arrow a, std::size_t x) const {
  const std::size_t y = act[idx(a) * points.size() + x];
  if (y == npos) return std::nullopt;
  return y;
}

GroupoidAction make_action(GroupoidPtr h, std::vector<std::string> points,
                           const std::map<std::string, std::string>& anchor,
                           const std::vector<std::array<std::string, 3>>& act) {
  GroupoidAction a;
  a.h = std::move(h);
  a.points = std::move(points);
  std::unordered_map<std::string, std::size_t> pos;
  for (std::size_t i = 0; i < a.points.size(); ++i)
    if (!pos.emplace(a.points[i], i).second) throw Error(Errc::Parse, "duplicate point", {a.points[i]});
  auto point = [&](const std::string& name) {
    auto it = pos.find(name);
    if (it == pos.end()) throw Error(Errc::Parse, "unknown point", {name});
    return it->second;
  };
  for (const auto& x : a.points) {
    auto it = anchor.find(x);
    if (it == anchor.end()) throw Error(Errc::Parse, "point has no anchor", {x});
    a.anchor.push_back(a.h->at(it->second));
  }
  a.act.assign(a.h->size() * a.points.size(), GroupoidAction::npos);
  for (const auto& [hn, xn, yn] : act) a.act[idx(a.h->at(hn)) * a.points.size() + point(xn)] = point(yn);
  return a;
}

void check_action(const GroupoidAction& a) {
  const FiniteGroupoid& H = *a.h;
  const std::size_t n = a.size();
  if (a.anchor.size() != n || a.act.size() != H.size() * n)
    throw Error(Errc::ActionAxiomViolation, "action tables have the wrong size");
  auto w = [&](Arrow h, std::size_t x) { return std::vector<std::string>{H.name(h), a.points[x]}; };
  std::vector<bool> hit(H.size(), false);
  for (std::size_t x = 0; x < n; ++x) {
    if (!H.is_unit(a.anchor[x])) throw Error(Errc::ActionAxiomViolation, "anchor is not a unit", {a.points[x]});
    hit[idx(a.anchor[x])] = true;
  }
  for (Arrow u : H.units())
    if (!hit[idx(u)]) throw Error(Errc::ActionAxiomViolation, "anchor misses a unit", {H.name(u)});
  for (std::size_t hi = 0; hi < H.size(); ++hi) {
    const Arrow h = arrow_at(hi);
    for (std::size_t x = 0; x < n; ++x) {
      const auto y = a.apply(h, x);
      const bool should = H.src(h) == a.anchor[x];
      if (should != y.has_value())
        throw Error(Errc::ActionAxiomViolation, should ? "h·x undefined although s(h) = ρ(x)"
                                                       : "h·x defined although s(h) ≠ ρ(x)", w(h, x));
      if (!y) continue;
      if (*y >= n) throw Error(Errc::ActionAxiomViolation, "h·x is not a point", w(h, x));
      if (a.anchor[*y] != H.rng(h)) throw Error(Errc::ActionAxiomViolation, "ρ(h·x) ≠ r(h)", w(h, x));
      if (H.is_unit(h) && *y != x) throw Error(Errc::ActionAxiomViolation, "ρ(x)·x ≠ x", w(h, x));
    }
  }
  H.for_each_pair([&](Arrow h2, Arrow h1, Arrow h21, std::size_t) {
    for (std::size_t x = 0; x < n; ++x) {
      const auto y = a.apply(h1, x);
      if (!y) continue;
      if (a.apply(h2, *y) != a.apply(h21, x))
        throw Error(Errc::ActionAxiomViolation, "h₂·(h₁·x) ≠ (h₂h₁)·x", {H.name(h2), H.name(h1), a.points[x]});
    }
  });
}

ActionGroupoid build_action_groupoid(const GroupoidAction& a) {
  check_action(a);
  const FiniteGroupoid& H = *a.h;
  const std::size_t n = a.size();
  std::vector<std::uint32_t> id(H.size() * n, UINT32_MAX);
  std::vector<std::pair<Arrow, std::size_t>> arrows;
  for (std::size_t hi = 0; hi < H.size(); ++hi)
    for (std::size_t x = 0; x < n; ++x)
      if (a.act[hi * n + x] != GroupoidAction::npos) {
        id[hi * n + x] = static_cast<std::uint32_t>(arrows.size());
        arrows.emplace_back(arrow_at(hi), x);
      }
  auto unit_of = [&](std::size_t x) { return id[idx(a.anchor[x]) * n + x]; };
  std::vector<std::string> names;
  std::vector<bool> is_unit;
  std::vector<std::uint32_t> src, rng, inv;
  for (const auto& [h, x] : arrows) {
    const std::size_t y = *a.apply(h, x);
    names.push_back(H.is_unit(h) ? a.points[x] : "(" + H.name(h) + "," + a.points[x] + ")");
    is_unit.push_back(H.is_unit(h));
    src.push_back(unit_of(x));
    rng.push_back(unit_of(y));
    inv.push_back(id[idx(H.inv(h)) * n + y]);
  }
  auto g = make_groupoid(std::move(names), std::move(is_unit), std::move(src), std::move(rng), std::move(inv),
                         [&](std::size_t p, std::size_t q) -> std::optional<std::size_t> {
                           const Arrow h2 = arrows[p].first;
                           const auto [h1, x] = arrows[q];
                           return id[idx(H.mul(h2, h1)) * n + x];
                         });
  std::vector<Arrow> map;
  for (const auto& [h, x] : arrows) map.push_back(h);
  GroupoidMorphism pi(g, a.h, std::move(map));
  MorphismClassification cls = classify_morphism(pi);
  return ActionGroupoid{g, std::move(pi), std::move(arrows), std::move(cls)};
}

CoveringAction covering_to_action(const GroupoidMorphism& pi) {
  const MorphismClassification cls = classify_morphism(pi);
  if (!cls.covering) throw Error(Errc::NotACovering, "morphism is not a covering", cls.witness);
  const FiniteGroupoid& G = *pi.domain();
  const FiniteGroupoid& H = *pi.codomain();
  const auto units = G.units();
  std::vector<std::size_t> point(G.size(), GroupoidAction::npos);
  GroupoidAction a;
  a.h = pi.codomain();
  for (std::size_t i = 0; i < units.size(); ++i) {
    point[idx(units[i])] = i;
    a.points.push_back(G.name(units[i]));
    a.anchor.push_back(pi(units[i]));
  }
  const std::size_t n = units.size();
  a.act.assign(H.size() * n, GroupoidAction::npos);
  for (std::size_t x = 0; x < n; ++x)
    for (Arrow g : G.with_source(units[x])) a.act[idx(pi(g)) * n + x] = point[idx(G.rng(g))];

  CoveringAction out{a, build_action_groupoid(a), {}, {}};
  std::vector<std::uint32_t> id(H.size() * n, UINT32_MAX);
  for (std::size_t k = 0; k < out.rebuilt.arrows.size(); ++k) {
    const auto [h, x] = out.rebuilt.arrows[k];
    id[idx(h) * n + x] = static_cast<std::uint32_t>(k);
  }
  out.to_action.resize(G.size());
  out.from_action.resize(G.size());
  for (std::size_t gi = 0; gi < G.size(); ++gi) {
    const Arrow g = arrow_at(gi);
    const Arrow t = arrow_at(id[idx(pi(g)) * n + point[idx(G.src(g))]]);
    out.to_action[gi] = t;
    out.from_action[idx(t)] = g;
  }
  if (auto w = isomorphism_defect(G, *out.rebuilt.groupoid, out.to_action))
    throw Error(Errc::NotACovering, "g ↦ (π(g), s(g)) is not an isomorphism", *w);
  if (auto w = isomorphism_defect(*out.rebuilt.groupoid, G, out.from_action))
    throw Error(Errc::NotACovering, "inverse of g ↦ (π(g), s(g)) is not an isomorphism", *w);
  return out;
}

// ---------------------------------------------------------------------------
// Random actions

namespace {

// Subgroups generated by at most two elements; enough for groups of order ≤ 6.
std::vector<std::vector<std::size_t>> small_subgroups(const FiniteGroupoid& g) {
  std::set<std::vector<std::size_t>> found;
  auto closure = [&](std::size_t a, std::size_t b) {
    std::set<std::size_t> s{0, a, b};
    bool grew = true;
    while (grew) {
      grew = false;
      const std::vector<std::size_t> cur(s.begin(), s.end());
      for (auto x : cur)
        for (auto y : cur) grew |= s.insert(idx(g.mul(arrow_at(x), arrow_at(y)))).second;
    }
    return std::vector<std::size_t>(s.begin(), s.end());
  };
  for (std::size_t a = 0; a < g.size(); ++a)
    for (std::size_t b = a; b < g.size(); ++b) found.insert(closure(a, b));
  return {found.begin(), found.end()};
}

}  // namespace

GroupoidAction random_action(std::mt19937_64& rng, std::size_t max_points, std::size_t max_arrows) {
  std::vector<GroupoidPtr> groups{catalog::cyclic_group(1), catalog::cyclic_group(2), catalog::cyclic_group(3),
                                  catalog::cyclic_group(4), catalog::z_n_squared(2), catalog::symmetric_group_3()};
  std::vector<std::pair<std::size_t, GroupoidPtr>> options;
  for (std::size_t m = 1; m <= 3; ++m)
    for (const auto& g : groups)
      if (m * m * g->size() <= max_arrows && m <= max_points) options.emplace_back(m, g);
  if (options.empty()) throw Error(Errc::ActionAxiomViolation, "no action fits the size limits");
  const auto [m, gamma] = options[std::uniform_int_distribution<std::size_t>(0, options.size() - 1)(rng)];
  const FiniteGroupoid& Gm = *gamma;

  // Y: random union of coset spaces Γ/K.
  const auto subgroups = small_subgroups(Gm);
  const std::size_t budget = max_points / m;
  struct Orbit {
    std::vector<std::size_t> subgroup;
    std::vector<std::size_t> reps;  // smallest element of each coset
  };
  std::vector<Orbit> orbits;
  std::size_t used = 0;
  std::bernoulli_distribution more(0.5);
  do {
    std::vector<std::size_t> fitting;
    for (std::size_t k = 0; k < subgroups.size(); ++k)
      if (used + Gm.size() / subgroups[k].size() <= budget) fitting.push_back(k);
    if (fitting.empty()) break;
    const auto& sub = subgroups[fitting[std::uniform_int_distribution<std::size_t>(0, fitting.size() - 1)(rng)]];
    Orbit o{sub, {}};
    std::set<std::size_t> reps;
    for (std::size_t x = 0; x < Gm.size(); ++x) {
      std::size_t lo = SIZE_MAX;
      for (auto k : sub) lo = std::min(lo, idx(Gm.mul(arrow_at(x), arrow_at(k))));
      reps.insert(lo);
    }
    o.reps.assign(reps.begin(), reps.end());
    used += o.reps.size();
    orbits.push_back(std::move(o));
  } while (more(rng));

  auto coset_of = [&](const Orbit& o, std::size_t x) {
    std::size_t lo = SIZE_MAX;
    for (auto k : o.subgroup) lo = std::min(lo, idx(Gm.mul(arrow_at(x), arrow_at(k))));
    return static_cast<std::size_t>(std::find(o.reps.begin(), o.reps.end(), lo) - o.reps.begin());
  };

  auto pair = catalog::pair_groupoid(m);
  GroupoidAction a;
  a.h = catalog::product(*pair, Gm);
  const std::size_t ng = Gm.size();
  // Points (pair unit p, orbit o, coset c), shuffled.
  struct Pt {
    Arrow unit;
    std::size_t orbit, coset;
  };
  std::vector<Pt> pts;
  for (Arrow p : pair->units())
    for (std::size_t o = 0; o < orbits.size(); ++o)
      for (std::size_t c = 0; c < orbits[o].reps.size(); ++c) pts.push_back({p, o, c});
  std::shuffle(pts.begin(), pts.end(), rng);
  const std::size_t n = pts.size();
  for (std::size_t i = 0; i < n; ++i) {
    a.points.push_back("x" + std::to_string(i));
    a.anchor.push_back(arrow_at(idx(pts[i].unit) * ng));
  }
  a.act.assign(a.h->size() * n, GroupoidAction::npos);
  for (std::size_t hi = 0; hi < a.h->size(); ++hi) {
    const Arrow pa = arrow_at(hi / ng);
    const std::size_t gam = hi % ng;
    for (std::size_t x = 0; x < n; ++x) {
      if (pair->src(pa) != pts[x].unit) continue;
      const Orbit& o = orbits[pts[x].orbit];
      const std::size_t c = coset_of(o, idx(Gm.mul(arrow_at(gam), arrow_at(o.reps[pts[x].coset]))));
      for (std::size_t y = 0; y < n; ++y)
        if (pts[y].unit == pair->rng(pa) && pts[y].orbit == pts[x].orbit && pts[y].coset == c) a.act[hi * n + x] = y;
    }
  }
  return a;
}

Cocycle pullback_cocycle(const Cocycle& omega, const GroupoidMorphism& pi) {
  if (omega.base() != pi.codomain()) throw Error(Errc::BaseMismatch, "cocycle lives on another groupoid");
  const FiniteGroupoid& G = *pi.domain();
  std::vector<cplx> values(G.pair_count());
  G.for_each_pair([&](Arrow a, Arrow b, Arrow, std::size_t p) { values[p] = omega(pi(a), pi(b)); });
  return Cocycle(pi.domain(), std::move(values));
}

Cocycle bicharacter_cocycle(const GroupoidPtr& zn2, std::size_t n) {
  std::vector<cplx> values(zn2->pair_count());
  zn2->for_each_pair([&](Arrow x, Arrow y, Arrow, std::size_t p) {
    const std::size_t k = (idx(x) / n) * (idx(y) % n) % n;
    values[p] = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n));
  });
  return Cocycle(zn2, std::move(values));
}

FellBundle line_bundle(const Cocycle& omega) {
  return build_bundle(GroupoidMorphism::identity(omega.base()), omega);
}

// ---------------------------------------------------------------------------
// Abelian extraction

namespace {

Vec product_coords(const FellBundle& e, Arrow a, const Vec& x, Arrow b, const Vec& y) {
  return fiber_mul(e, {a, x}, {b, y}).coeffs;
}

// Order minimal projections by (modulus descending, conjugate phase ascending)
// coordinate by coordinate.
bool projection_less(const Vec& a, const Vec& b) {
  constexpr double eps = 1e-9;
  const double two_pi = 2.0 * std::numbers::pi;
  auto phase = [&](cplx z) {
    double t = std::arg(std::conj(z));
    if (t < 0) t += two_pi;
    return t > two_pi - eps ? 0.0 : t;
  };
  for (Eigen::Index l = 0; l < a.size(); ++l) {
    const double ma = std::abs(a[l]), mb = std::abs(b[l]);
    if (std::abs(ma - mb) > eps) return ma > mb;
    if (ma < eps) continue;
    const double pa = phase(a[l]), pb = phase(b[l]);
    if (std::abs(pa - pb) > eps) return pa < pb;
  }
  return false;
}

std::vector<Vec> minimal_projections(const FellBundle& e, Arrow u, std::mt19937_64& rng) {
  const FiniteGroupoid& H = *e.base();
  const std::size_t d = e.dim(u);
  const auto di = static_cast<Eigen::Index>(d);
  const std::size_t p = H.pair_index(u, u);
  std::vector<Mat> left(d, Mat::Zero(di, di));
  for (std::size_t l = 0; l < d; ++l)
    for (std::size_t i = 0; i < d; ++i)
      for (const auto& [k, v] : e.mul(p, l, i)) left[l](k, static_cast<Eigen::Index>(i)) += v;
  for (int attempt = 0; attempt < 5; ++attempt) {
    const FiberElement x = fiber_random(e, u, rng);
    const Vec a = x.coeffs + fiber_star(e, x).coeffs;
    Mat la = Mat::Zero(di, di);
    for (std::size_t l = 0; l < d; ++l) la += a[static_cast<Eigen::Index>(l)] * left[l];
    Eigen::ComplexEigenSolver<Mat> es(la);
    const Vec ev = es.eigenvalues();
    double scale = 1e-300, gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
      scale = std::max(scale, std::abs(ev[i]));
      for (Eigen::Index j = 0; j < i; ++j) gap = std::min(gap, std::abs(ev[i] - ev[j]));
    }
    if (d > 1 && gap < 1e-6 * scale) continue;
    std::vector<Vec> out;
    bool ok = true;
    for (Eigen::Index i = 0; i < di && ok; ++i) {
      Vec v = es.eigenvectors().col(i);
      const Vec vv = product_coords(e, u, v, u, v);
      Eigen::Index k;
      v.cwiseAbs().maxCoeff(&k);
      const cplx c = vv[k] / v[k];
      if (std::abs(c) < 1e-12) {
        ok = false;
        break;
      }
      v /= c;
      const Vec pp = product_coords(e, u, v, u, v);
      const Vec ps = fiber_star(e, {u, v}).coeffs;
      const double scale_v = std::max(1.0, v.cwiseAbs().maxCoeff());
      ok = (pp - v).cwiseAbs().maxCoeff() < 1e-8 * scale_v && (ps - v).cwiseAbs().maxCoeff() < 1e-8 * scale_v;
      out.push_back(v);
    }
    if (!ok) continue;
    std::sort(out.begin(), out.end(), projection_less);
    return out;
  }
  throw Error(Errc::NumericalDegeneracy, "could not separate minimal projections", {H.name(u)});
}

}  // namespace

AbelianExtraction abelian_extract(const FellBundle& e, std::mt19937_64& rng, std::size_t samples, double tol) {
  const FiniteGroupoid& H = *e.base();
  for (Arrow u : H.units())
    if (!e.unit_representation(u))
      throw Error(Errc::BundleNotVerified, "unit fiber has no C*-representation",
                  {H.name(u), e.unit_representation_note(u)});

  // Commutative unit fibers.
  for (Arrow u : H.units()) {
    for (std::size_t i = 0; i < e.dim(u); ++i)
      for (std::size_t j = i + 1; j < e.dim(u); ++j) {
        const FiberElement bi = fiber_basis_element(e, u, i), bj = fiber_basis_element(e, u, j);
        const Vec d = fiber_mul(e, bi, bj).coeffs - fiber_mul(e, bj, bi).coeffs;
        if (d.size() && d.cwiseAbs().maxCoeff() > tol)
          throw Error(Errc::NotAbelian, "unit fiber is not commutative", {H.name(u), e.basis(u)[i], e.basis(u)[j]});
      }
  }
  // Saturation.
  H.for_each_pair([&](Arrow a, Arrow b, Arrow ab, std::size_t p) {
    const std::size_t d1 = e.dim(a), d2 = e.dim(b), d12 = e.dim(ab);
    if (d12 == 0) return;
    Mat cols = Mat::Zero(static_cast<Eigen::Index>(d12), static_cast<Eigen::Index>(std::max<std::size_t>(1, d1 * d2)));
    for (std::size_t i = 0; i < d1; ++i)
      for (std::size_t j = 0; j < d2; ++j)
        for (const auto& [k, v] : e.mul(p, i, j)) cols(k, static_cast<Eigen::Index>(i * d2 + j)) += v;
    if (numerical_rank(cols) != d12) throw Error(Errc::NotSaturated, "products do not span", {H.name(a), H.name(b)});
  });

  AbelianExtraction out{GroupoidAction{}, ActionGroupoid{nullptr, GroupoidMorphism::identity(e.base()), {}, {}},
                        Cocycle::trivial(e.base()), {}, {}, {}};
  // X: minimal projections.
  std::vector<std::vector<std::size_t>> points_over(H.size());
  GroupoidAction& act = out.action;
  act.h = e.base();
  std::vector<std::string> short_names;
  for (Arrow u : H.units()) {
    const auto proj = minimal_projections(e, u, rng);
    for (std::size_t k = 0; k < proj.size(); ++k) {
      points_over[idx(u)].push_back(act.points.size());
      // A projection that is a basis element takes that element's name.
      Eigen::Index m;
      proj[k].cwiseAbs().maxCoeff(&m);
      Vec unit_vec = Vec::Zero(proj[k].size());
      unit_vec[m] = 1.0;
      const bool basis_like = (proj[k] - unit_vec).cwiseAbs().maxCoeff() < 1e-9;
      short_names.push_back(basis_like ? e.basis(u)[static_cast<std::size_t>(m)] : "");
      act.points.push_back(H.name(u) + "#" + std::to_string(k));
      act.anchor.push_back(u);
      out.projections.push_back(proj[k]);
    }
  }
  if (std::set<std::string>(short_names.begin(), short_names.end()).size() == short_names.size() &&
      std::none_of(short_names.begin(), short_names.end(), [](const std::string& s) { return s.empty(); }))
    act.points = short_names;
  const std::size_t n = act.points.size();

  // α_h and the corners q·E_h·p.
  act.act.assign(H.size() * n, GroupoidAction::npos);
  std::vector<Mat> corner(H.size() * n);  // corner for (h, x), columns q b_i p
  for (std::size_t hi = 0; hi < H.size(); ++hi) {
    const Arrow h = arrow_at(hi), s = H.src(h), r = H.rng(h);
    const std::size_t d = e.dim(h);
    for (std::size_t x : points_over[idx(s)]) {
      std::vector<Mat> cs;
      double scale = 0.0;
      for (std::size_t y : points_over[idx(r)]) {
        Mat c(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
        for (std::size_t i = 0; i < d; ++i) {
          const Vec qb = product_coords(e, r, out.projections[y], h, fiber_basis_element(e, h, i).coeffs);
          c.col(static_cast<Eigen::Index>(i)) = product_coords(e, h, qb, s, out.projections[x]);
        }
        scale = std::max(scale, d ? c.cwiseAbs().maxCoeff() : 0.0);
        cs.push_back(std::move(c));
      }
      std::optional<std::size_t> target;
      for (std::size_t k = 0; k < cs.size(); ++k) {
        const std::size_t y = points_over[idx(r)][k];
        if (d == 0 || cs[k].cwiseAbs().maxCoeff() <= 1e-8 * scale) continue;
        if (target)
          throw Error(Errc::LineDimensionFailure, "several corners are nonzero",
                      {H.name(h), act.points[x], act.points[*target], act.points[y]});
        const std::size_t rank = numerical_rank(cs[k]);
        if (rank != 1)
          throw Error(Errc::LineDimensionFailure, "corner is not one-dimensional",
                      {H.name(h), act.points[x], act.points[y], std::to_string(rank)});
        target = y;
        corner[hi * n + x] = cs[k];
      }
      if (!target) throw Error(Errc::LineDimensionFailure, "every corner vanishes", {H.name(h), act.points[x]});
      act.act[hi * n + x] = *target;
    }
  }
  out.groupoid = build_action_groupoid(act);
  const GroupoidPtr& gp = out.groupoid.groupoid;
  const FiniteGroupoid& G = *gp;

  // Unit vectors of the lines.
  for (const auto& [h, x] : out.groupoid.arrows) {
    if (H.is_unit(h)) {
      out.line_vectors.push_back(out.projections[x]);
      continue;
    }
    const Mat& c = corner[idx(h) * n + x];
    const double scale = c.cwiseAbs().maxCoeff();
    Vec v;
    for (Eigen::Index i = 0; i < c.cols(); ++i)
      if (c.col(i).cwiseAbs().maxCoeff() > 1e-8 * scale) {
        v = c.col(i);
        break;
      }
    v /= fiber_norm(e, {h, v});
    out.line_vectors.push_back(v);
  }

  // ω from e_{(h1, h2·x)} e_{(h2, x)} = ω e_{(h1h2, x)}.
  ResidualTracker products("products_on_lines", tol);
  std::vector<cplx> values(G.pair_count());
  G.for_each_pair([&](Arrow a, Arrow b, Arrow ab, std::size_t p) {
    const Arrow ha = out.groupoid.arrows[idx(a)].first, hb = out.groupoid.arrows[idx(b)].first;
    const Vec prod = product_coords(e, ha, out.line_vectors[idx(a)], hb, out.line_vectors[idx(b)]);
    const Vec& t = out.line_vectors[idx(ab)];
    Eigen::Index k;
    t.cwiseAbs().maxCoeff(&k);
    values[p] = prod[k] / t[k];
    products.observe((prod - values[p] * t).cwiseAbs().maxCoeff(), G.name(a) + "," + G.name(b));
  });
  out.omega = Cocycle(gp, std::move(values));

  IsoReport& rep = out.report;
  const CheckList cc = cocycle_check(out.omega, 1e-12);
  rep.checks.insert(rep.checks.end(), cc.begin(), cc.end());
  rep.checks.push_back(products.done());

  ResidualTracker star("basis_map_star", tol);
  for (std::size_t gi = 0; gi < G.size(); ++gi) {
    const Arrow g = arrow_at(gi), gv = G.inv(g);
    const Arrow h = out.groupoid.arrows[gi].first;
    const Vec lhs = fiber_star(e, {h, out.line_vectors[gi]}).coeffs;
    const Vec rhs = std::conj(out.omega(g, gv)) * out.line_vectors[idx(gv)];
    star.observe((lhs - rhs).cwiseAbs().maxCoeff(), G.name(g));
  }
  rep.checks.push_back(star.done());

  Check bijective{"basis_map_bijective", true, 0.0, {}};
  for (std::size_t hi = 0; hi < H.size() && bijective.pass; ++hi) {
    const Arrow h = arrow_at(hi);
    std::vector<std::size_t> mine;
    for (std::size_t gi = 0; gi < G.size(); ++gi)
      if (out.groupoid.arrows[gi].first == h) mine.push_back(gi);
    if (mine.size() != e.dim(h)) {
      bijective = {"basis_map_bijective", false, 1.0, H.name(h)};
      break;
    }
    if (mine.empty()) continue;
    Mat cols(static_cast<Eigen::Index>(e.dim(h)), static_cast<Eigen::Index>(mine.size()));
    for (std::size_t k = 0; k < mine.size(); ++k) cols.col(static_cast<Eigen::Index>(k)) = out.line_vectors[mine[k]];
    if (numerical_rank(cols) != e.dim(h)) bijective = {"basis_map_bijective", false, 1.0, H.name(h)};
  }
  rep.checks.push_back(bijective);

  if (!all_pass(cc)) {
    rep.checks.push_back({"basis_map_isometric", false, 1.0, "cocycle invalid"});
    rep.checks.push_back({"wedderburn_equal", false, 1.0, "cocycle invalid"});
    return out;
  }
  const ConvolutionAlgebra alg(gp, out.omega);
  const SectionAlgebra sec(e);
  ResidualTracker iso("basis_map_isometric", tol);
  for (std::size_t k = 0; k < samples; ++k) {
    const AlgebraElement f = AlgebraElement::random(gp, rng);
    Vec v = Vec::Zero(static_cast<Eigen::Index>(sec.dim()));
    for (std::size_t gi = 0; gi < G.size(); ++gi) {
      const Arrow h = out.groupoid.arrows[gi].first;
      v.segment(static_cast<Eigen::Index>(e.offset(h)), static_cast<Eigen::Index>(e.dim(h))) +=
          f[arrow_at(gi)] * out.line_vectors[gi];
    }
    const double nf = alg.norm(f);
    iso.observe(std::abs(sec.norm(v) - nf) / std::max(nf, 1e-300), "sample " + std::to_string(k));
  }
  rep.checks.push_back(iso.done());
  rep.groupoid_side = wedderburn(alg, rng);
  const auto images = sec.basis_images();
  rep.bundle_side = wedderburn(images, rng);
  Check eq{"wedderburn_equal", rep.groupoid_side.blocks == rep.bundle_side.blocks, 0.0, {}};
  if (!eq.pass) {
    eq.residual = 1.0;
    eq.witness = rep.groupoid_side.to_string() + " vs " + rep.bundle_side.to_string();
  }
  rep.checks.push_back(eq);
  return out;
}

// ---------------------------------------------------------------------------
// Group extensions

CharacterTable character_table(const FiniteGroupoid& g, const std::vector<Arrow>& elements) {
  const std::size_t k = elements.size();
  std::unordered_map<std::size_t, std::size_t> pos;
  for (std::size_t i = 0; i < k; ++i) pos[idx(elements[i])] = i;
  for (Arrow a : elements)
    for (Arrow b : elements)
      if (g.mul(a, b) != g.mul(b, a)) throw Error(Errc::NotAbelianKernel, "kernel is not abelian", {g.name(a), g.name(b)});
  const Arrow e = g.units()[0];
  auto order = [&](Arrow a) {
    std::size_t n = 1;
    for (Arrow x = a; x != e; x = g.mul(x, a)) ++n;
    return n;
  };
  CharacterTable t;
  for (Arrow a : elements) t.exponent = std::lcm(t.exponent, order(a));
  const auto m = static_cast<std::int64_t>(t.exponent);

  // Greedy generating set.
  std::vector<Arrow> gens;
  std::set<std::size_t> span{idx(e)};
  for (Arrow a : elements) {
    if (span.count(idx(a))) continue;
    gens.push_back(a);
    bool grew = true;
    while (grew) {
      grew = false;
      const std::vector<std::size_t> cur(span.begin(), span.end());
      for (auto x : cur)
        for (Arrow gen : gens) grew |= span.insert(idx(g.mul(arrow_at(x), gen))).second;
    }
  }
  // Every assignment k_i ∈ (m / ord g_i)·Z_m, propagated along the Cayley graph.
  std::vector<std::int64_t> steps;
  for (Arrow gen : gens) steps.push_back(m / static_cast<std::int64_t>(order(gen)));
  std::vector<std::size_t> choice(gens.size(), 0);
  while (true) {
    std::vector<std::int64_t> val(k, -1);
    val[pos.at(idx(e))] = 0;
    std::vector<std::size_t> queue{pos.at(idx(e))};
    bool consistent = true;
    for (std::size_t qi = 0; qi < queue.size() && consistent; ++qi) {
      const std::size_t x = queue[qi];
      for (std::size_t gi = 0; gi < gens.size(); ++gi) {
        const std::size_t y = pos.at(idx(g.mul(elements[x], gens[gi])));
        const std::int64_t v = (val[x] + static_cast<std::int64_t>(choice[gi]) * steps[gi]) % m;
        if (val[y] < 0) {
          val[y] = v;
          queue.push_back(y);
        } else if (val[y] != v) {
          consistent = false;
          break;
        }
      }
    }
    if (consistent) t.values.push_back(std::move(val));
    std::size_t i = 0;
    for (; i < gens.size(); ++i) {
      if (++choice[i] < order(gens[i])) break;
      choice[i] = 0;
    }
    if (i == gens.size()) break;
  }
  std::sort(t.values.begin(), t.values.end());
  if (t.values.size() != k)
    throw Error(Errc::NumericalDegeneracy, "character count differs from group order",
                {std::to_string(t.values.size()), std::to_string(k)});
  return t;
}

ExtensionAnalysis group_extension_bundle(const GroupExtension& ext, std::mt19937_64& rng, std::size_t samples,
                                         double tol) {
  const FiniteGroupoid& G = *ext.g;
  if (!G.is_group()) throw Error(Errc::NotNormal, "extension needs a group");
  const Arrow e = G.units()[0];
  std::vector<bool> in_a(G.size(), false);
  for (Arrow a : ext.kernel) in_a[idx(a)] = true;
  std::vector<Arrow> kernel;
  for (std::size_t i = 0; i < G.size(); ++i)
    if (in_a[i]) kernel.push_back(arrow_at(i));
  if (!in_a[idx(e)]) throw Error(Errc::NotNormal, "kernel does not contain the identity", {G.name(e)});
  for (Arrow a : kernel) {
    if (!in_a[idx(G.inv(a))]) throw Error(Errc::NotNormal, "kernel is not closed under inverses", {G.name(a)});
    for (Arrow b : kernel)
      if (!in_a[idx(G.mul(a, b))])
        throw Error(Errc::NotNormal, "kernel is not closed under products", {G.name(a), G.name(b)});
  }
  for (std::size_t gi = 0; gi < G.size(); ++gi)
    for (Arrow a : kernel) {
      const Arrow g = arrow_at(gi);
      if (!in_a[idx(G.mul(G.mul(g, a), G.inv(g)))])
        throw Error(Errc::NotNormal, "kernel is not normal", {G.name(g), G.name(a)});
    }
  std::unordered_map<std::size_t, std::size_t> apos;
  for (std::size_t i = 0; i < kernel.size(); ++i) apos[idx(kernel[i])] = i;
  const CharacterTable chars = character_table(G, kernel);

  // Cosets gA, each represented by its first element.
  std::vector<std::size_t> coset(G.size(), SIZE_MAX);
  std::vector<Arrow> section;
  for (std::size_t gi = 0; gi < G.size(); ++gi) {
    if (coset[gi] != SIZE_MAX) continue;
    for (Arrow a : kernel) coset[idx(G.mul(arrow_at(gi), a))] = section.size();
    section.push_back(arrow_at(gi));
  }
  auto quotient = catalog::group(
      section.size(), [&](std::size_t i, std::size_t j) { return coset[idx(G.mul(section[i], section[j]))]; },
      [&](std::size_t i) { return G.name(section[i]); });
  std::vector<Arrow> pmap;
  for (std::size_t gi = 0; gi < G.size(); ++gi) pmap.push_back(arrow_at(coset[gi]));
  GroupoidMorphism projection(ext.g, quotient, pmap);
  const FiniteGroupoid& H = *quotient;

  std::vector<std::size_t> factor(H.pair_count());
  H.for_each_pair([&](Arrow h1, Arrow h2, Arrow h12, std::size_t p) {
    const Arrow f = G.mul(G.mul(section[idx(h1)], section[idx(h2)]), G.inv(section[idx(h12)]));
    factor[p] = apos.at(idx(f));
  });

  // Dual action (h·χ)(a) = χ(c(h)⁻¹ a c(h)).
  const std::size_t na = kernel.size();
  GroupoidAction dual;
  dual.h = quotient;
  for (std::size_t j = 0; j < na; ++j) {
    dual.points.push_back("chi" + std::to_string(j));
    dual.anchor.push_back(H.units()[0]);
  }
  dual.act.assign(H.size() * na, GroupoidAction::npos);
  for (std::size_t hi = 0; hi < H.size(); ++hi) {
    const Arrow c = section[hi];
    for (std::size_t j = 0; j < na; ++j) {
      std::vector<std::int64_t> moved(na);
      for (std::size_t ai = 0; ai < na; ++ai)
        moved[ai] = chars.values[j][apos.at(idx(G.mul(G.mul(G.inv(c), kernel[ai]), c)))];
      const auto it = std::find(chars.values.begin(), chars.values.end(), moved);
      dual.act[hi * na + j] = static_cast<std::size_t>(it - chars.values.begin());
    }
  }
  ActionGroupoid ag = build_action_groupoid(dual);
  const FiniteGroupoid& X = *ag.groupoid;

  const auto m = static_cast<std::int64_t>(chars.exponent);
  const double step = 2.0 * std::numbers::pi / static_cast<double>(m);
  std::vector<std::int64_t> expo(X.pair_count());
  std::vector<cplx> values(X.pair_count());
  X.for_each_pair([&](Arrow a, Arrow b, Arrow ab, std::size_t p) {
    const Arrow h1 = ag.arrows[idx(a)].first;
    const auto [h2, x] = ag.arrows[idx(b)];
    const std::size_t range_char = *dual.apply(ag.arrows[idx(ab)].first, x);
    expo[p] = chars.values[range_char][factor[H.pair_index(h1, h2)]];
    values[p] = std::polar(1.0, step * static_cast<double>(expo[p]));
  });
  Cocycle omega(ag.groupoid, std::move(values));

  ExtensionAnalysis out{quotient, projection, section, kernel, chars, factor, dual, ag, expo, omega, {}};
  IsoReport& rep = out.report;
  const CheckList cc = cocycle_check(omega, 1e-12);
  rep.checks.insert(rep.checks.end(), cc.begin(), cc.end());
  if (!all_pass(cc)) return out;

  // Fourier map δ_{(h,χ)} ↦ δ_{c(h)} p_χ, p_χ = |A|⁻¹ Σ_a conj χ(a) δ_a.
  const ConvolutionAlgebra cg(ext.g);
  const ConvolutionAlgebra tw(ag.groupoid, omega);
  std::vector<AlgebraElement> phi;
  for (const auto& [h, j] : ag.arrows) {
    AlgebraElement v(ext.g);
    for (std::size_t ai = 0; ai < na; ++ai)
      v[G.mul(section[idx(h)], kernel[ai])] +=
          std::polar(1.0 / static_cast<double>(na), -step * static_cast<double>(chars.values[j][ai]));
    phi.push_back(std::move(v));
  }
  ResidualTracker mult("basis_map_multiplicative", tol), star("basis_map_star", tol);
  for (std::size_t i = 0; i < X.size(); ++i) {
    const Arrow a = arrow_at(i);
    star.observe((cg.star(phi[i]) - std::conj(omega(a, X.inv(a))) * phi[idx(X.inv(a))]).max_abs(), X.name(a));
    for (std::size_t k = 0; k < X.size(); ++k) {
      const Arrow b = arrow_at(k);
      AlgebraElement expected(ext.g);
      if (X.composable(a, b)) expected = omega(a, b) * phi[idx(X.mul(a, b))];
      mult.observe((cg.multiply(phi[i], phi[k]) - expected).max_abs(), X.name(a) + "," + X.name(b));
    }
  }
  rep.checks.push_back(mult.done());
  rep.checks.push_back(star.done());
  Mat cols(static_cast<Eigen::Index>(G.size()), static_cast<Eigen::Index>(X.size()));
  for (std::size_t i = 0; i < X.size(); ++i) cols.col(static_cast<Eigen::Index>(i)) = phi[i].coeffs();
  const bool bij = X.size() == G.size() && numerical_rank(cols) == G.size();
  rep.checks.push_back({"basis_map_bijective", bij, bij ? 0.0 : 1.0,
                        bij ? "" : std::to_string(numerical_rank(cols)) + " of " + std::to_string(G.size())});
  ResidualTracker iso("basis_map_isometric", tol);
  for (std::size_t s = 0; s < samples; ++s) {
    const AlgebraElement f = AlgebraElement::random(ag.groupoid, rng);
    AlgebraElement image(ext.g);
    for (std::size_t i = 0; i < X.size(); ++i) image += f[arrow_at(i)] * phi[i];
    const double nf = tw.norm(f);
    iso.observe(std::abs(cg.norm(image) - nf) / std::max(nf, 1e-300), "sample " + std::to_string(s));
  }
  rep.checks.push_back(iso.done());
  rep.groupoid_side = wedderburn(cg, rng);
  rep.bundle_side = wedderburn(tw, rng);
  Check eq{"wedderburn_equal", rep.groupoid_side.blocks == rep.bundle_side.blocks, 0.0, {}};
  if (!eq.pass) {
    eq.residual = 1.0;
    eq.witness = rep.groupoid_side.to_string() + " vs " + rep.bundle_side.to_string();
  }
  rep.checks.push_back(eq);
  return out;
}

}  // namespace fellgpd
