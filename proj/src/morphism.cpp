#include "fellgpd/morphism.hpp"

#include <algorithm>
#include <set>

#include "fellgpd/error.hpp"

namespace fellgpd {

GroupoidMorphism::GroupoidMorphism(GroupoidPtr domain, GroupoidPtr codomain, std::vector<Arrow> map)
    : domain_(std::move(domain)), codomain_(std::move(codomain)), map_(std::move(map)) {
  if (map_.size() != domain_->size())
    throw Error(Errc::NotAMorphism, "arrow map is not total on the domain");
  for (Arrow a : map_) {
    if (idx(a) >= codomain_->size()) throw Error(Errc::NotAMorphism, "arrow map leaves the codomain");
  }
}

std::vector<Arrow> GroupoidMorphism::preimage(Arrow h) const {
  std::vector<Arrow> out;
  for (std::size_t i = 0; i < map_.size(); ++i)
    if (map_[i] == h) out.push_back(arrow_at(i));
  return out;
}

GroupoidMorphism GroupoidMorphism::identity(GroupoidPtr g) {
  std::vector<Arrow> map;
  for (std::size_t i = 0; i < g->size(); ++i) map.push_back(arrow_at(i));
  return GroupoidMorphism(g, g, std::move(map));
}

std::optional<std::vector<std::string>> morphism_defect(const GroupoidMorphism& pi) {
  const FiniteGroupoid& G = *pi.domain();
  const FiniteGroupoid& H = *pi.codomain();
  for (std::size_t i = 0; i < G.size(); ++i) {
    const Arrow g = arrow_at(i);
    if (pi(G.src(g)) != H.src(pi(g)) || pi(G.rng(g)) != H.rng(pi(g)))
      return std::vector<std::string>{G.name(g), "does not intertwine s and r"};
    if (G.is_unit(g) && !H.is_unit(pi(g)))
      return std::vector<std::string>{G.name(g), "unit not mapped to a unit"};
  }
  std::optional<std::vector<std::string>> defect;
  G.for_each_pair([&](Arrow a, Arrow b, Arrow ab, std::size_t) {
    if (defect) return;
    if (H.mul(pi(a), pi(b)) != pi(ab)) defect = std::vector<std::string>{G.name(a), G.name(b)};
  });
  return defect;
}

MorphismClassification classify_morphism(const GroupoidMorphism& pi) {
  if (auto w = morphism_defect(pi)) throw Error(Errc::NotAMorphism, "π is not a groupoid morphism", *w);
  const FiniteGroupoid& G = *pi.domain();
  const FiniteGroupoid& H = *pi.codomain();

  MorphismClassification c;
  c.is_morphism = true;
  std::vector<bool> hit(H.size(), false);
  for (Arrow a : pi.map()) hit[idx(a)] = true;
  c.surjective = std::all_of(hit.begin(), hit.end(), [](bool b) { return b; });
  c.surjective_on_units = std::all_of(H.units().begin(), H.units().end(), [&](Arrow u) { return hit[idx(u)]; });
  if (!c.surjective) {
    for (std::size_t i = 0; i < H.size(); ++i)
      if (!hit[i]) {
        c.witness = {H.name(arrow_at(i)), "not in the image"};
        break;
      }
  }

  // Lifting: for h in H and x in G⁰ with π(x) = s(h), count g with s(g) = x, π(g) = h.
  c.fibration = true;
  c.covering = true;
  std::vector<std::string> covering_witness;
  for (Arrow x : G.units()) {
    std::vector<std::size_t> lifts(H.size(), 0);
    for (Arrow g : G.with_source(x)) ++lifts[idx(pi(g))];
    for (Arrow h : H.with_source(pi(x))) {
      const std::size_t n = lifts[idx(h)];
      if (n == 0 && c.fibration) {
        c.fibration = false;
        c.covering = false;
        if (c.surjective) c.witness = {H.name(h), G.name(x), "no lift"};
      } else if (n > 1 && c.covering) {
        c.covering = false;
        covering_witness = {H.name(h), G.name(x), std::to_string(n) + " lifts"};
      }
    }
  }
  if (c.fibration && !c.covering && c.witness.empty()) c.witness = covering_witness;
  return c;
}

KernelDecomposition kernel(const GroupoidMorphism& pi) {
  const auto cls = classify_morphism(pi);
  if (!cls.surjective) throw Error(Errc::NotSurjective, "kernel requires a surjective morphism", cls.witness);
  const FiniteGroupoid& G = *pi.domain();
  const FiniteGroupoid& H = *pi.codomain();
  std::vector<Arrow> k;
  for (std::size_t i = 0; i < G.size(); ++i)
    if (H.is_unit(pi(arrow_at(i)))) k.push_back(arrow_at(i));
  KernelDecomposition out{restrict_to(G, k), {}, true};
  for (Arrow x : H.units()) out.fibers.push_back({x, restrict_to(G, pi.preimage(x))});
  return out;
}

IsotropyQuotient isotropy_quotient(const GroupoidPtr& gp) {
  const FiniteGroupoid& G = *gp;
  // Arrows of R: pairs (x, y) of units in one orbit, i.e. some g with r(g)=x, s(g)=y.
  std::vector<std::pair<Arrow, Arrow>> pairs;
  std::map<std::pair<Arrow, Arrow>, std::uint32_t> index;
  for (const auto& orbit : unit_orbits(G)) {
    for (Arrow x : orbit)
      for (Arrow y : orbit) {
        index[{x, y}] = static_cast<std::uint32_t>(pairs.size());
        pairs.emplace_back(x, y);
      }
  }
  std::vector<std::string> names;
  std::vector<bool> is_unit;
  std::vector<std::uint32_t> src, rng, inv;
  for (const auto& [x, y] : pairs) {
    names.push_back(x == y ? G.name(x) : "(" + G.name(x) + "," + G.name(y) + ")");
    is_unit.push_back(x == y);
    src.push_back(index.at({y, y}));
    rng.push_back(index.at({x, x}));
    inv.push_back(index.at({y, x}));
  }
  auto R = make_groupoid(names, is_unit, src, rng, inv, [&](std::size_t a, std::size_t b) {
    return std::optional<std::size_t>(index.at({pairs[a].first, pairs[b].second}));
  });
  std::vector<Arrow> map;
  for (std::size_t i = 0; i < G.size(); ++i) {
    const Arrow g = arrow_at(i);
    map.push_back(arrow_at(index.at({G.rng(g), G.src(g)})));
  }
  return {R, GroupoidMorphism(gp, R, std::move(map))};
}

Bisection check_bisection(const FiniteGroupoid& g, std::span<const Arrow> subset) {
  std::map<Arrow, Arrow> by_src, by_rng;
  Bisection b;
  for (Arrow a : subset) {
    if (idx(a) >= g.size()) throw Error(Errc::NotABisection, "arrow out of range");
    if (std::find(b.arrows_.begin(), b.arrows_.end(), a) != b.arrows_.end()) continue;
    if (auto [it, fresh] = by_src.emplace(g.src(a), a); !fresh)
      throw Error(Errc::NotABisection, "source map not injective", {g.name(it->second), g.name(a)});
    if (auto [it, fresh] = by_rng.emplace(g.rng(a), a); !fresh)
      throw Error(Errc::NotABisection, "range map not injective", {g.name(it->second), g.name(a)});
    b.arrows_.push_back(a);
  }
  std::sort(b.arrows_.begin(), b.arrows_.end());
  return b;
}

std::vector<Bisection> greedy_bisection_cover(const FiniteGroupoid& g) {
  std::vector<bool> covered(g.size(), false);
  std::vector<Bisection> cover;
  for (;;) {
    std::vector<bool> src_used(g.size(), false), rng_used(g.size(), false);
    std::vector<Arrow> pick;
    auto take = [&](std::size_t i) {
      const Arrow a = arrow_at(i);
      if (src_used[idx(g.src(a))] || rng_used[idx(g.rng(a))]) return;
      src_used[idx(g.src(a))] = rng_used[idx(g.rng(a))] = true;
      pick.push_back(a);
    };
    for (std::size_t i = 0; i < g.size(); ++i)
      if (!covered[i]) take(i);
    if (pick.empty()) break;
    for (std::size_t i = 0; i < g.size(); ++i)
      if (covered[i]) take(i);
    for (Arrow a : pick) covered[idx(a)] = true;
    cover.push_back(check_bisection(g, pick));
  }
  return cover;
}

}  // namespace fellgpd
