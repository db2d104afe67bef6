#include "fellgpd/groupoid.hpp"

#include <algorithm>
#include <numeric>

#include "fellgpd/error.hpp"

namespace fellgpd {

std::optional<Arrow> FiniteGroupoid::find(std::string_view name) const {
  const auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Arrow FiniteGroupoid::at(std::string_view name) const {
  if (auto a = find(name)) return *a;
  throw Error(Errc::Parse, "undeclared arrow identifier", {std::string(name)});
}

std::optional<Arrow> FiniteGroupoid::compose(Arrow g, Arrow h) const {
  if (!composable(g, h)) return std::nullopt;
  return mul(g, h);
}

GroupoidTables FiniteGroupoid::tables() const {
  GroupoidTables t;
  t.names = names_;
  t.is_unit = is_unit_;
  for (std::size_t i = 0; i < size(); ++i) {
    t.src.push_back(static_cast<std::uint32_t>(src_[i]));
    t.rng.push_back(static_cast<std::uint32_t>(rng_[i]));
    t.inv.push_back(static_cast<std::uint32_t>(inv_[i]));
  }
  for_each_pair([&](Arrow g, Arrow h, Arrow gh, std::size_t) {
    t.comp.push_back({static_cast<std::uint32_t>(g), static_cast<std::uint32_t>(h),
                      static_cast<std::uint32_t>(gh)});
  });
  return t;
}

GroupoidPtr build_groupoid(GroupoidTables t) {
  const std::size_t n = t.names.size();
  auto nm = [&](std::size_t i) { return t.names[i]; };
  if (t.is_unit.size() != n || t.src.size() != n || t.rng.size() != n || t.inv.size() != n)
    throw Error(Errc::Parse, "groupoid tables have inconsistent lengths");
  for (std::size_t i = 0; i < n; ++i) {
    if (t.src[i] >= n || t.rng[i] >= n || t.inv[i] >= n)
      throw Error(Errc::Parse, "table entry out of range", {nm(i)});
  }

  auto G = std::make_shared<FiniteGroupoid>();
  G->names_ = t.names;
  for (std::size_t i = 0; i < n; ++i) {
    if (!G->index_.emplace(t.names[i], arrow_at(i)).second)
      throw Error(Errc::Parse, "duplicate arrow identifier", {nm(i)});
  }
  G->is_unit_ = t.is_unit;
  for (std::size_t i = 0; i < n; ++i) {
    G->src_.push_back(arrow_at(t.src[i]));
    G->rng_.push_back(arrow_at(t.rng[i]));
    G->inv_.push_back(arrow_at(t.inv[i]));
    if (t.is_unit[i]) G->units_.push_back(arrow_at(i));
  }

  // Units and endpoint maps.
  for (std::size_t i = 0; i < n; ++i) {
    if (!t.is_unit[t.src[i]] || !t.is_unit[t.rng[i]])
      throw Error(Errc::UnitFailure, "source or range is not a unit", {nm(i)});
    if (t.is_unit[i] && (t.src[i] != i || t.rng[i] != i))
      throw Error(Errc::UnitFailure, "unit with s(u) != u or r(u) != u", {nm(i)});
  }
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint32_t j = t.inv[i];
    if (t.src[j] != t.rng[i] || t.rng[j] != t.src[i])
      throw Error(Errc::InverseFailure, "inverse has wrong endpoints", {nm(i), nm(j)});
    if (t.inv[j] != i) throw Error(Errc::InverseFailure, "inv is not an involution", {nm(i), nm(j)});
  }

  G->with_source_.assign(n, {});
  G->with_range_.assign(n, {});
  G->pos_in_range_.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    G->with_source_[t.src[i]].push_back(arrow_at(i));
    G->pos_in_range_[i] = G->with_range_[t.rng[i]].size();
    G->with_range_[t.rng[i]].push_back(arrow_at(i));
  }
  G->pair_offset_.assign(n, 0);
  std::size_t total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    G->pair_offset_[i] = total;
    total += G->with_range_[t.src[i]].size();
  }

  // Composition table: defined exactly on composable pairs, with correct endpoints.
  constexpr auto kUnset = static_cast<Arrow>(0xffffffffu);
  G->products_.assign(total, kUnset);
  for (const auto& [a, b, ab] : t.comp) {
    if (a >= n || b >= n || ab >= n) throw Error(Errc::Parse, "comp entry out of range");
    if (t.src[a] != t.rng[b])
      throw Error(Errc::IllegalComposite, "comp defined on a non-composable pair", {nm(a), nm(b)});
    if (t.src[ab] != t.src[b] || t.rng[ab] != t.rng[a])
      throw Error(Errc::IllegalComposite, "composite has wrong source or range",
                  {nm(a), nm(b), nm(ab)});
    Arrow& slot = G->products_[G->pair_index(arrow_at(a), arrow_at(b))];
    if (slot != kUnset && slot != arrow_at(ab))
      throw Error(Errc::IllegalComposite, "comp lists two different composites",
                  {nm(a), nm(b), nm(ab), nm(idx(slot))});
    slot = arrow_at(ab);
  }
  for (std::size_t a = 0; a < n; ++a) {
    for (Arrow b : G->with_range_[t.src[a]]) {
      if (G->products_[G->pair_index(arrow_at(a), b)] == kUnset)
        throw Error(Errc::MissingComposite, "composable pair has no composite", {nm(a), nm(idx(b))});
    }
  }

  // Units act as identities.
  for (std::size_t i = 0; i < n; ++i) {
    const Arrow g = arrow_at(i);
    if (G->mul(G->rng(g), g) != g)
      throw Error(Errc::UnitFailure, "r(g)·g != g", {nm(i), nm(t.rng[i])});
    if (G->mul(g, G->src(g)) != g)
      throw Error(Errc::UnitFailure, "g·s(g) != g", {nm(i), nm(t.src[i])});
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Arrow g = arrow_at(i);
    if (G->mul(g, G->inv(g)) != G->rng(g))
      throw Error(Errc::InverseFailure, "g·g^-1 != r(g)", {nm(i), nm(t.inv[i])});
    if (G->mul(G->inv(g), g) != G->src(g))
      throw Error(Errc::InverseFailure, "g^-1·g != s(g)", {nm(i), nm(t.inv[i])});
  }

  // Associativity on every composable triple.
  for (std::size_t i = 0; i < n; ++i) {
    const Arrow a = arrow_at(i);
    for (Arrow b : G->with_range_[idx(G->src(a))]) {
      const Arrow ab = G->mul(a, b);
      for (Arrow c : G->with_range_[idx(G->src(b))]) {
        if (G->mul(ab, c) != G->mul(a, G->mul(b, c)))
          throw Error(Errc::AssociativityFailure, "(ab)c != a(bc)",
                      {nm(i), nm(idx(b)), nm(idx(c))});
      }
    }
  }
  return G;
}

GroupoidPtr validate_groupoid(const RawGroupoid& raw) {
  GroupoidTables t;
  t.names = raw.arrows;
  std::unordered_map<std::string, std::uint32_t> index;
  for (std::size_t i = 0; i < raw.arrows.size(); ++i) {
    if (!index.emplace(raw.arrows[i], static_cast<std::uint32_t>(i)).second)
      throw Error(Errc::Parse, "duplicate arrow identifier", {raw.arrows[i]});
  }
  auto lookup = [&](const std::string& id) {
    const auto it = index.find(id);
    if (it == index.end()) throw Error(Errc::Parse, "undeclared arrow identifier", {id});
    return it->second;
  };
  auto total_map = [&](const std::map<std::string, std::string>& m, const char* what) {
    std::vector<std::uint32_t> out(raw.arrows.size());
    for (const auto& [k, v] : m) lookup(k);
    for (std::size_t i = 0; i < raw.arrows.size(); ++i) {
      const auto it = m.find(raw.arrows[i]);
      if (it == m.end())
        throw Error(Errc::Parse, std::string(what) + " is not total", {raw.arrows[i]});
      out[i] = lookup(it->second);
    }
    return out;
  };
  t.src = total_map(raw.src, "src");
  t.rng = total_map(raw.rng, "rng");
  t.inv = total_map(raw.inv, "inv");
  t.is_unit.assign(raw.arrows.size(), false);
  for (const auto& u : raw.units) t.is_unit[lookup(u)] = true;
  for (const auto& [a, b, ab] : raw.comp) t.comp.push_back({lookup(a), lookup(b), lookup(ab)});
  return build_groupoid(std::move(t));
}

GroupoidPtr make_groupoid(std::vector<std::string> names, std::vector<bool> is_unit,
                          std::vector<std::uint32_t> src, std::vector<std::uint32_t> rng,
                          std::vector<std::uint32_t> inv, const ComposeFn& compose) {
  GroupoidTables t;
  t.names = std::move(names);
  t.is_unit = std::move(is_unit);
  t.src = std::move(src);
  t.rng = std::move(rng);
  t.inv = std::move(inv);
  const std::size_t n = t.names.size();
  std::vector<std::vector<std::uint32_t>> by_range(n);
  for (std::size_t i = 0; i < n && i < t.rng.size(); ++i) by_range[t.rng[i]].push_back(static_cast<std::uint32_t>(i));
  for (std::size_t a = 0; a < n; ++a) {
    for (std::uint32_t b : by_range[t.src[a]]) {
      if (auto ab = compose(a, b)) t.comp.push_back({static_cast<std::uint32_t>(a), b, static_cast<std::uint32_t>(*ab)});
    }
  }
  return build_groupoid(std::move(t));
}

Subgroupoid restrict_to(const FiniteGroupoid& g, std::span<const Arrow> arrows) {
  std::vector<std::optional<Arrow>> from_parent(g.size());
  std::vector<Arrow> members(arrows.begin(), arrows.end());
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  for (std::size_t i = 0; i < members.size(); ++i) from_parent[idx(members[i])] = arrow_at(i);

  auto inside = [&](Arrow a) { return from_parent[idx(a)].has_value(); };
  for (Arrow a : members) {
    if (!inside(g.src(a)) || !inside(g.rng(a)))
      throw Error(Errc::NotASubgroupoid, "missing source or range unit", {g.name(a)});
    if (!inside(g.inv(a))) throw Error(Errc::NotASubgroupoid, "not closed under inverse", {g.name(a)});
  }
  GroupoidTables t;
  for (Arrow a : members) {
    t.names.push_back(g.name(a));
    t.is_unit.push_back(g.is_unit(a));
    t.src.push_back(static_cast<std::uint32_t>(*from_parent[idx(g.src(a))]));
    t.rng.push_back(static_cast<std::uint32_t>(*from_parent[idx(g.rng(a))]));
    t.inv.push_back(static_cast<std::uint32_t>(*from_parent[idx(g.inv(a))]));
  }
  for (Arrow a : members) {
    for (Arrow b : g.with_range(g.src(a))) {
      if (!inside(b)) continue;
      const Arrow ab = g.mul(a, b);
      if (!inside(ab))
        throw Error(Errc::NotASubgroupoid, "not closed under composition", {g.name(a), g.name(b)});
      t.comp.push_back({static_cast<std::uint32_t>(*from_parent[idx(a)]),
                        static_cast<std::uint32_t>(*from_parent[idx(b)]),
                        static_cast<std::uint32_t>(*from_parent[idx(ab)])});
    }
  }
  return Subgroupoid{build_groupoid(std::move(t)), std::move(members), std::move(from_parent)};
}

std::vector<std::vector<Arrow>> unit_orbits(const FiniteGroupoid& g) {
  std::vector<std::size_t> parent(g.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto root = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < g.size(); ++i) {
    const std::size_t a = root(idx(g.src(arrow_at(i))));
    const std::size_t b = root(idx(g.rng(arrow_at(i))));
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::map<std::size_t, std::vector<Arrow>> by_root;
  for (Arrow u : g.units()) by_root[root(idx(u))].push_back(u);
  std::vector<std::vector<Arrow>> out;
  for (auto& [r, members] : by_root) out.push_back(std::move(members));
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<std::vector<std::string>> isomorphism_defect(const FiniteGroupoid& a,
                                                           const FiniteGroupoid& b,
                                                           std::span<const Arrow> map) {
  if (a.size() != b.size() || map.size() != a.size())
    return std::vector<std::string>{"size mismatch"};
  std::vector<bool> hit(b.size(), false);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Arrow x = arrow_at(i);
    const Arrow y = map[i];
    if (idx(y) >= b.size() || hit[idx(y)]) return std::vector<std::string>{a.name(x), "not injective"};
    hit[idx(y)] = true;
    if (a.is_unit(x) != b.is_unit(y)) return std::vector<std::string>{a.name(x), b.name(y)};
    if (map[idx(a.src(x))] != b.src(y) || map[idx(a.rng(x))] != b.rng(y))
      return std::vector<std::string>{a.name(x), b.name(y)};
    if (map[idx(a.inv(x))] != b.inv(y)) return std::vector<std::string>{a.name(x), b.name(y)};
  }
  std::optional<std::vector<std::string>> defect;
  a.for_each_pair([&](Arrow x, Arrow y, Arrow xy, std::size_t) {
    if (defect) return;
    if (b.mul(map[idx(x)], map[idx(y)]) != map[idx(xy)])
      defect = std::vector<std::string>{a.name(x), a.name(y)};
  });
  return defect;
}

namespace {

class IsoSearch {
 public:
  IsoSearch(const FiniteGroupoid& a, const FiniteGroupoid& b) : a_(a), b_(b) {}

  std::optional<std::vector<Arrow>> run() {
    if (a_.size() != b_.size() || a_.unit_count() != b_.unit_count()) return std::nullopt;
    map_.assign(a_.size(), std::nullopt);
    used_.assign(b_.size(), false);
    // Units first, then every other arrow.
    for (Arrow u : a_.units()) order_.push_back(u);
    for (std::size_t i = 0; i < a_.size(); ++i)
      if (!a_.is_unit(arrow_at(i))) order_.push_back(arrow_at(i));
    if (!extend(0)) return std::nullopt;
    std::vector<Arrow> out;
    for (auto& m : map_) out.push_back(*m);
    return out;
  }

 private:
  std::size_t hom_count(const FiniteGroupoid& g, Arrow x, Arrow y) const {
    std::size_t c = 0;
    for (Arrow h : g.with_source(y))
      if (g.rng(h) == x) ++c;
    return c;
  }

  bool consistent(Arrow x, Arrow y) const {
    if (a_.is_unit(x)) {
      if (!b_.is_unit(y)) return false;
      if (a_.with_source(x).size() != b_.with_source(y).size()) return false;
      for (Arrow v : a_.units()) {
        if (!map_[idx(v)]) continue;
        if (hom_count(a_, x, v) != hom_count(b_, y, *map_[idx(v)])) return false;
        if (hom_count(a_, v, x) != hom_count(b_, *map_[idx(v)], y)) return false;
      }
      return true;
    }
    if (b_.is_unit(y)) return false;
    if (*map_[idx(a_.src(x))] != b_.src(y) || *map_[idx(a_.rng(x))] != b_.rng(y)) return false;
    const auto& inv_image = map_[idx(a_.inv(x))];
    if (inv_image && *inv_image != b_.inv(y)) return false;
    if (a_.inv(x) == x && b_.inv(y) != y) return false;
    // Composites with already-mapped arrows.
    for (Arrow z : a_.with_range(a_.src(x))) {
      if (!map_[idx(z)] && z != x) continue;
      const Arrow zy = z == x ? y : *map_[idx(z)];
      const Arrow xz = a_.mul(x, z);
      const auto& img = xz == x ? std::optional<Arrow>(y) : map_[idx(xz)];
      if (img && b_.mul(y, zy) != *img) return false;
    }
    for (Arrow z : a_.with_source(a_.rng(x))) {
      if (!map_[idx(z)] && z != x) continue;
      const Arrow zy = z == x ? y : *map_[idx(z)];
      const Arrow zx = a_.mul(z, x);
      const auto& img = zx == x ? std::optional<Arrow>(y) : map_[idx(zx)];
      if (img && b_.mul(zy, y) != *img) return false;
    }
    return true;
  }

  bool extend(std::size_t depth) {
    if (depth == order_.size()) return !isomorphism_defect(a_, b_, finished()).has_value();
    const Arrow x = order_[depth];
    for (std::size_t j = 0; j < b_.size(); ++j) {
      const Arrow y = arrow_at(j);
      if (used_[j] || !consistent(x, y)) continue;
      map_[idx(x)] = y;
      used_[j] = true;
      if (extend(depth + 1)) return true;
      map_[idx(x)].reset();
      used_[j] = false;
    }
    return false;
  }

  std::vector<Arrow> finished() const {
    std::vector<Arrow> out;
    for (auto& m : map_) out.push_back(*m);
    return out;
  }

  const FiniteGroupoid& a_;
  const FiniteGroupoid& b_;
  std::vector<Arrow> order_;
  std::vector<std::optional<Arrow>> map_;
  std::vector<bool> used_;
};

}  // namespace

std::optional<std::vector<Arrow>> find_isomorphism(const FiniteGroupoid& a, const FiniteGroupoid& b) {
  return IsoSearch(a, b).run();
}

}  // namespace fellgpd
