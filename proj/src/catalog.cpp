#include "fellgpd/catalog.hpp"

#include <array>

#include "fellgpd/error.hpp"

namespace fellgpd::catalog {

GroupoidPtr pair_groupoid(const std::vector<std::string>& points) {
  const std::size_t n = points.size();
  // Units first so that they carry the smallest indices.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i) pairs.emplace_back(i, i);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) pairs.emplace_back(i, j);
  std::vector<std::vector<std::uint32_t>> index(n, std::vector<std::uint32_t>(n));
  for (std::size_t k = 0; k < pairs.size(); ++k)
    index[pairs[k].first][pairs[k].second] = static_cast<std::uint32_t>(k);

  std::vector<std::string> names;
  std::vector<bool> is_unit;
  std::vector<std::uint32_t> src, rng, inv;
  for (const auto& [x, y] : pairs) {
    names.push_back(x == y ? points[x] : "(" + points[x] + "," + points[y] + ")");
    is_unit.push_back(x == y);
    src.push_back(index[y][y]);
    rng.push_back(index[x][x]);
    inv.push_back(index[y][x]);
  }
  return make_groupoid(names, is_unit, src, rng, inv, [&](std::size_t a, std::size_t b) {
    return std::optional<std::size_t>(index[pairs[a].first][pairs[b].second]);
  });
}

GroupoidPtr pair_groupoid(std::size_t n) {
  std::vector<std::string> points;
  for (std::size_t i = 1; i <= n; ++i) points.push_back(std::to_string(i));
  return pair_groupoid(points);
}

GroupoidPtr space(const std::vector<std::string>& points) {
  std::vector<std::uint32_t> self;
  for (std::size_t i = 0; i < points.size(); ++i) self.push_back(static_cast<std::uint32_t>(i));
  return make_groupoid(points, std::vector<bool>(points.size(), true), self, self, self,
                       [](std::size_t a, std::size_t) { return std::optional<std::size_t>(a); });
}

GroupoidPtr group(std::size_t order, const std::function<std::size_t(std::size_t, std::size_t)>& mul,
                  const std::function<std::string(std::size_t)>& name) {
  std::vector<std::string> names;
  std::vector<bool> is_unit(order, false);
  std::vector<std::uint32_t> zero(order, 0), inv(order, 0);
  is_unit[0] = true;
  for (std::size_t a = 0; a < order; ++a) {
    names.push_back(name(a));
    bool found = false;
    for (std::size_t b = 0; b < order && !found; ++b) {
      if (mul(a, b) == 0) {
        inv[a] = static_cast<std::uint32_t>(b);
        found = true;
      }
    }
    if (!found) throw Error(Errc::InverseFailure, "element has no inverse", {names.back()});
  }
  return make_groupoid(names, is_unit, zero, zero, inv, [&](std::size_t a, std::size_t b) {
    return std::optional<std::size_t>(mul(a, b));
  });
}

GroupoidPtr cyclic_group(std::size_t k) {
  return group(k, [k](std::size_t a, std::size_t b) { return (a + b) % k; },
               [](std::size_t a) { return std::to_string(a); });
}

GroupoidPtr z_n_squared(std::size_t n) {
  return group(
      n * n,
      [n](std::size_t x, std::size_t y) { return ((x / n + y / n) % n) * n + (x % n + y % n) % n; },
      [n](std::size_t x) { return "(" + std::to_string(x / n) + "," + std::to_string(x % n) + ")"; });
}

GroupoidPtr heisenberg_group(std::size_t n) {
  auto unpack = [n](std::size_t x) {
    return std::array<std::size_t, 3>{x / (n * n), (x / n) % n, x % n};
  };
  auto pack = [n](std::size_t a, std::size_t b, std::size_t c) { return (a % n * n + b % n) * n + c % n; };
  return group(
      n * n * n,
      [=](std::size_t x, std::size_t y) {
        const auto [a, b, c] = unpack(x);
        const auto [a2, b2, c2] = unpack(y);
        return pack(a + a2, b + b2, c + c2 + a * b2);
      },
      [=](std::size_t x) {
        const auto [a, b, c] = unpack(x);
        return "[" + std::to_string(a) + "," + std::to_string(b) + "," + std::to_string(c) + "]";
      });
}

GroupoidMorphism heisenberg_quotient(std::size_t n) {
  auto G = heisenberg_group(n);
  auto H = z_n_squared(n);
  std::vector<Arrow> map;
  for (std::size_t x = 0; x < G->size(); ++x) map.push_back(arrow_at(x / n));
  return GroupoidMorphism(G, H, std::move(map));
}

GroupoidPtr symmetric_group_3() {
  // Permutations of {0,1,2} as images of (0,1,2); identity first.
  static const std::array<std::array<std::size_t, 3>, 6> perms{{
      {0, 1, 2}, {1, 2, 0}, {2, 0, 1}, {1, 0, 2}, {0, 2, 1}, {2, 1, 0}}};
  auto find = [](const std::array<std::size_t, 3>& p) {
    for (std::size_t i = 0; i < perms.size(); ++i)
      if (perms[i] == p) return i;
    return std::size_t{0};
  };
  return group(
      6,
      [&](std::size_t a, std::size_t b) {
        // (a∘b)(i) = a(b(i))
        std::array<std::size_t, 3> p{};
        for (std::size_t i = 0; i < 3; ++i) p[i] = perms[a][perms[b][i]];
        return find(p);
      },
      [](std::size_t a) {
        std::string s = "p";
        for (std::size_t v : perms[a]) s += std::to_string(v);
        return s;
      });
}

GroupoidPtr product(const FiniteGroupoid& a, const FiniteGroupoid& b) {
  const std::size_t nb = b.size();
  const std::size_t n = a.size() * nb;
  std::vector<std::string> names;
  std::vector<bool> is_unit;
  std::vector<std::uint32_t> src, rng, inv;
  auto pack = [nb](Arrow x, Arrow y) { return static_cast<std::uint32_t>(idx(x) * nb + idx(y)); };
  for (std::size_t i = 0; i < n; ++i) {
    const Arrow x = arrow_at(i / nb), y = arrow_at(i % nb);
    names.push_back(a.name(x) + ";" + b.name(y));
    is_unit.push_back(a.is_unit(x) && b.is_unit(y));
    src.push_back(pack(a.src(x), b.src(y)));
    rng.push_back(pack(a.rng(x), b.rng(y)));
    inv.push_back(pack(a.inv(x), b.inv(y)));
  }
  return make_groupoid(names, is_unit, src, rng, inv, [&](std::size_t p, std::size_t q) {
    const Arrow x1 = arrow_at(p / nb), y1 = arrow_at(p % nb);
    const Arrow x2 = arrow_at(q / nb), y2 = arrow_at(q % nb);
    return std::optional<std::size_t>(pack(a.mul(x1, x2), b.mul(y1, y2)));
  });
}

GroupoidPtr disjoint_union(const FiniteGroupoid& a, const FiniteGroupoid& b) {
  GroupoidTables t;
  const auto shift = static_cast<std::uint32_t>(a.size());
  const GroupoidTables ta = a.tables();
  const GroupoidTables tb = b.tables();
  for (const auto& s : ta.names) t.names.push_back("L:" + s);
  for (const auto& s : tb.names) t.names.push_back("R:" + s);
  t.is_unit = ta.is_unit;
  t.is_unit.insert(t.is_unit.end(), tb.is_unit.begin(), tb.is_unit.end());
  auto append = [&](std::vector<std::uint32_t>& out, const std::vector<std::uint32_t>& x,
                    const std::vector<std::uint32_t>& y) {
    out = x;
    for (auto v : y) out.push_back(v + shift);
  };
  append(t.src, ta.src, tb.src);
  append(t.rng, ta.rng, tb.rng);
  append(t.inv, ta.inv, tb.inv);
  t.comp = ta.comp;
  for (auto [x, y, z] : tb.comp) t.comp.push_back({x + shift, y + shift, z + shift});
  return build_groupoid(std::move(t));
}

}  // namespace fellgpd::catalog
