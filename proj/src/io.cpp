#include "fellgpd/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "fellgpd/catalog.hpp"
#include "fellgpd/error.hpp"

namespace fellgpd::io {

std::string fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

void dump_to(const json& j, std::string& out, int depth) {
  const std::string pad(2 * (depth + 1), ' '), close(2 * depth, ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad + json(it.key()).dump() + ": ";
        dump_to(it.value(), out, depth + 1);
      }
      out += "\n" + close + "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      bool flat = true;
      for (const auto& v : j) flat = flat && !v.is_structured();
      out += flat ? "[" : "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += flat ? ", " : ",\n";
        if (!flat) out += pad;
        dump_to(j[i], out, depth + 1);
      }
      out += flat ? "]" : "\n" + close + "]";
      return;
    }
    case json::value_t::number_float: {
      const double v = j.get<double>();
      if (std::isnan(v)) {
        out += "\"nan\"";
      } else if (std::isinf(v)) {
        out += v > 0 ? "\"inf\"" : "\"-inf\"";
      } else {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out += buf;
      }
      return;
    }
    default:
      out += j.dump();
  }
}

std::string escape_token(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '~') out += "~0";
    else if (c == '/') out += "~1";
    else out += c;
  }
  return out;
}

}  // namespace

std::string dump(const json& j) {
  std::string out;
  dump_to(j, out, 0);
  out += "\n";
  return out;
}

json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

/// A position inside a document: the value, the file and the JSON pointer.
struct Loader::Node {
  std::shared_ptr<const json> doc;
  const json* j = nullptr;
  std::string file;
  std::string ptr;
  std::filesystem::path dir;

  [[noreturn]] void fail(const std::string& expectation) const { throw ParseError(file, ptr, expectation); }

  Node child(const std::string& key) const {
    return Node{doc, &(*j)[key], file, ptr + "/" + escape_token(key), dir};
  }
  Node item(std::size_t i) const { return Node{doc, &(*j)[i], file, ptr + "/" + std::to_string(i), dir}; }

  const json& object() const {
    if (!j->is_object()) fail("an object");
    return *j;
  }
  Node field(const std::string& key, const std::string& what) const {
    object();
    if (!j->contains(key)) fail("a member \"" + key + "\" (" + what + ")");
    return child(key);
  }
  std::size_t array_size() const {
    if (!j->is_array()) fail("an array");
    return j->size();
  }
  std::string string() const {
    if (!j->is_string()) fail("a string");
    return j->get<std::string>();
  }
  std::vector<std::string> strings() const {
    std::vector<std::string> out;
    const std::size_t n = array_size();
    for (std::size_t i = 0; i < n; ++i) out.push_back(item(i).string());
    return out;
  }
  std::vector<std::string> unique_strings(const std::string& what) const {
    auto out = strings();
    std::set<std::string> seen;
    for (std::size_t i = 0; i < out.size(); ++i)
      if (!seen.insert(out[i]).second) item(i).fail("a " + what + " not listed before");
    return out;
  }
  cplx complex() const {
    if (j->is_number()) return {j->get<double>(), 0.0};
    if (j->is_array() && j->size() == 2 && (*j)[0].is_number() && (*j)[1].is_number())
      return {(*j)[0].get<double>(), (*j)[1].get<double>()};
    fail("a complex number [re, im] or a real number");
  }
  /// Array of fixed-length tuples.
  std::vector<Node> tuples(std::size_t len, const std::string& shape) const {
    std::vector<Node> out;
    const std::size_t n = array_size();
    for (std::size_t i = 0; i < n; ++i) {
      Node t = item(i);
      if (!t.j->is_array() || t.j->size() != len) t.fail("a tuple " + shape);
      out.push_back(t);
    }
    return out;
  }
  /// Index of a name in a list, or a diagnostic naming the list.
  std::size_t lookup(const std::unordered_map<std::string, std::size_t>& pos, const std::string& what) const {
    const std::string s = string();
    auto it = pos.find(s);
    if (it == pos.end()) fail(what + " (got \"" + s + "\")");
    return it->second;
  }
  Arrow arrow(const FiniteGroupoid& g, const std::string& what) const {
    const std::string s = string();
    auto a = g.find(s);
    if (!a) fail(what + " (got \"" + s + "\")");
    return *a;
  }
};

namespace {

std::unordered_map<std::string, std::size_t> positions(const std::vector<std::string>& names) {
  std::unordered_map<std::string, std::size_t> pos;
  for (std::size_t i = 0; i < names.size(); ++i) pos.emplace(names[i], i);
  return pos;
}

}  // namespace

json Loader::read(const std::string& path) { return *open(path).doc; }

Loader::Node Loader::open(const std::string& path) {
  const std::filesystem::path p(path);
  std::error_code ec;
  const auto canon = std::filesystem::weakly_canonical(p, ec).string();
  const std::string key = ec ? path : canon;
  if (auto it = docs_.find(key); it != docs_.end())
    return Node{it->second, it->second.get(), path, "", p.parent_path()};
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ParseError(path, "", "a readable file");
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string bytes = ss.str();
  digests_[path] = fnv1a64(bytes);
  std::shared_ptr<const json> doc;
  try {
    doc = std::make_shared<const json>(json::parse(bytes));
  } catch (const json::parse_error& e) {
    throw ParseError(path, "", std::string("valid JSON (") + e.what() + ")");
  }
  docs_[key] = doc;
  return Node{doc, doc.get(), path, "", p.parent_path()};
}

GroupoidPtr Loader::groupoid(const std::string& path) {
  std::error_code ec;
  const auto canon = std::filesystem::weakly_canonical(path, ec).string();
  const std::string key = ec ? path : canon;
  if (auto it = groupoids_.find(key); it != groupoids_.end()) return it->second;
  auto g = groupoid_at(open(path));
  groupoids_[key] = g;
  return g;
}

GroupoidPtr Loader::groupoid_ref(const Node& n) {
  if (n.j->is_string()) return groupoid((n.dir / n.string()).string());
  if (n.j->is_object()) return groupoid_at(n);
  n.fail("a groupoid: a file path or an inline object");
}

GroupoidPtr Loader::groupoid_at(const Node& n) {
  RawGroupoid raw;
  const Node arrows = n.field("arrows", "arrow ids");
  raw.arrows = arrows.unique_strings("arrow id");
  const auto pos = positions(raw.arrows);
  const Node units = n.field("units", "unit ids");
  const std::size_t nu = units.array_size();
  for (std::size_t i = 0; i < nu; ++i) {
    units.item(i).lookup(pos, "an arrow id listed in /arrows");
    raw.units.push_back(units.item(i).string());
  }
  auto table = [&](const std::string& key, std::map<std::string, std::string>& out) {
    const Node t = n.field(key, "a map from arrow id to arrow id");
    t.object();
    for (const auto& name : raw.arrows) {
      if (!t.j->contains(name)) t.fail("an entry for arrow \"" + name + "\"");
      t.child(name).lookup(pos, "an arrow id listed in /arrows");
      out[name] = (*t.j)[name].get<std::string>();
    }
    for (auto it = t.j->begin(); it != t.j->end(); ++it)
      if (!pos.count(it.key())) t.child(it.key()).fail("no entry: \"" + it.key() + "\" is not an arrow id");
  };
  table("src", raw.src);
  table("rng", raw.rng);
  table("inv", raw.inv);
  for (const Node& t : n.field("comp", "composition triples").tuples(3, "[g1, g2, g1g2]")) {
    std::array<std::string, 3> c;
    for (std::size_t k = 0; k < 3; ++k) {
      t.item(k).lookup(pos, "an arrow id listed in /arrows");
      c[k] = t.item(k).string();
    }
    raw.comp.push_back(c);
  }
  return validate_groupoid(raw);
}

GroupoidMorphism Loader::morphism(const std::string& path) {
  const Node n = open(path);
  auto dom = groupoid_ref(n.field("domain", "the domain groupoid"));
  auto cod = groupoid_ref(n.field("codomain", "the codomain groupoid"));
  const Node m = n.field("map", "a map from domain arrow to codomain arrow");
  m.object();
  std::vector<Arrow> map;
  for (std::size_t i = 0; i < dom->size(); ++i) {
    const auto& name = dom->name(arrow_at(i));
    if (!m.j->contains(name)) m.fail("an image for domain arrow \"" + name + "\"");
    map.push_back(m.child(name).arrow(*cod, "a codomain arrow id"));
  }
  for (auto it = m.j->begin(); it != m.j->end(); ++it)
    if (!dom->find(it.key())) m.child(it.key()).fail("no entry: \"" + it.key() + "\" is not a domain arrow");
  return GroupoidMorphism(dom, cod, std::move(map));
}

BundleTables Loader::bundle(const std::string& path) {
  const Node n = open(path);
  BundleTables t;
  t.base = groupoid_ref(n.field("base", "the base groupoid"));
  const FiniteGroupoid& H = *t.base;
  const Node f = n.field("fibers", "basis names per base arrow");
  f.object();
  t.basis.resize(H.size());
  std::vector<std::unordered_map<std::string, std::size_t>> pos(H.size());
  for (auto it = f.j->begin(); it != f.j->end(); ++it) {
    const Node fh = f.child(it.key());
    const auto h = H.find(it.key());
    if (!h) fh.fail("no entry: \"" + it.key() + "\" is not a base arrow");
    t.basis[idx(*h)] = fh.unique_strings("basis name");
    pos[idx(*h)] = positions(t.basis[idx(*h)]);
  }
  auto basis_index = [&](const Node& k, Arrow h) -> std::uint32_t {
    const std::size_t d = t.basis[idx(h)].size();
    if (k.j->is_number_unsigned()) {
      const auto i = k.j->get<std::size_t>();
      if (i >= d) k.fail("a basis position below " + std::to_string(d) + " for arrow \"" + H.name(h) + "\"");
      return static_cast<std::uint32_t>(i);
    }
    if (!k.j->is_string()) k.fail("a basis name or position");
    return static_cast<std::uint32_t>(k.lookup(pos[idx(h)], "a basis name of the fiber over \"" + H.name(h) + "\""));
  };
  // Keys of a coefficient map are names, or positions written as strings.
  auto coeffs = [&](const Node& c, Arrow h) {
    c.object();
    SparseVec out;
    for (auto it = c.j->begin(); it != c.j->end(); ++it) {
      const Node v = c.child(it.key());
      std::uint32_t k;
      if (auto p = pos[idx(h)].find(it.key()); p != pos[idx(h)].end()) {
        k = static_cast<std::uint32_t>(p->second);
      } else {
        std::size_t used = 0;
        std::size_t i = 0;
        try {
          i = std::stoul(it.key(), &used);
        } catch (const std::exception&) {
          used = 0;
        }
        if (used != it.key().size() || used == 0 || i >= t.basis[idx(h)].size())
          v.fail("a key that names a basis element of the fiber over \"" + H.name(h) + "\"");
        k = static_cast<std::uint32_t>(i);
      }
      out.emplace_back(k, v.complex());
    }
    return out;
  };
  t.mul.resize(H.pair_count());
  H.for_each_pair([&](Arrow a, Arrow b, Arrow, std::size_t p) {
    t.mul[p].assign(t.basis[idx(a)].size() * t.basis[idx(b)].size(), SparseVec{});
  });
  if (n.j->contains("mul")) {
    for (const Node& e : n.child("mul").tuples(5, "[h1, i, h2, j, {k: c}]")) {
      const Arrow h1 = e.item(0).arrow(H, "a base arrow id");
      const Arrow h2 = e.item(2).arrow(H, "a base arrow id");
      if (!H.composable(h1, h2)) e.fail("a composable pair (s(h1) = r(h2))");
      const std::size_t i = basis_index(e.item(1), h1), j = basis_index(e.item(3), h2);
      t.mul[H.pair_index(h1, h2)][i * t.basis[idx(h2)].size() + j] = coeffs(e.item(4), H.mul(h1, h2));
    }
  }
  t.star.resize(H.size());
  for (std::size_t h = 0; h < H.size(); ++h) t.star[h].assign(t.basis[h].size(), SparseVec{});
  if (n.j->contains("star")) {
    for (const Node& e : n.child("star").tuples(3, "[h, i, {k: c}]")) {
      const Arrow h = e.item(0).arrow(H, "a base arrow id");
      const std::size_t i = basis_index(e.item(1), h);
      t.star[idx(h)][i] = coeffs(e.item(2), H.inv(h));
    }
  }
  return t;
}

DirectedGraph Loader::graph(const std::string& path) { return graph_at(open(path)); }

DirectedGraph Loader::graph_ref(const Node& n) {
  if (n.j->is_string()) return graph((n.dir / n.string()).string());
  if (n.j->is_object()) return graph_at(n);
  n.fail("a graph: a file path or an inline object");
}

DirectedGraph Loader::graph_at(const Node& n) {
  const auto vertices = n.field("vertices", "vertex names").unique_strings("vertex");
  const auto pos = positions(vertices);
  const Node edges = n.field("edges", "edge objects");
  std::vector<DirectedGraph::EdgeSpec> specs;
  std::set<std::string> ids;
  const std::size_t m = edges.array_size();
  for (std::size_t i = 0; i < m; ++i) {
    const Node e = edges.item(i);
    DirectedGraph::EdgeSpec s;
    s.id = e.field("id", "the edge id").string();
    if (!ids.insert(s.id).second) e.child("id").fail("an edge id not used before");
    e.field("from", "origin vertex").lookup(pos, "a vertex listed in /vertices");
    e.field("to", "terminal vertex").lookup(pos, "a vertex listed in /vertices");
    s.from = e.child("from").string();
    s.to = e.child("to").string();
    specs.push_back(std::move(s));
  }
  return DirectedGraph::build(vertices, specs);
}

GraphMorphism Loader::graph_morphism(const std::string& path) {
  const Node n = open(path);
  GraphMorphism phi;
  phi.domain = graph_ref(n.field("domain", "the domain graph"));
  phi.codomain = graph_ref(n.field("codomain", "the codomain graph"));
  const auto wv = positions(phi.codomain.vertices());
  std::vector<std::string> wedges;
  for (const auto& e : phi.codomain.edges()) wedges.push_back(e.id);
  const auto we = positions(wedges);
  const Node vmap = n.field("vmap", "a map from domain vertex to codomain vertex");
  vmap.object();
  for (const auto& v : phi.domain.vertices()) {
    if (!vmap.j->contains(v)) vmap.fail("an image for vertex \"" + v + "\"");
    phi.vmap.push_back(vmap.child(v).lookup(wv, "a codomain vertex"));
  }
  const Node emap = n.field("emap", "a map from domain edge to codomain edge");
  emap.object();
  for (const auto& e : phi.domain.edges()) {
    if (!emap.j->contains(e.id)) emap.fail("an image for edge \"" + e.id + "\"");
    phi.emap.push_back(emap.child(e.id).lookup(we, "a codomain edge id"));
  }
  return phi;
}

GroupExtension Loader::group(const std::string& path) {
  const Node n = open(path);
  auto elements = n.field("elements", "group element names").unique_strings("element");
  if (elements.empty()) n.child("elements").fail("at least one element");
  const auto pos = positions(elements);
  const std::size_t k = elements.size();
  std::vector<std::size_t> table(k * k, k);
  const Node mul = n.field("mul", "multiplication triples");
  for (const Node& t : mul.tuples(3, "[a, b, ab]")) {
    const std::size_t a = t.item(0).lookup(pos, "a group element");
    const std::size_t b = t.item(1).lookup(pos, "a group element");
    table[a * k + b] = t.item(2).lookup(pos, "a group element");
  }
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b)
      if (table[a * k + b] == k) mul.fail("a product for (" + elements[a] + ", " + elements[b] + ")");
  std::size_t e = k;
  for (std::size_t c = 0; c < k && e == k; ++c) {
    bool unit = true;
    for (std::size_t a = 0; a < k && unit; ++a) unit = table[c * k + a] == a && table[a * k + c] == a;
    if (unit) e = c;
  }
  if (e == k) throw Error(Errc::UnitFailure, "the multiplication table has no identity element");
  // Move the identity to position 0.
  std::vector<std::size_t> order{e}, at(k);
  for (std::size_t c = 0; c < k; ++c)
    if (c != e) order.push_back(c);
  for (std::size_t i = 0; i < k; ++i) at[order[i]] = i;
  GroupExtension ext;
  ext.g = catalog::group(
      k, [&](std::size_t a, std::size_t b) { return at[table[order[a] * k + order[b]]]; },
      [&](std::size_t a) { return elements[order[a]]; });
  const Node kern = n.field("kernel", "elements of the kernel subgroup");
  const std::size_t m = kern.array_size();
  std::set<std::size_t> seen;
  for (std::size_t i = 0; i < m; ++i) {
    const Arrow a = kern.item(i).arrow(*ext.g, "a group element");
    if (!seen.insert(idx(a)).second) kern.item(i).fail("an element not listed before");
    ext.kernel.push_back(a);
  }
  return ext;
}

GroupoidAction Loader::action(const std::string& path) {
  const Node n = open(path);
  GroupoidAction a;
  a.h = groupoid_ref(n.field("groupoid", "the acting groupoid"));
  a.points = n.field("X", "point names").unique_strings("point");
  const auto pos = positions(a.points);
  const Node rho = n.field("rho", "a map from point to unit");
  rho.object();
  for (const auto& x : a.points) {
    if (!rho.j->contains(x)) rho.fail("an anchor for point \"" + x + "\"");
    a.anchor.push_back(rho.child(x).arrow(*a.h, "a unit of the acting groupoid"));
  }
  a.act.assign(a.h->size() * a.size(), GroupoidAction::npos);
  for (const Node& t : n.field("act", "action triples").tuples(3, "[h, x, hx]")) {
    const Arrow h = t.item(0).arrow(*a.h, "an arrow of the acting groupoid");
    const std::size_t x = t.item(1).lookup(pos, "a point listed in /X");
    a.act[idx(h) * a.size() + x] = t.item(2).lookup(pos, "a point listed in /X");
  }
  return a;
}

Cocycle Loader::cocycle(const std::string& path, const GroupoidPtr& base) {
  const Node n = open(path);
  const Node gref = n.field("groupoid", "the base groupoid");
  GroupoidPtr g = groupoid_ref(gref);
  if (base && g != base) {
    if (g->names() != base->names()) gref.fail("the groupoid the cocycle is used with (same arrow ids, same order)");
    g = base;
  }
  std::vector<cplx> values(g->pair_count(), cplx(1.0));
  for (const Node& t : n.field("omega", "cocycle values").tuples(3, "[g1, g2, c]")) {
    const Arrow a = t.item(0).arrow(*g, "an arrow id");
    const Arrow b = t.item(1).arrow(*g, "an arrow id");
    if (!g->composable(a, b)) t.fail("a composable pair (s(g1) = r(g2))");
    values[g->pair_index(a, b)] = t.item(2).complex();
  }
  return Cocycle(g, std::move(values));
}

json to_json(const FiniteGroupoid& g) {
  json j;
  j["arrows"] = g.names();
  json units = json::array();
  for (Arrow u : g.units()) units.push_back(g.name(u));
  j["units"] = units;
  json src = json::object(), rng = json::object(), inv = json::object();
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Arrow a = arrow_at(i);
    src[g.name(a)] = g.name(g.src(a));
    rng[g.name(a)] = g.name(g.rng(a));
    inv[g.name(a)] = g.name(g.inv(a));
  }
  j["src"] = src;
  j["rng"] = rng;
  j["inv"] = inv;
  json comp = json::array();
  g.for_each_pair([&](Arrow a, Arrow b, Arrow ab, std::size_t) {
    comp.push_back(json::array({g.name(a), g.name(b), g.name(ab)}));
  });
  j["comp"] = comp;
  return j;
}

json to_json(const GroupoidMorphism& pi) {
  json map = json::object();
  for (std::size_t i = 0; i < pi.domain()->size(); ++i)
    map[pi.domain()->name(arrow_at(i))] = pi.codomain()->name(pi(arrow_at(i)));
  return {{"domain", to_json(*pi.domain())}, {"codomain", to_json(*pi.codomain())}, {"map", map}};
}

namespace {

json coeff_map(const FellBundle& e, Arrow h, const SparseVec& v) {
  json out = json::object();
  for (const auto& [k, c] : v)
    if (c != cplx(0.0)) out[e.basis(h)[k]] = complex_to_json(c);
  return out;
}

}  // namespace

json to_json(const FellBundle& e) {
  const FiniteGroupoid& H = *e.base();
  json fibers = json::object();
  for (std::size_t h = 0; h < H.size(); ++h) fibers[H.name(arrow_at(h))] = e.basis(arrow_at(h));
  json mul = json::array(), star = json::array();
  H.for_each_pair([&](Arrow a, Arrow b, Arrow ab, std::size_t p) {
    for (std::size_t i = 0; i < e.dim(a); ++i)
      for (std::size_t j = 0; j < e.dim(b); ++j) {
        const auto& v = e.mul(p, i, j);
        if (v.empty()) continue;
        json c = coeff_map(e, ab, v);
        if (c.empty()) continue;
        mul.push_back(json::array({H.name(a), e.basis(a)[i], H.name(b), e.basis(b)[j], c}));
      }
  });
  for (std::size_t h = 0; h < H.size(); ++h) {
    const Arrow a = arrow_at(h);
    for (std::size_t i = 0; i < e.dim(a); ++i)
      star.push_back(json::array({H.name(a), e.basis(a)[i], coeff_map(e, H.inv(a), e.star(a, i))}));
  }
  return {{"base", to_json(H)}, {"fibers", fibers}, {"mul", mul}, {"star", star}};
}

json to_json(const DirectedGraph& g) {
  json edges = json::array();
  for (const auto& e : g.edges())
    edges.push_back({{"id", e.id}, {"from", g.vertex(e.from)}, {"to", g.vertex(e.to)}});
  return {{"vertices", g.vertices()}, {"edges", edges}};
}

json to_json(const GraphMorphism& phi) {
  json vmap = json::object(), emap = json::object();
  for (std::size_t v = 0; v < phi.domain.vertex_count(); ++v)
    vmap[phi.domain.vertex(v)] = phi.codomain.vertex(phi.vmap[v]);
  for (std::size_t e = 0; e < phi.domain.edge_count(); ++e)
    emap[phi.domain.edge(e).id] = phi.codomain.edge(phi.emap[e]).id;
  return {{"domain", to_json(phi.domain)}, {"codomain", to_json(phi.codomain)}, {"vmap", vmap}, {"emap", emap}};
}

json to_json(const GroupoidAction& a) {
  const FiniteGroupoid& H = *a.h;
  json rho = json::object(), act = json::array();
  for (std::size_t x = 0; x < a.size(); ++x) rho[a.points[x]] = H.name(a.anchor[x]);
  for (std::size_t h = 0; h < H.size(); ++h)
    for (std::size_t x = 0; x < a.size(); ++x)
      if (auto y = a.apply(arrow_at(h), x))
        act.push_back(json::array({H.name(arrow_at(h)), a.points[x], a.points[*y]}));
  return {{"groupoid", to_json(H)}, {"X", a.points}, {"rho", rho}, {"act", act}};
}

json to_json(const Cocycle& omega) {
  const FiniteGroupoid& G = *omega.base();
  json values = json::array();
  G.for_each_pair([&](Arrow a, Arrow b, Arrow, std::size_t p) {
    values.push_back(json::array({G.name(a), G.name(b), complex_to_json(omega.values()[p])}));
  });
  return {{"groupoid", to_json(G)}, {"omega", values}};
}

json to_json(const GroupExtension& ext) {
  const FiniteGroupoid& G = *ext.g;
  json mul = json::array(), kernel = json::array();
  G.for_each_pair([&](Arrow a, Arrow b, Arrow ab, std::size_t) {
    mul.push_back(json::array({G.name(a), G.name(b), G.name(ab)}));
  });
  for (Arrow a : ext.kernel) kernel.push_back(G.name(a));
  return {{"elements", G.names()}, {"mul", mul}, {"kernel", kernel}};
}

}  // namespace fellgpd::io
