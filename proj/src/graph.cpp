#include "fellgpd/graph.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <unordered_map>

#include "fellgpd/error.hpp"
#include "fellgpd/star_algebra.hpp"

namespace fellgpd {

// ---------------------------------------------------------------------------
// Graphs and paths

DirectedGraph DirectedGraph::build(std::vector<std::string> vertices, const std::vector<EdgeSpec>& edges) {
  DirectedGraph g;
  g.vertices_ = std::move(vertices);
  std::set<std::string> seen;
  for (const auto& v : g.vertices_)
    if (!seen.insert(v).second) throw Error(Errc::Parse, "duplicate vertex", {v});
  g.out_.resize(g.vertices_.size());
  std::set<std::string> ids;
  for (const auto& e : edges) {
    if (!ids.insert(e.id).second) throw Error(Errc::Parse, "duplicate edge id", {e.id});
    const auto from = g.find_vertex(e.from), to = g.find_vertex(e.to);
    if (!from || !to) throw Error(Errc::Parse, "edge endpoint is not a vertex", {e.id, from ? e.to : e.from});
    if (e.id.size() != 1) g.single_letter_ = false;
    g.out_[*from].push_back(g.edges_.size());
    g.edges_.push_back({e.id, *from, *to});
  }
  return g;
}

std::optional<std::size_t> DirectedGraph::find_vertex(std::string_view name) const {
  for (std::size_t i = 0; i < vertices_.size(); ++i)
    if (vertices_[i] == name) return i;
  return std::nullopt;
}

std::optional<std::size_t> DirectedGraph::find_edge(std::string_view id) const {
  for (std::size_t i = 0; i < edges_.size(); ++i)
    if (edges_[i].id == id) return i;
  return std::nullopt;
}

std::vector<std::size_t> DirectedGraph::sinks() const {
  std::vector<std::size_t> out;
  for (std::size_t v = 0; v < vertices_.size(); ++v)
    if (out_[v].empty()) out.push_back(v);
  return out;
}

std::size_t terminus(const DirectedGraph& g, const GraphPath& p) {
  return p.edges.empty() ? p.origin : g.edge(p.edges.back()).to;
}

std::string path_name(const DirectedGraph& g, const GraphPath& p) {
  if (p.edges.empty()) return "[" + g.vertex(p.origin) + "]";
  std::string out;
  for (std::size_t i = 0; i < p.edges.size(); ++i) {
    if (i && !g.single_letter_ids()) out += '.';
    out += g.edge(p.edges[i]).id;
  }
  return out;
}

std::vector<GraphPath> paths_of_length(const DirectedGraph& g, std::size_t n) {
  std::vector<GraphPath> cur;
  for (std::size_t v = 0; v < g.vertex_count(); ++v) cur.push_back({v, {}});
  for (std::size_t step = 0; step < n; ++step) {
    std::vector<GraphPath> next;
    for (const auto& p : cur)
      for (std::size_t e : g.out_edges(terminus(g, p))) {
        GraphPath q = p;
        q.edges.push_back(e);
        next.push_back(std::move(q));
      }
    cur = std::move(next);
  }
  return cur;
}

GraphPath GraphMorphism::operator()(const GraphPath& p) const {
  GraphPath out{vmap[p.origin], {}};
  for (std::size_t e : p.edges) out.edges.push_back(emap[e]);
  return out;
}

// ---------------------------------------------------------------------------
// Morphism check

CheckList GraphMorphismReport::checks() const {
  const std::string w = witness.empty() ? "" : [&] {
    std::string s;
    for (const auto& x : witness) s += (s.empty() ? "" : ",") + x;
    return s;
  }();
  CheckList out;
  bool first_failure = true;
  for (const auto& [name, flag] : std::vector<std::pair<std::string, bool>>{{"incidence", incidence},
                                                                            {"vertex_surjective", vertex_surjective},
                                                                            {"edge_surjective", edge_surjective},
                                                                            {"path_lifting", path_lifting},
                                                                            {"domain_no_sinks", domain_no_sinks},
                                                                            {"codomain_no_sinks", codomain_no_sinks}}) {
    Check c{name, flag, flag ? 0.0 : 1.0, {}};
    if (!flag && first_failure) {
      c.witness = w;
      first_failure = false;
    }
    out.push_back(c);
  }
  return out;
}

GraphMorphismReport check_graph_morphism(const GraphMorphism& phi) {
  const DirectedGraph& V = phi.domain;
  const DirectedGraph& W = phi.codomain;
  if (phi.vmap.size() != V.vertex_count() || phi.emap.size() != V.edge_count())
    throw Error(Errc::Parse, "graph morphism does not map every vertex and edge");
  GraphMorphismReport r;
  for (std::size_t e = 0; e < V.edge_count(); ++e) {
    const GraphEdge& a = V.edge(e);
    const GraphEdge& b = W.edge(phi.emap[e]);
    if (b.from != phi.vmap[a.from] || b.to != phi.vmap[a.to])
      throw Error(Errc::IncidenceViolation, "edge map does not preserve incidence", {a.id, b.id});
  }
  r.incidence = true;
  auto note = [&](std::vector<std::string> w) {
    if (r.witness.empty()) r.witness = std::move(w);
  };

  std::vector<bool> hit(W.vertex_count(), false);
  for (auto v : phi.vmap) hit[v] = true;
  r.vertex_surjective = true;
  for (std::size_t v = 0; v < hit.size(); ++v)
    if (!hit[v]) {
      r.vertex_surjective = false;
      note({W.vertex(v), "no preimage"});
      break;
    }
  std::vector<bool> ehit(W.edge_count(), false);
  for (auto e : phi.emap) ehit[e] = true;
  r.edge_surjective = true;
  for (std::size_t e = 0; e < ehit.size(); ++e)
    if (!ehit[e]) {
      r.edge_surjective = false;
      note({W.edge(e).id, "no preimage"});
      break;
    }

  r.path_lifting = true;
  for (std::size_t v = 0; v < V.vertex_count() && r.path_lifting; ++v)
    for (std::size_t b : W.out_edges(phi.vmap[v])) {
      bool found = false;
      for (std::size_t a : V.out_edges(v)) found |= phi.emap[a] == b;
      if (!found) {
        r.path_lifting = false;
        note({V.vertex(v), W.edge(b).id, "no lift"});
        break;
      }
    }
  const auto vs = V.sinks(), ws = W.sinks();
  r.domain_no_sinks = vs.empty();
  if (!vs.empty()) note({V.vertex(vs.front()), "sink"});
  r.codomain_no_sinks = ws.empty();
  if (!ws.empty()) note({W.vertex(ws.front()), "sink"});
  return r;
}

// ---------------------------------------------------------------------------
// Words and lifts

std::vector<std::size_t> parse_word(const DirectedGraph& w, std::string_view text) {
  std::vector<std::string> letters;
  if (text.find(',') != std::string_view::npos) {
    std::size_t start = 0;
    while (true) {
      const auto end = text.find(',', start);
      letters.emplace_back(text.substr(start, end - start));
      if (end == std::string_view::npos) break;
      start = end + 1;
    }
  } else if (w.single_letter_ids()) {
    for (char c : text) letters.emplace_back(1, c);
  } else if (!text.empty()) {
    letters.emplace_back(text);
  }
  std::vector<std::size_t> word;
  for (std::size_t i = 0; i < letters.size(); ++i) {
    const auto e = w.find_edge(letters[i]);
    if (!e) throw Error(Errc::InadmissibleWord, "unknown letter", {std::to_string(i), letters[i]});
    if (!word.empty() && w.edge(word.back()).to != w.edge(*e).from)
      throw Error(Errc::InadmissibleWord, "consecutive letters do not meet", {std::to_string(i), letters[i]});
    word.push_back(*e);
  }
  return word;
}

std::string word_name(const DirectedGraph& w, const std::vector<std::size_t>& word) {
  if (word.empty()) return "";
  return path_name(w, GraphPath{w.edge(word.front()).from, word});
}

namespace {

// Lifts of the prefix of length k, extended one letter at a time.
std::vector<GraphPath> extend(const GraphMorphism& phi, const std::vector<GraphPath>& cur, std::size_t letter) {
  std::vector<GraphPath> next;
  for (const auto& p : cur)
    for (std::size_t a : phi.domain.out_edges(terminus(phi.domain, p)))
      if (phi.emap[a] == letter) {
        GraphPath q = p;
        q.edges.push_back(a);
        next.push_back(std::move(q));
      }
  return next;
}

std::vector<GraphPath> lift_starts(const GraphMorphism& phi, const std::vector<std::size_t>& word) {
  std::vector<GraphPath> cur;
  for (std::size_t v = 0; v < phi.domain.vertex_count(); ++v)
    if (word.empty() || phi.vmap[v] == phi.codomain.edge(word.front()).from) cur.push_back({v, {}});
  return cur;
}

}  // namespace

LiftSet lift_paths(const GraphMorphism& phi, const std::vector<std::size_t>& word) {
  LiftSet out;
  out.word = word;
  std::vector<GraphPath> cur = lift_starts(phi, word);
  for (std::size_t k = 0; k < word.size(); ++k) {
    cur = extend(phi, cur, word[k]);
    if (cur.empty()) {
      const std::vector<std::size_t> prefix(word.begin(), word.begin() + static_cast<std::ptrdiff_t>(k + 1));
      throw Error(Errc::NotLiftable, "word has no lift", {word_name(phi.codomain, prefix)});
    }
  }
  if (cur.empty()) throw Error(Errc::NotLiftable, "word has no lift", {""});
  out.paths = std::move(cur);
  std::map<std::size_t, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < out.paths.size(); ++i) groups[terminus(phi.domain, out.paths[i])].push_back(i);
  out.by_terminal.assign(groups.begin(), groups.end());
  return out;
}

CylinderReport cylinder_check(const GraphMorphism& phi, std::size_t depth) {
  CylinderReport r;
  r.depth = depth;
  Check lifted{"every_word_lifts", true, 0.0, {}};
  Check extends{"lifts_extend", true, 0.0, {}};
  const DirectedGraph& W = phi.codomain;
  for (const GraphPath& w : paths_of_length(W, depth)) {
    if (depth == 0 && w.origin != 0) continue;  // the empty word once
    ++r.words;
    std::vector<GraphPath> cur = depth ? lift_starts(phi, w.edges) : lift_starts(phi, {});
    if (depth) {
      // Only starts over the word's origin.
      std::erase_if(cur, [&](const GraphPath& p) { return phi.vmap[p.origin] != w.origin; });
    }
    for (std::size_t k = 0; k < depth; ++k) {
      std::vector<GraphPath> next = extend(phi, cur, w.edges[k]);
      // Every lift of the prefix must have at least one extension.
      for (const GraphPath& p : cur) {
        bool any = false;
        for (std::size_t a : phi.domain.out_edges(terminus(phi.domain, p))) any |= phi.emap[a] == w.edges[k];
        if (!any && extends.pass) {
          extends.pass = false;
          extends.residual = 1.0;
          extends.witness = path_name(phi.domain, p) + " over " +
                            word_name(W, std::vector<std::size_t>(w.edges.begin(), w.edges.begin() + k + 1));
        }
      }
      cur = std::move(next);
    }
    if (cur.empty() && lifted.pass) {
      lifted.pass = false;
      lifted.residual = 1.0;
      lifted.witness = depth ? word_name(W, w.edges) : "[]";
    }
    r.lifts += cur.size();
  }
  r.checks = {lifted, extends};
  return r;
}

// ---------------------------------------------------------------------------
// Path-pair groupoids

GroupoidPtr path_pair_groupoid(const DirectedGraph& g, const std::vector<GraphPath>& paths) {
  const std::size_t m = paths.size();
  std::vector<std::size_t> term(m);
  for (std::size_t i = 0; i < m; ++i) term[i] = terminus(g, paths[i]);
  // Arrow numbering: units first, then (p, q) with p ≠ q in row-major order.
  std::vector<std::uint32_t> id(m * m, UINT32_MAX);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < m; ++i) {
    id[i * m + i] = static_cast<std::uint32_t>(pairs.size());
    pairs.emplace_back(i, i);
  }
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (i != j && term[i] == term[j]) {
        id[i * m + j] = static_cast<std::uint32_t>(pairs.size());
        pairs.emplace_back(i, j);
      }
  std::vector<std::string> pname(m);
  for (std::size_t i = 0; i < m; ++i) pname[i] = path_name(g, paths[i]);
  std::vector<std::string> names;
  std::vector<bool> is_unit;
  std::vector<std::uint32_t> src, rng, inv;
  for (const auto& [i, j] : pairs) {
    names.push_back(i == j ? pname[i] : "(" + pname[i] + "," + pname[j] + ")");
    is_unit.push_back(i == j);
    src.push_back(id[j * m + j]);
    rng.push_back(id[i * m + i]);
    inv.push_back(id[j * m + i]);
  }
  return make_groupoid(std::move(names), std::move(is_unit), std::move(src), std::move(rng), std::move(inv),
                       [&](std::size_t a, std::size_t b) -> std::optional<std::size_t> {
                         return id[pairs[a].first * m + pairs[b].second];
                       });
}

KernelFiberGroupoid kernel_fiber_groupoid(const GraphMorphism& phi, const std::vector<std::size_t>& word,
                                          std::mt19937_64& rng) {
  KernelFiberGroupoid out;
  out.lifts = lift_paths(phi, word);
  out.groupoid = path_pair_groupoid(phi.domain, out.lifts.paths);
  out.invariants = wedderburn(ConvolutionAlgebra(out.groupoid), rng);
  for (const auto& [v, members] : out.lifts.by_terminal) out.terminal_sizes.push_back(members.size());
  std::sort(out.terminal_sizes.rbegin(), out.terminal_sizes.rend());
  return out;
}

GroupoidMorphism window_morphism(const GraphMorphism& phi, std::size_t n) {
  const auto vp = paths_of_length(phi.domain, n);
  const auto wp = paths_of_length(phi.codomain, n);
  auto g = path_pair_groupoid(phi.domain, vp);
  auto h = path_pair_groupoid(phi.codomain, wp);
  auto image = [&](const GraphPath& p) { return path_name(phi.codomain, phi(p)); };
  std::unordered_map<std::string, std::string> by_name;
  for (const auto& p : vp) by_name[path_name(phi.domain, p)] = image(p);
  std::vector<Arrow> map;
  map.reserve(g->size());
  for (std::size_t a = 0; a < g->size(); ++a) {
    const Arrow x = arrow_at(a);
    const std::string& p = by_name.at(g->name(g->rng(x)));
    const std::string& q = by_name.at(g->name(g->src(x)));
    map.push_back(h->at(p == q ? p : "(" + p + "," + q + ")"));
  }
  return GroupoidMorphism(g, h, std::move(map));
}

// ---------------------------------------------------------------------------
// Collapse grading

DirectedGraph loop_graph() { return DirectedGraph::build({"o"}, {{"z", "o", "o"}}); }

GraphMorphism collapse_morphism(const DirectedGraph& v) {
  GraphMorphism phi{v, loop_graph(), std::vector<std::size_t>(v.vertex_count(), 0),
                    std::vector<std::size_t>(v.edge_count(), 0)};
  return phi;
}

GradingReport grading_degree(const GraphMorphism& phi, std::size_t depth, std::mt19937_64& rng) {
  if (phi.codomain.vertex_count() != 1 || phi.codomain.edge_count() != 1)
    throw Error(Errc::DomainNotCollapse, "codomain is not the one-loop graph",
                {std::to_string(phi.codomain.vertex_count()) + " vertices",
                 std::to_string(phi.codomain.edge_count()) + " edges"});
  const DirectedGraph& V = phi.domain;
  std::vector<GraphPath> paths;
  for (std::size_t n = 0; n <= depth; ++n)
    for (auto& p : paths_of_length(V, n)) paths.push_back(std::move(p));
  std::unordered_map<std::string, std::size_t> length;
  for (const auto& p : paths) length[path_name(V, p)] = p.edges.size();

  GradingReport r;
  r.window = path_pair_groupoid(V, paths);
  const FiniteGroupoid& G = *r.window;
  for (std::size_t a = 0; a < G.size(); ++a) {
    const Arrow x = arrow_at(a);
    r.degree.push_back(static_cast<int>(length.at(G.name(G.rng(x)))) - static_cast<int>(length.at(G.name(G.src(x)))));
  }
  auto deg = [&](Arrow x) { return r.degree[idx(x)]; };

  ResidualTracker additive("degree_additive", 0.0), flips("star_flips_degree", 0.0),
      homogeneous("homogeneous_products", 1e-12), kernel_match("degree_zero_is_kernel", 0.0);
  G.for_each_pair([&](Arrow x, Arrow y, Arrow xy, std::size_t) {
    if (deg(xy) != deg(x) + deg(y)) additive.fail(G.name(x) + "," + G.name(y));
  });
  additive.observe(0.0, "");
  for (std::size_t a = 0; a < G.size(); ++a)
    if (deg(G.inv(arrow_at(a))) != -deg(arrow_at(a))) flips.fail(G.name(arrow_at(a)));
  flips.observe(0.0, "");

  // Random degree-k and degree-l elements multiply into degree k + l.
  const ConvolutionAlgebra alg(r.window);
  const int d = static_cast<int>(depth);
  auto homogeneous_random = [&](int k) {
    AlgebraElement f = AlgebraElement::random(r.window, rng);
    for (std::size_t a = 0; a < G.size(); ++a)
      if (r.degree[a] != k) f[arrow_at(a)] = 0.0;
    return f;
  };
  for (int k = -d; k <= d; ++k)
    for (int l = -d; l <= d; ++l) {
      const AlgebraElement prod = alg.multiply(homogeneous_random(k), homogeneous_random(l));
      double outside = 0.0;
      for (std::size_t a = 0; a < G.size(); ++a)
        if (r.degree[a] != k + l) outside = std::max(outside, std::abs(prod[arrow_at(a)]));
      homogeneous.observe(outside, std::to_string(k) + "," + std::to_string(l));
    }

  // Degree zero, both paths of length m, is the kernel fiber over z^m.
  std::set<std::string> zero;
  for (std::size_t a = 0; a < G.size(); ++a)
    if (r.degree[a] == 0) zero.insert(G.name(arrow_at(a)));
  std::set<std::string> kernel_names;
  for (std::size_t m = 0; m <= depth; ++m) {
    const std::vector<std::size_t> word(m, 0);
    const LiftSet lifts = lift_paths(phi, word);
    const auto k = path_pair_groupoid(V, lifts.paths);
    kernel_names.insert(k->names().begin(), k->names().end());
  }
  if (zero != kernel_names) {
    std::vector<std::string> diff;
    std::set_symmetric_difference(zero.begin(), zero.end(), kernel_names.begin(), kernel_names.end(),
                                  std::back_inserter(diff));
    kernel_match.fail(diff.front());
  }
  kernel_match.observe(0.0, "");
  r.checks = {additive.done(), flips.done(), homogeneous.done(), kernel_match.done()};
  return r;
}

namespace catalog {

GraphMorphism cuntz_example() {
  auto v = DirectedGraph::build({"v"}, {{"a", "v", "v"}, {"b", "v", "v"}, {"c", "v", "v"}});
  auto w = DirectedGraph::build({"w"}, {{"1", "w", "w"}, {"2", "w", "w"}});
  return GraphMorphism{std::move(v), std::move(w), {0}, {0, 0, 1}};
}

}  // namespace catalog

}  // namespace fellgpd
