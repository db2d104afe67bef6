#pragma once

#include <cstddef>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "fellgpd/check.hpp"
#include "fellgpd/groupoid.hpp"
#include "fellgpd/morphism.hpp"
#include "fellgpd/wedderburn.hpp"

namespace fellgpd {

struct GraphEdge {
  std::string id;
  std::size_t from;  // o(e)
  std::size_t to;    // t(e)
};

/// Finite directed graph. Paths a₁a₂⋯ require t(aᵢ) = o(aᵢ₊₁).
class DirectedGraph {
 public:
  struct EdgeSpec {
    std::string id, from, to;
  };
  /// Throws Parse on duplicate ids or unknown endpoints.
  static DirectedGraph build(std::vector<std::string> vertices, const std::vector<EdgeSpec>& edges);

  std::size_t vertex_count() const noexcept { return vertices_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  const std::string& vertex(std::size_t v) const { return vertices_[v]; }
  const GraphEdge& edge(std::size_t e) const { return edges_[e]; }
  const std::vector<std::string>& vertices() const noexcept { return vertices_; }
  const std::vector<GraphEdge>& edges() const noexcept { return edges_; }
  std::optional<std::size_t> find_vertex(std::string_view name) const;
  std::optional<std::size_t> find_edge(std::string_view id) const;
  /// Edges e with o(e) = v.
  const std::vector<std::size_t>& out_edges(std::size_t v) const { return out_[v]; }
  std::vector<std::size_t> sinks() const;
  /// True when every edge id is a single character, so words can be written
  /// without separators.
  bool single_letter_ids() const noexcept { return single_letter_; }

 private:
  std::vector<std::string> vertices_;
  std::vector<GraphEdge> edges_;
  std::vector<std::vector<std::size_t>> out_;
  bool single_letter_ = true;
};

/// A finite path: its origin and its edges (possibly none).
struct GraphPath {
  std::size_t origin = 0;
  std::vector<std::size_t> edges;

  friend bool operator==(const GraphPath&, const GraphPath&) = default;
};

std::size_t terminus(const DirectedGraph& g, const GraphPath& p);
/// Edge ids concatenated (joined by '.' unless all ids are single letters);
/// a path of length zero is written [v].
std::string path_name(const DirectedGraph& g, const GraphPath& p);
/// All paths of length exactly n (n = 0 gives the vertices).
std::vector<GraphPath> paths_of_length(const DirectedGraph& g, std::size_t n);

/// Vertex and edge maps V → W.
struct GraphMorphism {
  DirectedGraph domain;
  DirectedGraph codomain;
  std::vector<std::size_t> vmap;
  std::vector<std::size_t> emap;

  GraphPath operator()(const GraphPath& p) const;
};

struct GraphMorphismReport {
  bool incidence = false;
  bool vertex_surjective = false;
  bool edge_surjective = false;
  /// For every v ∈ V⁰ and b ∈ W¹ with o(b) = φ(v) some a with o(a) = v
  /// has φ(a) = b.
  bool path_lifting = false;
  bool domain_no_sinks = false;
  bool codomain_no_sinks = false;
  /// First failure among the flags above, in that order.
  std::vector<std::string> witness;

  CheckList checks() const;
};

/// Exhaustive. Throws IncidenceViolation with the offending edge.
GraphMorphismReport check_graph_morphism(const GraphMorphism& phi);

/// Letters of a word in W: comma separated, or one character per letter when
/// all edge ids are single characters. Throws InadmissibleWord with the
/// position of an unknown letter or a broken incidence t(bᵢ) ≠ o(bᵢ₊₁).
std::vector<std::size_t> parse_word(const DirectedGraph& w, std::string_view text);
std::string word_name(const DirectedGraph& w, const std::vector<std::size_t>& word);

struct LiftSet {
  std::vector<std::size_t> word;
  std::vector<GraphPath> paths;  // in lexicographic edge order
  /// Lift indices grouped by terminal vertex, ordered by vertex.
  std::vector<std::pair<std::size_t, std::vector<std::size_t>>> by_terminal;
};

/// All paths p in V with φ(p) = w. The empty word lifts to every vertex.
/// Throws NotLiftable with the shortest prefix that has no lift.
LiftSet lift_paths(const GraphMorphism& phi, const std::vector<std::size_t>& word);

/// Finite-depth cylinder surjectivity: every admissible word of length n has
/// a lift ("every_word_lifts") and every lift of every proper prefix extends
/// along the next letter ("lifts_extend").
struct CylinderReport {
  std::size_t depth = 0;
  std::size_t words = 0;
  std::size_t lifts = 0;
  CheckList checks;
};
CylinderReport cylinder_check(const GraphMorphism& phi, std::size_t depth);

/// Pairs (p, q) of the given paths with t(p) = t(q), composed by
/// (p, q)(q, r) = (p, r). Units are named by the path, arrows "(p,q)".
GroupoidPtr path_pair_groupoid(const DirectedGraph& g, const std::vector<GraphPath>& paths);

struct KernelFiberGroupoid {
  LiftSet lifts;
  GroupoidPtr groupoid;
  WedderburnInvariants invariants;
  /// Lift counts per terminal vertex, descending.
  std::vector<std::size_t> terminal_sizes;
};

/// K_w = {(p, q) : p, q lift w, t(p) = t(q)}: the lag-zero kernel at depth |w|.
KernelFiberGroupoid kernel_fiber_groupoid(const GraphMorphism& phi, const std::vector<std::size_t>& word,
                                          std::mt19937_64& rng);

/// Path-pair groupoids of the paths of length exactly n in V and in W, with
/// (p, q) ↦ (φ(p), φ(q)). The kernel fiber over the unit w is K_w.
GroupoidMorphism window_morphism(const GraphMorphism& phi, std::size_t n);

/// The one-vertex, one-loop graph Z and the collapse of V onto it.
DirectedGraph loop_graph();
GraphMorphism collapse_morphism(const DirectedGraph& v);

struct GradingReport {
  /// Pairs (p, q) of paths of length ≤ n with t(p) = t(q).
  GroupoidPtr window;
  /// |p| − |q| for every arrow.
  std::vector<int> degree;
  /// "degree_additive", "star_flips_degree", "homogeneous_products",
  /// "degree_zero_is_kernel".
  CheckList checks;
};

/// Degree map of the collapse φ: V → Z on the depth-n window. Throws
/// DomainNotCollapse unless the codomain is one vertex with one loop.
GradingReport grading_degree(const GraphMorphism& phi, std::size_t depth, std::mt19937_64& rng);

namespace catalog {
/// V with one vertex and loops a, b, c; W with one vertex and loops 1, 2;
/// a, b ↦ 1 and c ↦ 2.
GraphMorphism cuntz_example();
}  // namespace catalog

}  // namespace fellgpd
