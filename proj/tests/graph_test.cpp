#include <gtest/gtest.h>

#include <random>

#include "fellgpd/fell_bundle.hpp"
#include "fellgpd/graph.hpp"
#include "test_util.hpp"

using namespace fellgpd;
using fixtures::expect_error;
using Blocks = std::vector<std::size_t>;

namespace {

// Counts lifts by running over every edge sequence of V of the word's
// length, independently of the library's path enumeration.
std::size_t brute_force_lifts(const GraphMorphism& phi, const std::vector<std::size_t>& word) {
  const std::size_t n = word.size(), m = phi.domain.edge_count();
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= m;
  std::size_t count = 0;
  for (std::size_t code = 0; code < total; ++code) {
    std::vector<std::size_t> seq(n);
    std::size_t c = code;
    for (std::size_t i = 0; i < n; ++i, c /= m) seq[i] = c % m;
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) {
      ok = phi.emap[seq[i]] == word[i];
      if (i > 0) ok = ok && phi.domain.edge(seq[i - 1]).to == phi.domain.edge(seq[i]).from;
    }
    count += ok;
  }
  return count;
}

std::vector<std::vector<std::size_t>> all_words(std::size_t letters, std::size_t max_len) {
  std::vector<std::vector<std::size_t>> out{{}};
  std::vector<std::vector<std::size_t>> layer{{}};
  for (std::size_t n = 1; n <= max_len; ++n) {
    std::vector<std::vector<std::size_t>> next;
    for (const auto& w : layer)
      for (std::size_t l = 0; l < letters; ++l) {
        auto v = w;
        v.push_back(l);
        next.push_back(v);
      }
    out.insert(out.end(), next.begin(), next.end());
    layer = std::move(next);
  }
  return out;
}

std::size_t ones(const std::vector<std::size_t>& w) { return static_cast<std::size_t>(std::count(w.begin(), w.end(), 0u)); }

// Only a ↦ 1; nothing maps to 2.
GraphMorphism deficient() {
  auto v = DirectedGraph::build({"v"}, {{"a", "v", "v"}});
  return GraphMorphism{v, catalog::cuntz_example().codomain, {0}, {0}};
}

// x has loops into x and y, y has a loop: lifts of z end at x once and at y twice.
DirectedGraph split_graph() {
  return DirectedGraph::build({"x", "y"}, {{"a", "x", "x"}, {"b", "x", "y"}, {"c", "y", "y"}});
}

}  // namespace

TEST(Graph, BuildRejectsBadInput) {
  expect_error([] { DirectedGraph::build({"v", "v"}, {}); }, Errc::Parse);
  expect_error([] { DirectedGraph::build({"v"}, {{"a", "v", "u"}}); }, Errc::Parse);
  expect_error([] { DirectedGraph::build({"v"}, {{"a", "v", "v"}, {"a", "v", "v"}}); }, Errc::Parse);
}

TEST(GraphMorphism, CuntzHasPathLifting) {
  const auto r = check_graph_morphism(catalog::cuntz_example());
  EXPECT_TRUE(r.incidence && r.vertex_surjective && r.edge_surjective && r.path_lifting);
  EXPECT_TRUE(r.domain_no_sinks && r.codomain_no_sinks);
  EXPECT_TRUE(r.witness.empty());
}

TEST(GraphMorphism, CollapseHasPathLifting) {
  const auto r = check_graph_morphism(collapse_morphism(split_graph()));
  EXPECT_TRUE(r.path_lifting);
  EXPECT_TRUE(all_pass(r.checks()));
}

TEST(GraphMorphism, MissingPreimageIsReported) {
  const auto r = check_graph_morphism(deficient());
  EXPECT_TRUE(r.vertex_surjective);
  EXPECT_FALSE(r.edge_surjective);
  EXPECT_FALSE(r.path_lifting);
  EXPECT_EQ(r.witness, (std::vector<std::string>{"2", "no preimage"}));
  const auto checks = r.checks();
  EXPECT_EQ(find_check(checks, "edge_surjective")->witness, "2,no preimage");
}

TEST(GraphMorphism, IncidenceViolationThrows) {
  auto v = DirectedGraph::build({"u", "v"}, {{"e", "u", "v"}});
  auto w = DirectedGraph::build({"p", "q"}, {{"f", "p", "p"}, {"g", "q", "q"}});
  const GraphMorphism phi{v, w, {0, 1}, {0}};
  auto e = expect_error([&] { check_graph_morphism(phi); }, Errc::IncidenceViolation);
  ASSERT_TRUE(e);
  EXPECT_EQ(e->witness(), (std::vector<std::string>{"e", "f"}));
}

TEST(Words, ParseAndReject) {
  const auto w = catalog::cuntz_example().codomain;
  EXPECT_EQ(parse_word(w, "121"), (std::vector<std::size_t>{0, 1, 0}));
  EXPECT_EQ(parse_word(w, "1,2"), (std::vector<std::size_t>{0, 1}));
  EXPECT_TRUE(parse_word(w, "").empty());
  auto e = expect_error([&] { parse_word(w, "13"); }, Errc::InadmissibleWord);
  EXPECT_EQ(e->witness(), (std::vector<std::string>{"1", "3"}));
  auto g = DirectedGraph::build({"p", "q"}, {{"x", "p", "q"}, {"y", "p", "q"}, {"r", "q", "p"}});
  auto bad = expect_error([&] { parse_word(g, "xy"); }, Errc::InadmissibleWord);
  EXPECT_EQ(bad->witness(), (std::vector<std::string>{"1", "y"}));
  EXPECT_EQ(parse_word(g, "xrx").size(), 3u);
}

TEST(Lifts, CuntzExamples) {
  const auto phi = catalog::cuntz_example();
  const auto one = lift_paths(phi, parse_word(phi.codomain, "1"));
  ASSERT_EQ(one.paths.size(), 2u);
  EXPECT_EQ(path_name(phi.domain, one.paths[0]), "a");
  EXPECT_EQ(path_name(phi.domain, one.paths[1]), "b");
  const auto w121 = lift_paths(phi, parse_word(phi.codomain, "121"));
  std::vector<std::string> names;
  for (const auto& p : w121.paths) names.push_back(path_name(phi.domain, p));
  EXPECT_EQ(names, (std::vector<std::string>{"aca", "acb", "bca", "bcb"}));
  const auto empty = lift_paths(phi, {});
  ASSERT_EQ(empty.paths.size(), 1u);
  EXPECT_EQ(path_name(phi.domain, empty.paths[0]), "[v]");
}

TEST(Lifts, CountMatchesBruteForceUpToLengthEight) {
  const auto phi = catalog::cuntz_example();
  for (const auto& w : all_words(2, 8)) {
    const auto lifts = lift_paths(phi, w);
    EXPECT_EQ(lifts.paths.size(), brute_force_lifts(phi, w));
    EXPECT_EQ(lifts.paths.size(), std::size_t{1} << ones(w));
  }
}

TEST(Lifts, FailingPrefixIsReported) {
  const auto phi = deficient();
  auto e = expect_error([&] { lift_paths(phi, parse_word(phi.codomain, "112")); }, Errc::NotLiftable);
  EXPECT_EQ(e->witness(), (std::vector<std::string>{"112"}));
}

TEST(Lifts, SplitAcrossTerminals) {
  const auto phi = collapse_morphism(split_graph());
  const auto lifts = lift_paths(phi, {0});
  ASSERT_EQ(lifts.by_terminal.size(), 2u);
  EXPECT_EQ(lifts.by_terminal[0].second.size(), 1u);  // a ends at x
  EXPECT_EQ(lifts.by_terminal[1].second.size(), 2u);  // b, c end at y
  std::mt19937_64 rng(0);
  const auto k = kernel_fiber_groupoid(phi, {0}, rng);
  EXPECT_EQ(k.invariants.blocks, (Blocks{2, 1}));
  EXPECT_EQ(k.terminal_sizes, (Blocks{2, 1}));
}

TEST(Cylinders, CuntzAndDeficient) {
  const auto phi = catalog::cuntz_example();
  for (std::size_t n = 0; n <= 5; ++n) {
    const auto r = cylinder_check(phi, n);
    EXPECT_EQ(r.words, std::size_t{1} << n);
    std::size_t expected = 1;
    for (std::size_t i = 0; i < n; ++i) expected *= 3;  // Σ_w 2^{#1s} = 3^n
    EXPECT_EQ(r.lifts, expected);
    EXPECT_TRUE(all_pass(r.checks));
  }
  const auto bad = cylinder_check(deficient(), 2);
  EXPECT_FALSE(find_check(bad.checks, "every_word_lifts")->pass);
  EXPECT_FALSE(find_check(bad.checks, "lifts_extend")->pass);
  EXPECT_EQ(find_check(bad.checks, "lifts_extend")->witness, "a over 12");
}

TEST(KernelFibers, CuntzBlocks) {
  const auto phi = catalog::cuntz_example();
  std::mt19937_64 rng(0);
  EXPECT_EQ(kernel_fiber_groupoid(phi, parse_word(phi.codomain, "11"), rng).invariants.blocks, Blocks{4});
  EXPECT_EQ(kernel_fiber_groupoid(phi, parse_word(phi.codomain, "22"), rng).invariants.blocks, Blocks{1});
  for (const auto& w : all_words(2, 6)) {
    const auto k = kernel_fiber_groupoid(phi, w, rng);
    EXPECT_EQ(k.invariants.blocks, Blocks{std::size_t{1} << ones(w)});
    std::size_t sum = 0;
    for (auto b : k.invariants.blocks) sum += b;
    EXPECT_EQ(sum, k.lifts.paths.size());
  }
}

TEST(KernelFibers, MatrixRouteAgrees) {
  const auto phi = catalog::cuntz_example();
  std::mt19937_64 rng(0);
  for (const char* w : {"1", "12", "121", "2"}) {
    const auto k = kernel_fiber_groupoid(phi, parse_word(phi.codomain, w), rng);
    EXPECT_EQ(wedderburn_regular(ConvolutionAlgebra(k.groupoid), rng), k.invariants) << w;
  }
}

TEST(KernelFibers, ExtensionMultipliesBlocks) {
  const auto phi = catalog::cuntz_example();
  std::mt19937_64 rng(0);
  for (const auto& w : all_words(2, 4))
    for (std::size_t letter = 0; letter < 2; ++letter) {
      auto longer = w;
      longer.push_back(letter);
      const auto k0 = kernel_fiber_groupoid(phi, w, rng);
      const auto k1 = kernel_fiber_groupoid(phi, longer, rng);
      const std::size_t factor = brute_force_lifts(phi, {letter});
      ASSERT_EQ(k0.invariants.blocks.size(), k1.invariants.blocks.size());
      for (std::size_t i = 0; i < k0.invariants.blocks.size(); ++i)
        EXPECT_EQ(k1.invariants.blocks[i], k0.invariants.blocks[i] * factor);
    }
}

TEST(Window, CuntzWindowBundleIsFell) {
  const auto phi = catalog::cuntz_example();
  for (std::size_t n = 1; n <= 2; ++n) {
    const auto pi = window_morphism(phi, n);
    EXPECT_EQ(pi.domain()->size(), n == 1 ? 9u : 81u);
    const auto cls = classify_morphism(pi);
    EXPECT_TRUE(cls.surjective);
    const FellBundle e = build_bundle(pi);
    std::mt19937_64 rng(0);
    for (const auto& c : verify_axioms(e, rng, 5, 1e-9)) EXPECT_TRUE(c.pass) << c.name << " " << c.witness;
    // The unit fiber over the word w is C*(K_w).
    const auto& h = *pi.codomain();
    const Arrow w11 = h.at(n == 1 ? "1" : "11");
    EXPECT_EQ(e.dim(w11), n == 1 ? 4u : 16u);
  }
}

TEST(Grading, CollapseOfCuntzDomain) {
  const auto phi = collapse_morphism(catalog::cuntz_example().domain);
  std::mt19937_64 rng(0);
  const auto r = grading_degree(phi, 3, rng);
  for (const auto& c : r.checks) EXPECT_TRUE(c.pass) << c.name << " " << c.witness;
  const auto& g = *r.window;
  EXPECT_EQ(r.degree[idx(g.at("(ab,c)"))], 1);
  EXPECT_EQ(r.degree[idx(g.at("(c,ab)"))], -1);
  EXPECT_EQ(r.degree[idx(g.at("([v],abc)"))], -3);
  EXPECT_EQ(r.degree[idx(g.at("ab"))], 0);
}

TEST(Grading, SplitGraphAndNonCollapse) {
  std::mt19937_64 rng(0);
  const auto r = grading_degree(collapse_morphism(split_graph()), 3, rng);
  for (const auto& c : r.checks) EXPECT_TRUE(c.pass) << c.name << " " << c.witness;
  expect_error([&] { grading_degree(catalog::cuntz_example(), 2, rng); }, Errc::DomainNotCollapse);
}
