#include <gtest/gtest.h>

#include <set>

#include "fellgpd/catalog.hpp"
#include "fellgpd/morphism.hpp"
#include "test_util.hpp"

using namespace fellgpd;
using fellgpd::fixtures::expect_error;

namespace {

// Brute-force lift count: |{g : s(g) = x, π(g) = h}|.
std::size_t lifts(const GroupoidMorphism& pi, Arrow h, Arrow x) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < pi.domain()->size(); ++i)
    if (pi.domain()->src(arrow_at(i)) == x && pi(arrow_at(i)) == h) ++n;
  return n;
}

// Swap action of Z2 on {x,y}: arrows (e,x),(e,y),(t,x),(t,y), mapped to Z2.
GroupoidMorphism flip_projection() {
  auto H = catalog::cyclic_group(2);
  auto G = catalog::pair_groupoid(std::vector<std::string>{"x", "y"});
  std::vector<Arrow> map(G->size());
  for (std::size_t i = 0; i < G->size(); ++i)
    map[i] = G->is_unit(arrow_at(i)) ? H->at("0") : H->at("1");
  return GroupoidMorphism(G, H, map);
}

}  // namespace

TEST(ClassifyMorphism, HeisenbergQuotientIsFibrationNotCovering) {
  auto pi = catalog::heisenberg_quotient(3);
  auto c = classify_morphism(pi);
  EXPECT_TRUE(c.is_morphism);
  EXPECT_TRUE(c.surjective);
  EXPECT_TRUE(c.fibration);
  EXPECT_FALSE(c.covering);
  EXPECT_FALSE(c.witness.empty());
  // Oracle: every (h, x) has exactly three lifts.
  const Arrow x = pi.domain()->units()[0];
  for (std::size_t i = 0; i < pi.codomain()->size(); ++i) EXPECT_EQ(lifts(pi, arrow_at(i), x), 3u);
}

TEST(ClassifyMorphism, FlipProjectionIsCovering) {
  auto pi = flip_projection();
  auto c = classify_morphism(pi);
  EXPECT_TRUE(c.covering);
  EXPECT_TRUE(c.fibration);
  EXPECT_TRUE(c.continuous);
  EXPECT_TRUE(c.open);
}

TEST(ClassifyMorphism, IdentityIsCovering) {
  auto c = classify_morphism(GroupoidMorphism::identity(catalog::pair_groupoid(2)));
  EXPECT_TRUE(c.covering);
}

TEST(ClassifyMorphism, NotAMorphism) {
  auto g = catalog::cyclic_group(3);
  auto h = catalog::cyclic_group(3);
  // 1 ↦ 1, 2 ↦ 1 breaks 1·1 = 2.
  GroupoidMorphism pi(g, h, {h->at("0"), h->at("1"), h->at("1")});
  auto e = expect_error([&] { classify_morphism(pi); }, Errc::NotAMorphism);
  ASSERT_TRUE(e);
  EXPECT_FALSE(e->witness().empty());
}

TEST(ClassifyMorphism, NonSurjectiveInclusion) {
  auto g = catalog::space({"1"});
  auto h = catalog::cyclic_group(2);
  auto c = classify_morphism(GroupoidMorphism(g, h, {h->at("0")}));
  EXPECT_TRUE(c.is_morphism);
  EXPECT_FALSE(c.surjective);
  EXPECT_FALSE(c.fibration);
  EXPECT_FALSE(c.covering);
}

TEST(ClassifyMorphism, FibrationWithSeveralLifts) {
  // Pair groupoid on {1,2,3} onto pair groupoid on {a,b}: 1,2 ↦ a, 3 ↦ b.
  auto g = catalog::pair_groupoid(3);
  auto h = catalog::pair_groupoid(std::vector<std::string>{"a", "b"});
  auto point = [](const std::string& p) { return p == "3" ? std::string("b") : std::string("a"); };
  std::vector<Arrow> map(g->size());
  for (std::size_t i = 0; i < g->size(); ++i) {
    const Arrow x = arrow_at(i);
    const std::string r = point(g->name(g->rng(x))), s = point(g->name(g->src(x)));
    map[i] = r == s ? h->at(r) : h->at("(" + r + "," + s + ")");
  }
  auto c = classify_morphism(GroupoidMorphism(g, h, map));
  EXPECT_TRUE(c.surjective);
  // Every (h, x) has a lift: arrows into/out of a unit exist over every arrow.
  EXPECT_TRUE(c.fibration);
  EXPECT_FALSE(c.covering);
}

TEST(ClassifyMorphism, SurjectiveButNotFibration) {
  // {1,2} pair groupoid plus an isolated unit 3, onto the pair groupoid on
  // {a,b}: 3 ↦ a has no arrow over (b,a).
  auto g = catalog::disjoint_union(*catalog::pair_groupoid(2), *catalog::space({"3"}));
  auto h = catalog::pair_groupoid(std::vector<std::string>{"a", "b"});
  std::vector<Arrow> map{h->at("a"), h->at("b"), h->at("(a,b)"), h->at("(b,a)"), h->at("a")};
  ASSERT_EQ(g->names()[4], "R:3");
  auto c = classify_morphism(GroupoidMorphism(g, h, map));
  EXPECT_TRUE(c.surjective);
  EXPECT_FALSE(c.fibration);
  EXPECT_FALSE(c.covering);
  EXPECT_EQ(c.witness, (std::vector<std::string>{"(b,a)", "R:3", "no lift"}));
}

TEST(Kernel, HeisenbergCenter) {
  auto pi = catalog::heisenberg_quotient(3);
  auto k = kernel(pi);
  EXPECT_EQ(k.kernel.groupoid->size(), 3u);
  ASSERT_EQ(k.fibers.size(), 1u);
  EXPECT_TRUE(k.amenable);
  std::set<std::string> names;
  for (Arrow a : k.kernel.to_parent) names.insert(pi.domain()->name(a));
  EXPECT_EQ(names, (std::set<std::string>{"[0,0,0]", "[0,0,1]", "[0,0,2]"}));
  EXPECT_TRUE(find_isomorphism(*k.kernel.groupoid, *catalog::cyclic_group(3)));
}

TEST(Kernel, CoveringKernelIsUnitSpace) {
  for (auto pi : {flip_projection(), GroupoidMorphism::identity(catalog::pair_groupoid(3))}) {
    auto k = kernel(pi);
    std::set<Arrow> got(k.kernel.to_parent.begin(), k.kernel.to_parent.end());
    const auto u = pi.domain()->units();
    EXPECT_EQ(got, std::set<Arrow>(u.begin(), u.end()));
    for (const auto& f : k.fibers) EXPECT_EQ(f.fiber.groupoid->size(), f.fiber.groupoid->unit_count());
  }
}

TEST(Kernel, RejectsNonSurjective) {
  auto g = catalog::space({"1"});
  auto h = catalog::cyclic_group(2);
  expect_error([&] { kernel(GroupoidMorphism(g, h, {h->at("0")})); }, Errc::NotSurjective);
}

TEST(IsotropyQuotient, Examples) {
  {
    auto q = isotropy_quotient(catalog::cyclic_group(3));
    EXPECT_EQ(q.relation->size(), 1u);
    EXPECT_EQ(kernel(q.projection).kernel.groupoid->size(), 3u);
  }
  {
    auto g = catalog::pair_groupoid(2);
    auto q = isotropy_quotient(g);
    EXPECT_TRUE(find_isomorphism(*q.relation, *g));
    EXPECT_EQ(kernel(q.projection).kernel.groupoid->size(), 2u);
  }
  {
    auto q = isotropy_quotient(catalog::heisenberg_group(3));
    EXPECT_EQ(q.relation->size(), 1u);
    EXPECT_EQ(kernel(q.projection).kernel.groupoid->size(), 27u);
  }
}

TEST(IsotropyQuotient, IsSurjectiveFibration) {
  auto g = catalog::disjoint_union(*catalog::product(*catalog::pair_groupoid(2), *catalog::cyclic_group(2)),
                                   *catalog::symmetric_group_3());
  auto q = isotropy_quotient(g);
  auto c = classify_morphism(q.projection);
  EXPECT_TRUE(c.surjective);
  EXPECT_TRUE(c.fibration);
  EXPECT_EQ(q.relation->size(), 5u);
}

TEST(Bisection, Examples) {
  auto pair = catalog::pair_groupoid(2);
  const auto units = pair->units();
  EXPECT_EQ(check_bisection(*pair, units).arrows().size(), 2u);
  std::vector<Arrow> off{pair->at("(1,2)"), pair->at("(2,1)")};
  EXPECT_EQ(check_bisection(*pair, off).arrows().size(), 2u);

  auto z3 = catalog::cyclic_group(3);
  std::vector<Arrow> all{arrow_at(0), arrow_at(1), arrow_at(2)};
  auto e = expect_error([&] { check_bisection(*z3, all); }, Errc::NotABisection);
  ASSERT_TRUE(e);
  EXPECT_EQ(e->witness().size(), 2u);
}

TEST(Bisection, GreedyCoverCoversEverything) {
  for (auto g : {catalog::pair_groupoid(3), catalog::heisenberg_group(2),
                 catalog::disjoint_union(*catalog::pair_groupoid(2), *catalog::cyclic_group(3))}) {
    auto cover = greedy_bisection_cover(*g);
    std::vector<int> seen(g->size(), 0);
    for (const auto& b : cover) {
      std::set<Arrow> s, r;
      for (Arrow a : b.arrows()) {
        ++seen[idx(a)];
        EXPECT_TRUE(s.insert(g->src(a)).second);
        EXPECT_TRUE(r.insert(g->rng(a)).second);
      }
    }
    for (int c : seen) EXPECT_GE(c, 1);
  }
}
