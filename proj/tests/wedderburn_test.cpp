#include <gtest/gtest.h>

#include <random>

#include "fellgpd/catalog.hpp"
#include "fellgpd/wedderburn.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace fellgpd;
using Blocks = std::vector<std::size_t>;

namespace {

WedderburnInvariants matrix_route(const GroupoidPtr& g, std::uint64_t seed = 0) {
  std::mt19937_64 rng(seed);
  return wedderburn_regular(ConvolutionAlgebra(g), rng);
}

WedderburnInvariants groupoid_route(const GroupoidPtr& g, std::uint64_t seed = 0) {
  std::mt19937_64 rng(seed);
  return wedderburn(ConvolutionAlgebra(g), rng);
}

}  // namespace

TEST(OracleSelfCheck, KnownGroups) {
  EXPECT_EQ(oracle::group_blocks(*catalog::cyclic_group(5)), Blocks(5, 1));
  EXPECT_EQ(oracle::group_blocks(*catalog::symmetric_group_3()), (Blocks{2, 1, 1}));
  EXPECT_EQ(oracle::group_blocks(*catalog::heisenberg_group(2)), (Blocks{2, 1, 1, 1, 1}));
  EXPECT_EQ(oracle::group_blocks(*catalog::heisenberg_group(3)), (Blocks{3, 3, 1, 1, 1, 1, 1, 1, 1, 1, 1}));
}

TEST(Wedderburn, StandingExamples) {
  EXPECT_EQ(matrix_route(catalog::pair_groupoid(2)).blocks, (Blocks{2}));
  EXPECT_EQ(matrix_route(catalog::cyclic_group(3)).blocks, (Blocks{1, 1, 1}));
  EXPECT_EQ(matrix_route(catalog::heisenberg_group(2)).blocks, *oracle::group_blocks(*catalog::heisenberg_group(2)));
  EXPECT_EQ(matrix_route(catalog::heisenberg_group(3)).blocks, *oracle::group_blocks(*catalog::heisenberg_group(3)));
}

TEST(Wedderburn, DimensionAndCenterInvariants) {
  for (auto g : {catalog::pair_groupoid(3), catalog::heisenberg_group(3), catalog::symmetric_group_3()}) {
    const auto w = matrix_route(g);
    std::size_t sq = 0;
    for (auto n : w.blocks) sq += n * n;
    EXPECT_EQ(sq, g->size());
    EXPECT_EQ(w.dimension, g->size());
    EXPECT_EQ(w.center_dimension, w.blocks.size());
  }
}

TEST(Wedderburn, PairGroupoidsAndCyclicGroups) {
  for (std::size_t n = 1; n <= 6; ++n) EXPECT_EQ(groupoid_route(catalog::pair_groupoid(n)).blocks, Blocks{n});
  for (std::size_t n = 1; n <= 4; ++n) EXPECT_EQ(matrix_route(catalog::pair_groupoid(n)).blocks, Blocks{n});
  for (std::size_t k = 1; k <= 8; ++k) EXPECT_EQ(matrix_route(catalog::cyclic_group(k)).blocks, Blocks(k, 1));
}

TEST(Wedderburn, RoutesAgree) {
  for (auto g : {catalog::pair_groupoid(3), catalog::heisenberg_group(2), catalog::symmetric_group_3(),
                 catalog::product(*catalog::pair_groupoid(2), *catalog::symmetric_group_3()),
                 catalog::disjoint_union(*catalog::pair_groupoid(2), *catalog::heisenberg_group(2)),
                 catalog::disjoint_union(*catalog::cyclic_group(3), *catalog::product(*catalog::pair_groupoid(3),
                                                                                      *catalog::cyclic_group(2)))}) {
    EXPECT_EQ(matrix_route(g), groupoid_route(g)) << matrix_route(g).to_string();
  }
}

TEST(Wedderburn, ProductWithPairScalesBlocks) {
  // M_2 ⊗ C*(S3) = M_4 ⊕ M_2 ⊕ M_2
  const auto g = catalog::product(*catalog::pair_groupoid(2), *catalog::symmetric_group_3());
  EXPECT_EQ(matrix_route(g).blocks, (Blocks{4, 2, 2}));
}

TEST(Wedderburn, InvariantUnderUnitaryConjugation) {
  const auto g = catalog::heisenberg_group(2);
  ConvolutionAlgebra alg(g);
  auto images = alg.basis_images();
  std::mt19937_64 rng(17);
  const auto sizes = images.front().block_sizes();
  BlockMatrix u;
  for (auto n : sizes) u.blocks.push_back(random_unitary(n, rng));
  for (auto& m : images) m = u * m * u.adjoint();
  EXPECT_EQ(wedderburn(images, rng), matrix_route(g));
}

TEST(Wedderburn, SeedDoesNotChangeResult) {
  const auto g = catalog::heisenberg_group(3);
  const auto w0 = matrix_route(g, 0);
  for (std::uint64_t s = 1; s < 4; ++s) EXPECT_EQ(matrix_route(g, s), w0);
}

TEST(Wedderburn, TwistedZ2IsCommutative) {
  auto g = catalog::cyclic_group(2);
  std::vector<cplx> w(g->pair_count(), 1.0);
  w[g->pair_index(g->at("1"), g->at("1"))] = -1.0;
  std::mt19937_64 rng(0);
  const auto inv = wedderburn_regular(ConvolutionAlgebra(g, Cocycle(g, w)), rng);
  EXPECT_EQ(inv.blocks, (Blocks{1, 1}));
}

TEST(Wedderburn, BicharacterTwistOnZ2SquaredGivesM2) {
  // ω((a,b),(a',b')) = (−1)^{ab'} is non-degenerate on Z2², so the twisted
  // algebra is simple: M_2.
  auto g = catalog::z_n_squared(2);
  std::vector<cplx> w(g->pair_count());
  g->for_each_pair([&](Arrow x, Arrow y, Arrow, std::size_t p) { w[p] = (idx(x) / 2) * (idx(y) % 2) ? -1.0 : 1.0; });
  ConvolutionAlgebra alg(g, Cocycle(g, w));
  std::mt19937_64 rng(0);
  EXPECT_EQ(wedderburn_regular(alg, rng).blocks, (Blocks{2}));
  EXPECT_EQ(wedderburn(alg, rng).blocks, (Blocks{2}));
}
