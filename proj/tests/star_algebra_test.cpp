#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "fellgpd/catalog.hpp"
#include "fellgpd/morphism.hpp"
#include "fellgpd/star_algebra.hpp"
#include "test_util.hpp"

using namespace fellgpd;
using fellgpd::fixtures::expect_error;

namespace {

double diff(const AlgebraElement& a, const AlgebraElement& b) { return (a - b).max_abs(); }

// Heisenberg product written out from the formula, independent of the
// groupoid tables: index (a*n+b)*n+c.
std::size_t heis_mul(std::size_t n, std::size_t x, std::size_t y) {
  const std::size_t a = x / (n * n), b = (x / n) % n, c = x % n;
  const std::size_t a2 = y / (n * n), b2 = (y / n) % n, c2 = y % n;
  return (((a + a2) % n) * n + (b + b2) % n) * n + (c + c2 + a * b2) % n;
}

}  // namespace

TEST(Convolve, PointMassesOnPair) {
  auto g = catalog::pair_groupoid(2);
  for (std::size_t i = 0; i < g->size(); ++i)
    for (std::size_t j = 0; j < g->size(); ++j) {
      const Arrow a = arrow_at(i), b = arrow_at(j);
      const auto prod = convolve(AlgebraElement::delta(g, a), AlgebraElement::delta(g, b));
      AlgebraElement expect(g);
      if (g->src(a) == g->rng(b)) expect = AlgebraElement::delta(g, g->mul(a, b));
      EXPECT_EQ(diff(prod, expect), 0.0);
    }
}

TEST(Convolve, GeneratorOfZ3HasOrderThree) {
  auto g = catalog::cyclic_group(3);
  const auto f = AlgebraElement::delta(g, g->at("1"));
  EXPECT_EQ(diff(convolve(convolve(f, f), f), AlgebraElement::delta(g, g->at("0"))), 0.0);
}

TEST(Convolve, HeisenbergMatchesGroupAlgebraOracle) {
  auto g = catalog::heisenberg_group(3);
  std::mt19937_64 rng(7);
  for (int t = 0; t < 10; ++t) {
    const auto f1 = AlgebraElement::random(g, rng);
    const auto f2 = AlgebraElement::random(g, rng);
    AlgebraElement expect(g);
    for (std::size_t x = 0; x < 27; ++x)
      for (std::size_t y = 0; y < 27; ++y) expect[arrow_at(heis_mul(3, x, y))] += f1[arrow_at(x)] * f2[arrow_at(y)];
    EXPECT_LT(diff(convolve(f1, f2), expect), 1e-12);
  }
}

TEST(Convolve, BaseMismatch) {
  auto a = AlgebraElement::delta(catalog::cyclic_group(3), arrow_at(0));
  auto b = AlgebraElement::delta(catalog::cyclic_group(3), arrow_at(0));
  expect_error([&] { convolve(a, b); }, Errc::BaseMismatch);
}

TEST(Convolve, AssociativeAndDistributive) {
  for (auto g : {catalog::pair_groupoid(3), catalog::heisenberg_group(2),
                 catalog::product(*catalog::pair_groupoid(2), *catalog::cyclic_group(3))}) {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 20; ++t) {
      const auto a = AlgebraElement::random(g, rng);
      const auto b = AlgebraElement::random(g, rng);
      const auto c = AlgebraElement::random(g, rng);
      const auto lhs = convolve(convolve(a, b), c);
      const double scale = std::max(1.0, lhs.max_abs());
      EXPECT_LT(diff(lhs, convolve(a, convolve(b, c))) / scale, 1e-12);
      EXPECT_LT(diff(convolve(a, b + c), convolve(a, b) + convolve(a, c)) / scale, 1e-12);
    }
  }
}

TEST(Involute, PointMassesAndInvolution) {
  auto g = catalog::pair_groupoid(2);
  for (std::size_t i = 0; i < g->size(); ++i) {
    const Arrow a = arrow_at(i);
    EXPECT_EQ(diff(involute(AlgebraElement::delta(g, a)), AlgebraElement::delta(g, g->inv(a))), 0.0);
  }
  auto h = catalog::heisenberg_group(3);
  std::mt19937_64 rng(3);
  for (int t = 0; t < 100; ++t) {
    const auto f = AlgebraElement::random(h, rng);
    EXPECT_EQ(diff(involute(involute(f)), f), 0.0);
  }
  for (int t = 0; t < 20; ++t) {
    const auto f1 = AlgebraElement::random(h, rng);
    const auto f2 = AlgebraElement::random(h, rng);
    EXPECT_LT(diff(involute(convolve(f1, f2)), convolve(involute(f2), involute(f1))), 1e-12);
  }
}

TEST(CstarNorm, Examples) {
  auto pair = catalog::pair_groupoid(2);
  for (Arrow u : pair->units()) EXPECT_NEAR(cstar_norm(*pair, AlgebraElement::delta(pair, u)), 1.0, 1e-12);
  AlgebraElement all(pair);
  for (std::size_t i = 0; i < 4; ++i) all[arrow_at(i)] = 1.0;
  // Each block is the 2×2 all-ones matrix, eigenvalues {0, 2}.
  EXPECT_NEAR(cstar_norm(*pair, all), 2.0, 1e-12);
}

TEST(CstarNorm, CstarIdentityAndSubmultiplicativity) {
  auto g = catalog::heisenberg_group(3);
  std::mt19937_64 rng(5);
  for (int t = 0; t < 100; ++t) {
    const auto f = AlgebraElement::random(g, rng);
    const double n = cstar_norm(*g, f);
    EXPECT_NEAR(cstar_norm(*g, convolve(involute(f), f)), n * n, 1e-9 * std::max(1.0, n * n));
    EXPECT_NEAR(cstar_norm(*g, involute(f)), n, 1e-9 * std::max(1.0, n));
    const auto f2 = AlgebraElement::random(g, rng);
    EXPECT_LE(cstar_norm(*g, convolve(f, f2)), n * cstar_norm(*g, f2) * (1 + 1e-12));
  }
}

TEST(RegularRepresentation, IsStarHomomorphism) {
  auto g = catalog::product(*catalog::pair_groupoid(2), *catalog::cyclic_group(3));
  ConvolutionAlgebra alg(g);
  std::mt19937_64 rng(9);
  for (int t = 0; t < 20; ++t) {
    const auto a = AlgebraElement::random(g, rng);
    const auto b = AlgebraElement::random(g, rng);
    const auto lhs = alg.regular(convolve(a, b));
    const auto rhs = alg.regular(a) * alg.regular(b);
    EXPECT_LT((lhs - rhs).max_abs(), 1e-12 * std::max(1.0, lhs.max_abs()));
    EXPECT_LT((alg.regular(involute(a)) - alg.regular(a).adjoint()).max_abs(), 1e-14);
  }
}

TEST(RegularRepresentation, FaithfulOnCatalog) {
  for (auto g : {catalog::pair_groupoid(2), catalog::cyclic_group(3), catalog::heisenberg_group(2),
                 catalog::heisenberg_group(3), catalog::symmetric_group_3(),
                 catalog::disjoint_union(*catalog::pair_groupoid(3), *catalog::cyclic_group(4))}) {
    EXPECT_EQ(regular_rank(ConvolutionAlgebra(g)), g->size());
  }
}

TEST(Positivity, Examples) {
  auto pair = catalog::pair_groupoid(2);
  std::mt19937_64 rng(1);
  for (int t = 0; t < 100; ++t) {
    const auto f = AlgebraElement::random(pair, rng);
    EXPECT_TRUE(positivity_check(*pair, convolve(involute(f), f)));
  }
  auto z3 = catalog::cyclic_group(3);
  const auto h = AlgebraElement::delta(z3, z3->at("0")) - AlgebraElement::delta(z3, z3->at("1")) -
                 AlgebraElement::delta(z3, z3->at("2"));
  EXPECT_FALSE(positivity_check(*z3, h));
  // Character values 1 − 2cos(2πk/3): −1, 2, 2.
  EXPECT_NEAR(ConvolutionAlgebra(z3).min_spectrum(h), -1.0, 1e-12);
  EXPECT_TRUE(positivity_check(*z3, AlgebraElement(z3)));
}

TEST(TwistedAlgebra, Z2WithMinusOne) {
  auto g = catalog::cyclic_group(2);
  std::vector<cplx> w(g->pair_count(), 1.0);
  w[g->pair_index(g->at("1"), g->at("1"))] = -1.0;
  ConvolutionAlgebra alg(g, Cocycle(g, w));
  const auto t = AlgebraElement::delta(g, g->at("1"));
  // t·t = −e, so λ(t) has spectrum {±i}.
  EXPECT_EQ(diff(alg.multiply(t, t), -1.0 * AlgebraElement::delta(g, g->at("0"))), 0.0);
  Eigen::ComplexEigenSolver<Mat> es(alg.regular(t).blocks[0]);
  std::vector<double> im{es.eigenvalues()[0].imag(), es.eigenvalues()[1].imag()};
  std::sort(im.begin(), im.end());
  EXPECT_NEAR(im[0], -1.0, 1e-12);
  EXPECT_NEAR(im[1], 1.0, 1e-12);
  EXPECT_NEAR(std::abs(es.eigenvalues()[0].real()), 0.0, 1e-12);
}

TEST(TwistedAlgebra, StarHomomorphismAndUnitConvention) {
  auto g = catalog::product(*catalog::pair_groupoid(2), *catalog::z_n_squared(2));
  std::mt19937_64 rng(21);
  // Bicharacter on the Z2² factor times a random coboundary.
  std::vector<cplx> w(g->pair_count());
  const auto cob = random_coboundary(g, rng);
  g->for_each_pair([&](Arrow x, Arrow y, Arrow, std::size_t p) {
    const std::string nx = g->name(x), ny = g->name(y);
    const int a = nx[nx.size() - 4] - '0';
    const int b2 = ny[ny.size() - 2] - '0';
    w[p] = (a * b2 % 2 ? -1.0 : 1.0) * cob.values()[p];
  });
  ConvolutionAlgebra alg(g, Cocycle(g, w));
  for (std::size_t i = 0; i < g->size(); ++i) {
    const auto d = AlgebraElement::delta(g, arrow_at(i));
    EXPECT_LT(diff(alg.multiply(alg.star(d), d), AlgebraElement::delta(g, g->src(arrow_at(i)))), 1e-14);
  }
  for (int t = 0; t < 10; ++t) {
    const auto a = AlgebraElement::random(g, rng);
    const auto b = AlgebraElement::random(g, rng);
    const auto c = AlgebraElement::random(g, rng);
    const auto lhs = alg.multiply(alg.multiply(a, b), c);
    EXPECT_LT(diff(lhs, alg.multiply(a, alg.multiply(b, c))), 1e-11 * std::max(1.0, lhs.max_abs()));
    EXPECT_LT((alg.regular(alg.multiply(a, b)) - alg.regular(a) * alg.regular(b)).max_abs(), 1e-11);
    EXPECT_LT((alg.regular(alg.star(a)) - alg.regular(a).adjoint()).max_abs(), 1e-14);
  }
}

TEST(TwistedAlgebra, RejectsBrokenCocycle) {
  auto g = catalog::cyclic_group(3);
  std::vector<cplx> w(g->pair_count(), 1.0);
  w[g->pair_index(g->at("1"), g->at("1"))] = std::polar(1.0, 0.3);
  auto e = expect_error([&] { ConvolutionAlgebra(g, Cocycle(g, w)); }, Errc::CocycleIdentityFailure);
  ASSERT_TRUE(e);
  EXPECT_FALSE(e->witness().empty());
}

TEST(ConditionalExpectation, IdentityWhenKIsG) {
  auto g = catalog::heisenberg_group(2);
  std::vector<Arrow> all;
  for (std::size_t i = 0; i < g->size(); ++i) all.push_back(arrow_at(i));
  auto k = restrict_to(*g, all);
  std::mt19937_64 rng(2);
  const auto f = AlgebraElement::random(g, rng);
  const auto phi = conditional_expectation(k, f);
  for (std::size_t i = 0; i < g->size(); ++i) EXPECT_EQ(phi[arrow_at(i)], f[k.to_parent[i]]);
}

TEST(ConditionalExpectation, HeisenbergCenter) {
  auto pi = catalog::heisenberg_quotient(3);
  auto g = pi.domain();
  auto k = kernel(pi).kernel;
  for (std::size_t i = 0; i < g->size(); ++i) {
    const auto phi = conditional_expectation(k, AlgebraElement::delta(g, arrow_at(i)));
    const bool central = g->name(arrow_at(i)).substr(0, 5) == "[0,0,";
    EXPECT_DOUBLE_EQ(phi.max_abs(), central ? 1.0 : 0.0);
  }
  ConvolutionAlgebra alg(g);
  std::mt19937_64 rng(4);
  for (const auto& c : verify_conditional_expectation(alg, k, rng, 30, 1e-9)) EXPECT_TRUE(c.pass) << c.name;
}

TEST(ConditionalExpectation, ComposedWithUnitRestriction) {
  // Φ onto the center followed by Ψ onto the units equals restriction to units.
  auto pi = catalog::heisenberg_quotient(3);
  auto g = pi.domain();
  auto k = kernel(pi).kernel;
  const auto units = k.groupoid->units();
  auto u_in_k = restrict_to(*k.groupoid, units);
  auto u_in_g = restrict_to(*g, g->units());
  std::mt19937_64 rng(8);
  const auto f = AlgebraElement::random(g, rng);
  const auto two_step = conditional_expectation(u_in_k, conditional_expectation(k, f));
  const auto direct = conditional_expectation(u_in_g, f);
  ASSERT_EQ(two_step.coeffs().size(), direct.coeffs().size());
  EXPECT_EQ((two_step.coeffs() - direct.coeffs()).cwiseAbs().maxCoeff(), 0.0);
}

TEST(ConditionalExpectation, RequiresAllUnits) {
  auto g = catalog::pair_groupoid(2);
  std::vector<Arrow> one{g->at("1")};
  auto k = restrict_to(*g, one);
  expect_error([&] { conditional_expectation(k, AlgebraElement(g)); }, Errc::NotASubgroupoid);
}
