#include "fellgpd/cocycle.hpp"

#include <cmath>
#include <numbers>

#include "fellgpd/error.hpp"

namespace fellgpd {

Cocycle::Cocycle(GroupoidPtr base, std::vector<cplx> values) : base_(std::move(base)), values_(std::move(values)) {
  if (values_.size() != base_->pair_count())
    throw Error(Errc::BaseMismatch, "cocycle table does not cover the composable pairs");
}

Cocycle Cocycle::trivial(GroupoidPtr base) {
  const std::size_t n = base->pair_count();
  return Cocycle(std::move(base), std::vector<cplx>(n, cplx(1.0, 0.0)));
}

bool Cocycle::is_trivial() const {
  for (const cplx& v : values_)
    if (v != cplx(1.0, 0.0)) return false;
  return true;
}

CheckList cocycle_check(const Cocycle& omega, double tol) {
  const FiniteGroupoid& G = *omega.base();
  ResidualTracker identity("cocycle_identity", tol);
  ResidualTracker modulus("unit_modulus", tol);
  ResidualTracker normal("normalization", tol);

  G.for_each_pair([&](Arrow g, Arrow h, Arrow, std::size_t p) {
    modulus.observe(std::abs(std::abs(omega.values()[p]) - 1.0), G.name(g) + "," + G.name(h));
  });
  for (std::size_t i = 0; i < G.size(); ++i) {
    const Arrow g = arrow_at(i);
    normal.observe(std::abs(omega(G.rng(g), g) - 1.0), G.name(G.rng(g)) + "," + G.name(g));
    normal.observe(std::abs(omega(g, G.src(g)) - 1.0), G.name(g) + "," + G.name(G.src(g)));
  }
  // ω(g1,g2) ω(g1g2,g3) = ω(g2,g3) ω(g1,g2g3)
  G.for_each_pair([&](Arrow g1, Arrow g2, Arrow g12, std::size_t p12) {
    for (Arrow g3 : G.with_range(G.src(g2))) {
      const Arrow g23 = G.mul(g2, g3);
      const cplx lhs = omega.values()[p12] * omega(g12, g3);
      const cplx rhs = omega(g2, g3) * omega(g1, g23);
      identity.observe(std::abs(lhs - rhs), G.name(g1) + "," + G.name(g2) + "," + G.name(g3));
    }
  });
  return {identity.done(), modulus.done(), normal.done()};
}

void require_cocycle(const Cocycle& omega, double tol) {
  for (const Check& c : cocycle_check(omega, tol))
    if (!c.pass) throw Error(Errc::CocycleIdentityFailure, c.name + " violated", {c.witness});
}

Cocycle restrict_cocycle(const Cocycle& omega, const Subgroupoid& sub) {
  const FiniteGroupoid& K = *sub.groupoid;
  std::vector<cplx> values(K.pair_count());
  K.for_each_pair([&](Arrow g, Arrow h, Arrow, std::size_t p) {
    values[p] = omega(sub.to_parent[idx(g)], sub.to_parent[idx(h)]);
  });
  return Cocycle(sub.groupoid, std::move(values));
}

Cocycle random_coboundary(const GroupoidPtr& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::vector<cplx> b(g->size(), cplx(1.0, 0.0));
  for (std::size_t i = 0; i < g->size(); ++i)
    if (!g->is_unit(arrow_at(i))) b[i] = std::polar(1.0, angle(rng));
  std::vector<cplx> values(g->pair_count());
  g->for_each_pair([&](Arrow x, Arrow y, Arrow xy, std::size_t p) {
    values[p] = b[idx(x)] * b[idx(y)] / b[idx(xy)];
  });
  return Cocycle(g, std::move(values));
}

}  // namespace fellgpd
