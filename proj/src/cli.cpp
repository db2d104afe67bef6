#include "fellgpd/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <ostream>
#include <random>
#include <set>

#include "fellgpd/action.hpp"
#include "fellgpd/catalog.hpp"
#include "fellgpd/cocycle.hpp"
#include "fellgpd/error.hpp"
#include "fellgpd/fell_bundle.hpp"
#include "fellgpd/graph.hpp"
#include "fellgpd/morphism.hpp"
#include "fellgpd/star_algebra.hpp"
#include "fellgpd/wedderburn.hpp"

namespace fellgpd::cli {

using io::json;

json Report::to_json() const {
  json cs = json::array();
  for (const auto& c : checks)
    cs.push_back({{"name", c.name}, {"pass", c.pass}, {"residual", c.residual}, {"witness", c.witness}});
  return {{"command", command}, {"inputs", inputs},   {"seed", seed},   {"tolerance", tolerance},
          {"samples", samples}, {"checks", cs},       {"data", data},   {"notes", notes},
          {"pass", pass()}};
}

namespace {

const char* kTopologyNote =
    "finite discrete groupoids are etale with the counting Haar system; continuity and openness hold automatically";
const char* kCompletionNote =
    "fibers are finite dimensional: completion is the identity and norm continuity of the bundle is automatic";
const char* kWindowNote =
    "graph groupoids are truncated to lag-zero path-pair windows with a symbolic degree map; the infinite path "
    "groupoid and its inductive limit are not built";

struct Section {
  CheckList checks;
  json data = json::object();
  std::vector<std::string> notes;
};

Check flag(const std::string& name, bool ok, const std::string& witness = {}) {
  return Check{name, ok, 0.0, ok ? std::string() : witness};
}

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) out += (out.empty() ? "" : ",") + p;
  return out;
}

Check error_check(const Error& e) {
  return Check{std::string(errc_name(e.code())), false, 0.0,
               e.witness().empty() ? std::string(e.what()) : e.witness_string()};
}

/// Runs f; a library error other than malformed input becomes a failing entry.
template <class F>
bool guarded(Section& s, F&& f) {
  try {
    f();
    return true;
  } catch (const Error& e) {
    if (e.code() == Errc::Parse) throw;
    s.checks.push_back(error_check(e));
    return false;
  }
}

void append(CheckList& into, const CheckList& more) { into.insert(into.end(), more.begin(), more.end()); }

void absorb(Report& r, Section s, const std::string& prefix = {}) {
  for (auto& c : s.checks) {
    if (!prefix.empty()) c.name = prefix + ":" + c.name;
    r.checks.push_back(std::move(c));
  }
  if (prefix.empty()) {
    for (auto it = s.data.begin(); it != s.data.end(); ++it) r.data[it.key()] = it.value();
  } else {
    r.data[prefix] = std::move(s.data);
  }
  for (auto& n : s.notes)
    if (std::find(r.notes.begin(), r.notes.end(), n) == r.notes.end()) r.notes.push_back(std::move(n));
}

json invariants_json(const WedderburnInvariants& w) {
  return {{"blocks", w.blocks}, {"dimension", w.dimension}, {"center_dimension", w.center_dimension}};
}

json names_of(const FiniteGroupoid& g, std::span<const Arrow> arrows) {
  json out = json::array();
  for (Arrow a : arrows) out.push_back(g.name(a));
  return out;
}

// ---------------------------------------------------------------- sections

Section groupoid_section(const GroupoidPtr& g) {
  Section s;
  const FiniteGroupoid& G = *g;
  s.checks.push_back(flag("groupoid_tables", true));
  s.data["arrows"] = G.size();
  s.data["units"] = G.unit_count();
  s.data["composable_pairs"] = G.pair_count();
  json orbits = json::array();
  for (const auto& o : unit_orbits(G)) {
    std::size_t iso = 0;
    for (Arrow a : G.with_source(o.front()))
      if (G.rng(a) == o.front()) ++iso;
    orbits.push_back({{"units", names_of(G, o)}, {"isotropy_order", iso}});
  }
  s.data["orbits"] = orbits;

  guarded(s, [&] {
    const auto q = isotropy_quotient(g);
    const auto cls = classify_morphism(q.projection);
    s.data["isotropy_quotient_arrows"] = q.relation->size();
    s.checks.push_back(flag("isotropy_quotient_fibration", cls.surjective && cls.fibration, join(cls.witness)));
  });

  guarded(s, [&] {
    const auto cover = greedy_bisection_cover(G);
    std::vector<bool> hit(G.size(), false);
    json bis = json::array();
    for (const auto& b : cover) {
      const Bisection checked = check_bisection(G, b.arrows());
      for (Arrow a : checked.arrows()) hit[idx(a)] = true;
      bis.push_back(names_of(G, checked.arrows()));
    }
    std::string missing;
    for (std::size_t i = 0; i < G.size() && missing.empty(); ++i)
      if (!hit[i]) missing = G.name(arrow_at(i));
    s.checks.push_back(flag("bisection_cover", missing.empty(), missing));
    s.data["bisections"] = bis;
  });
  s.notes.push_back(kTopologyNote);
  return s;
}

Section morphism_section(const GroupoidMorphism& pi, std::mt19937_64& rng) {
  Section s;
  guarded(s, [&] {
    const auto cls = classify_morphism(pi);
    const std::string w = join(cls.witness);
    s.checks.push_back(flag("is_morphism", cls.is_morphism));
    s.checks.push_back(flag("surjective", cls.surjective, w));
    s.data["surjective_on_units"] = cls.surjective_on_units;
    s.data["fibration"] = cls.fibration;
    s.data["covering"] = cls.covering;
    s.data["continuous"] = cls.continuous;
    s.data["open"] = cls.open;
    if (!cls.covering) s.data["witness"] = cls.witness;
    if (!cls.surjective) return;
    const auto k = kernel(pi);
    json fibers = json::array();
    for (const auto& f : k.fibers) {
      const ConvolutionAlgebra a(f.fiber.groupoid);
      fibers.push_back({{"unit", pi.codomain()->name(f.unit)},
                        {"arrows", names_of(*pi.domain(), f.fiber.to_parent)},
                        {"invariants", invariants_json(wedderburn(a, rng))}});
    }
    s.data["kernel_fibers"] = fibers;
    s.data["kernel_amenable"] = k.amenable;
    append(s.checks, kernel_decomposition_check(pi, rng));
  });
  s.notes.push_back(kTopologyNote);
  return s;
}

Section algebra_section(const GroupoidPtr& g, const std::optional<Cocycle>& omega, std::mt19937_64& rng,
                        const Options& o) {
  Section s;
  if (omega) {
    append(s.checks, cocycle_check(*omega));
    s.data["twisted"] = !omega->is_trivial();
  }
  guarded(s, [&] {
    const ConvolutionAlgebra a = omega ? ConvolutionAlgebra(g, *omega) : ConvolutionAlgebra(g);
    ResidualTracker assoc("associative", o.tol), mult("regular_multiplicative", o.tol),
        star("regular_star", o.tol), invol("involutive", o.tol), cstar("cstar_identity", o.tol),
        pos("positive_square", o.tol), routes("untwisted_routes_agree", o.tol);
    auto rel = [](double num, double den) { return den > 0 ? num / den : num; };
    for (std::size_t k = 0; k < o.samples; ++k) {
      const auto f1 = AlgebraElement::random(g, rng), f2 = AlgebraElement::random(g, rng),
                 f3 = AlgebraElement::random(g, rng);
      const std::string w = "sample " + std::to_string(k);
      const auto l = a.multiply(a.multiply(f1, f2), f3), r = a.multiply(f1, a.multiply(f2, f3));
      assoc.observe(rel((l - r).max_abs(), std::max(l.max_abs(), 1.0)), w);
      const BlockMatrix p12 = a.regular(a.multiply(f1, f2)), p1 = a.regular(f1), p2 = a.regular(f2);
      const double dm = op_norm(p12 - p1 * p2);
      const double ds = op_norm(a.regular(a.star(f1)) - p1.adjoint());
      const double n1 = a.norm(f1), n2 = a.norm(f2);
      mult.observe(rel(dm, n1 * n2), w);
      star.observe(rel(ds, n1), w);
      invol.observe(rel((a.star(a.star(f1)) - f1).max_abs(), f1.max_abs()), w);
      const auto ff = a.multiply(a.star(f1), f1);
      cstar.observe(rel(std::abs(a.norm(ff) - n1 * n1), n1 * n1), w);
      const double lo = std::min(0.0, a.min_spectrum(ff));
      pos.observe(rel(-lo, n1 * n1), w);
      if (!omega) {
        if (!positivity_check(*g, ff, o.tol)) pos.fail(w);
        const double dc = (convolve(f1, f2) - a.multiply(f1, f2)).max_abs();
        const double di = (involute(f1) - a.star(f1)).max_abs();
        const double dn = std::abs(cstar_norm(*g, f1) - n1);
        routes.observe(std::max({rel(dc, n1 * n2), rel(di, n1), rel(dn, n1)}), w);
      }
    }
    for (auto* t : {&assoc, &mult, &star, &invol, &cstar, &pos}) s.checks.push_back(t->done());
    if (!omega) s.checks.push_back(routes.done());

    const std::size_t rank = regular_rank(a);
    s.checks.push_back(flag("regular_faithful", rank == g->size(),
                            "rank " + std::to_string(rank) + " of " + std::to_string(g->size())));
    const auto w1 = wedderburn(a, rng), w2 = wedderburn_regular(a, rng);
    s.checks.push_back(flag("wedderburn_routes_agree", w1 == w2, w1.to_string() + " vs " + w2.to_string()));
    s.checks.push_back(flag("dimension_is_arrow_count", w1.dimension == g->size(), w1.to_string()));
    s.data["invariants"] = invariants_json(w1);

    std::vector<Arrow> units(g->units().begin(), g->units().end());
    const Subgroupoid unit_space = restrict_to(*g, units);
    append(s.checks, verify_conditional_expectation(a, unit_space, rng, std::min<std::size_t>(o.samples, 20), o.tol));
  });
  return s;
}

Section bundle_build_section(const FellBundle& e) {
  Section s;
  const FiniteGroupoid& H = *e.base();
  json fibers = json::object();
  for (std::size_t h = 0; h < H.size(); ++h) fibers[H.name(arrow_at(h))] = e.dim(arrow_at(h));
  s.data["fiber_dimensions"] = fibers;
  s.data["total_dimension"] = e.total_dim();
  json notes = json::object();
  std::string missing;
  for (Arrow u : H.units()) {
    if (!e.unit_representation(u) && missing.empty()) missing = H.name(u);
    if (!e.unit_representation_note(u).empty()) notes[H.name(u)] = e.unit_representation_note(u);
  }
  if (!notes.empty()) s.data["unit_representation_notes"] = notes;
  s.checks.push_back(flag("unit_fibers_represented", missing.empty(), missing));
  if (!missing.empty()) return s;

  // δ_g*δ_g = δ_{s(g)} and ‖δ_g‖ = 1 for the arrow basis of E(π).
  ResidualTracker iso("basis_partial_isometries", 1e-12), norm("basis_norm_one", 1e-12);
  for (std::size_t hi = 0; hi < H.size(); ++hi) {
    const Arrow h = arrow_at(hi), u = H.src(h);
    for (std::size_t i = 0; i < e.dim(h); ++i) {
      const auto xi = fiber_basis_element(e, h, i);
      const auto sq = fiber_mul(e, fiber_star(e, xi), xi);
      const std::string w = H.name(h) + ":" + e.basis(h)[i];
      if (const auto* m = e.morphism() ? &*e.morphism() : nullptr) {
        const Arrow g = *m->domain()->find(e.basis(h)[i]);
        const auto& names = e.basis(u);
        const auto at = std::find(names.begin(), names.end(), m->domain()->name(m->domain()->src(g)));
        Vec expect = Vec::Zero(static_cast<Eigen::Index>(names.size()));
        expect[at - names.begin()] = 1.0;
        iso.observe((sq.coeffs - expect).cwiseAbs().maxCoeff(), w);
      }
      norm.observe(std::abs(fiber_norm(e, xi) - 1.0), w);
    }
  }
  if (e.morphism()) s.checks.push_back(iso.done());
  s.checks.push_back(norm.done());
  s.notes.push_back(kCompletionNote);
  return s;
}

Section bundle_verify_section(const FellBundle& e, std::mt19937_64& rng, const Options& o) {
  Section s;
  append(s.checks, verify_axioms(e, rng, o.samples, o.tol));
  guarded(s, [&] {
    const SectionAlgebra sa(e);
    append(s.checks, verify_expectation(sa, rng, std::min<std::size_t>(o.samples, 20), o.tol));
    s.data["section_algebra_dimension"] = sa.dim();
  });
  guarded(s, [&] {
    const auto cover = greedy_bisection_cover(*e.base());
    CheckList merged;
    for (std::size_t k = 0; k < cover.size(); ++k) {
      for (const auto& c : bisection_bimodule_check(e, cover[k], rng, std::min<std::size_t>(o.samples, 10), o.tol)) {
        auto it = std::find_if(merged.begin(), merged.end(), [&](const Check& m) { return m.name == c.name; });
        if (it == merged.end()) {
          merged.push_back(Check{c.name, true, 0.0, {}});
          it = merged.end() - 1;
        }
        it->residual = std::max(it->residual, c.residual);
        if (!c.pass && it->pass) {
          it->pass = false;
          it->witness = "bisection " + std::to_string(k) + ": " + c.witness;
        }
      }
    }
    s.data["bisections"] = cover.size();
    for (auto& c : merged) c.name = "bimodule_" + c.name;
    append(s.checks, merged);
  });
  s.notes.push_back(kCompletionNote);
  return s;
}

Section psi_section(const GroupoidMorphism& pi, const std::optional<Cocycle>& omega, std::mt19937_64& rng,
                    const Options& o) {
  Section s;
  guarded(s, [&] {
    const auto r = psi_iso_check(pi, omega, rng, o.samples, o.tol, o.iso_tol);
    s.checks = r.checks;
    s.data["groupoid_side"] = invariants_json(r.groupoid_side);
    s.data["bundle_side"] = invariants_json(r.bundle_side);
  });
  return s;
}

Section graph_check_section(const GraphMorphism& phi, std::size_t depth) {
  Section s;
  guarded(s, [&] {
    const auto r = check_graph_morphism(phi);
    append(s.checks, r.checks());
    if (!r.witness.empty()) s.data["witness"] = r.witness;
    const auto c = cylinder_check(phi, depth);
    append(s.checks, c.checks);
    s.data["depth"] = c.depth;
    s.data["words"] = c.words;
    s.data["lifts"] = c.lifts;
  });
  return s;
}

Section graph_fibers_section(const GraphMorphism& phi, const std::string& text, std::mt19937_64& rng) {
  Section s;
  guarded(s, [&] {
    const auto word = parse_word(phi.codomain, text);
    const auto kf = kernel_fiber_groupoid(phi, word, rng);
    s.data["word"] = word_name(phi.codomain, word);
    json lifts = json::array();
    for (const auto& p : kf.lifts.paths) lifts.push_back(path_name(phi.domain, p));
    s.data["lifts"] = lifts;
    s.data["terminal_sizes"] = kf.terminal_sizes;
    s.data["invariants"] = invariants_json(kf.invariants);
    s.checks.push_back(flag("blocks_match_terminal_lifts", kf.invariants.blocks == kf.terminal_sizes,
                            kf.invariants.to_string()));
    const auto regular = wedderburn_regular(ConvolutionAlgebra(kf.groupoid), rng);
    s.checks.push_back(flag("wedderburn_routes_agree", regular == kf.invariants, regular.to_string()));
  });
  s.notes.push_back(kWindowNote);
  return s;
}

Section grading_section(const GraphMorphism& phi, std::size_t depth, std::mt19937_64& rng) {
  Section s;
  guarded(s, [&] {
    const auto g = grading_degree(phi, depth, rng);
    s.checks = g.checks;
    std::map<int, std::size_t> hist;
    for (int d : g.degree) ++hist[d];
    json h = json::object();
    for (const auto& [d, c] : hist) h[std::to_string(d)] = c;
    s.data["depth"] = depth;
    s.data["window_arrows"] = g.window->size();
    s.data["degree_histogram"] = h;
  });
  s.notes.push_back(kWindowNote);
  return s;
}

json action_table(const GroupoidAction& a) {
  json act = json::array();
  for (std::size_t h = 0; h < a.h->size(); ++h)
    for (std::size_t x = 0; x < a.size(); ++x)
      if (auto y = a.apply(arrow_at(h), x)) act.push_back(json::array({a.h->name(arrow_at(h)), a.points[x], a.points[*y]}));
  return act;
}

Section action_build_section(const GroupoidAction& a, std::optional<ActionGroupoid>& out) {
  Section s;
  if (!guarded(s, [&] { check_action(a); })) return s;
  s.checks.push_back(flag("action_axioms", true));
  const auto ag = build_action_groupoid(a);
  s.checks.push_back(flag("projection_is_covering", ag.classification.covering,
                          join(ag.classification.witness)));
  s.data["points"] = a.points;
  s.data["arrows"] = ag.groupoid->names();
  s.data["units"] = ag.groupoid->unit_count();
  out = ag;
  return s;
}

Section roundtrip_section(const GroupoidMorphism& pi, const std::optional<GroupoidAction>& original) {
  Section s;
  guarded(s, [&] {
    const auto ca = covering_to_action(pi);
    s.checks.push_back(flag("covering", true));
    s.checks.push_back(flag("recovered_action_axioms", guarded(s, [&] { check_action(ca.action); })));
    const auto to = isomorphism_defect(*pi.domain(), *ca.rebuilt.groupoid, ca.to_action);
    const auto from = isomorphism_defect(*ca.rebuilt.groupoid, *pi.domain(), ca.from_action);
    s.checks.push_back(flag("isomorphic_to_action_groupoid", !to, to ? join(*to) : ""));
    s.checks.push_back(flag("inverse_isomorphism", !from, from ? join(*from) : ""));
    if (original) {
      // Compare h·x by names; the recovered points are the units of the domain.
      std::string bad;
      std::map<std::string, std::size_t> at;
      for (std::size_t i = 0; i < ca.action.size(); ++i) at[ca.action.points[i]] = i;
      const auto& a = *original;
      for (std::size_t h = 0; h < a.h->size() && bad.empty(); ++h)
        for (std::size_t x = 0; x < a.size() && bad.empty(); ++x) {
          const auto y = a.apply(arrow_at(h), x);
          const auto it = at.find(a.points[x]);
          const auto hb = ca.action.h->find(a.h->name(arrow_at(h)));
          if (it == at.end() || !hb) {
            bad = a.points[x];
            continue;
          }
          const auto z = ca.action.apply(*hb, it->second);
          if (y.has_value() != z.has_value() || (y && a.points[*y] != ca.action.points[*z]))
            bad = a.h->name(arrow_at(h)) + "," + a.points[x];
        }
      s.checks.push_back(flag("action_recovered", bad.empty(), bad));
    }
    s.data["action"] = action_table(ca.action);
    s.data["points"] = ca.action.points;
  });
  return s;
}

json omega_table(const Cocycle& w) {
  json t = json::array();
  const auto& G = *w.base();
  G.for_each_pair([&](Arrow a, Arrow b, Arrow, std::size_t p) {
    t.push_back(json::array({G.name(a), G.name(b), io::complex_to_json(w.values()[p])}));
  });
  return t;
}

Section abelian_section(const FellBundle& e, std::mt19937_64& rng, const Options& o) {
  Section s;
  guarded(s, [&] {
    const auto x = abelian_extract(e, rng, std::min<std::size_t>(o.samples, 20), o.tol);
    s.checks = x.report.checks;
    s.data["points"] = x.action.points;
    s.data["action"] = action_table(x.action);
    s.data["omega"] = omega_table(x.omega);
    s.data["groupoid_side"] = invariants_json(x.report.groupoid_side);
    s.data["bundle_side"] = invariants_json(x.report.bundle_side);
  });
  return s;
}

Section extension_section(const GroupExtension& ext, std::mt19937_64& rng, const Options& o,
                          std::optional<ExtensionAnalysis>* keep = nullptr) {
  Section s;
  guarded(s, [&] {
    auto x = group_extension_bundle(ext, rng, std::min<std::size_t>(o.samples, 20), o.tol);
    const auto& G = *ext.g;
    const auto& H = *x.quotient;
    s.checks = x.report.checks;
    s.data["quotient"] = H.names();
    s.data["section"] = names_of(G, x.section);
    s.data["kernel"] = names_of(G, x.kernel);
    json chars = json::object();
    for (std::size_t j = 0; j < x.characters.values.size(); ++j) chars["chi" + std::to_string(j)] = x.characters.values[j];
    s.data["characters"] = chars;
    s.data["character_modulus"] = x.characters.exponent;
    json f = json::array();
    H.for_each_pair([&](Arrow a, Arrow b, Arrow, std::size_t p) {
      f.push_back(json::array({H.name(a), H.name(b), G.name(x.kernel[x.factor_set[p]])}));
    });
    s.data["factor_set"] = f;
    json w = json::array();
    const auto& X = *x.groupoid.groupoid;
    X.for_each_pair([&](Arrow a, Arrow b, Arrow, std::size_t p) {
      w.push_back(json::array({X.name(a), X.name(b), x.omega_exponent[p]}));
    });
    s.data["omega_exponents"] = w;
    s.data["groupoid_side"] = invariants_json(x.report.groupoid_side);
    s.data["bundle_side"] = invariants_json(x.report.bundle_side);
    if (keep) *keep = std::move(x);
  });
  return s;
}

// ---------------------------------------------------------------- demos

Report demo_pair(const Options& o, std::mt19937_64& rng) {
  Report r;
  const auto g = catalog::pair_groupoid(std::vector<std::string>{"1", "2"});
  const auto id = GroupoidMorphism::identity(g);
  absorb(r, groupoid_section(g), "groupoid");
  absorb(r, algebra_section(g, std::nullopt, rng, o), "algebra");
  const FellBundle e = build_bundle(id);
  absorb(r, bundle_build_section(e), "bundle");
  absorb(r, bundle_verify_section(e, rng, o), "axioms");
  absorb(r, psi_section(id, std::nullopt, rng, o), "psi");
  return r;
}

Report demo_z3(const Options& o, std::mt19937_64& rng) {
  Report r;
  const auto g = catalog::cyclic_group(3);
  const auto pt = catalog::cyclic_group(1);
  const GroupoidMorphism collapse(g, pt, std::vector<Arrow>(3, arrow_at(0)));
  absorb(r, groupoid_section(g), "groupoid");
  absorb(r, algebra_section(g, std::nullopt, rng, o), "algebra");
  absorb(r, morphism_section(collapse, rng), "collapse");
  const FellBundle e = build_bundle(collapse);
  absorb(r, bundle_verify_section(e, rng, o), "axioms");
  absorb(r, psi_section(collapse, std::nullopt, rng, o), "psi");
  return r;
}

Report demo_heisenberg(const Options& o, std::mt19937_64& rng) {
  Report r;
  const std::size_t n = o.n;
  if (n < 2 || n > 5) throw ParseError("--n", "", "an integer between 2 and 5");
  const auto g = catalog::heisenberg_group(n);
  GroupExtension ext{g, {}};
  for (std::size_t c = 0; c < n; ++c) ext.kernel.push_back(g->at("[0,0," + std::to_string(c) + "]"));
  std::optional<ExtensionAnalysis> x;
  absorb(r, extension_section(ext, rng, o, &x), "extension");
  if (x) {
    // ω((h,χ),(h',χ)) against χ(z)^{ab'} with h = (a, b), h' = (a', b'), z = [0,0,1].
    Section t;
    const auto& X = *x->groupoid.groupoid;
    json table = json::array();
    std::string bad;
    X.for_each_pair([&](Arrow a, Arrow b, Arrow, std::size_t p) {
      const std::size_t h1 = idx(x->section[idx(x->groupoid.arrows[idx(a)].first)]);
      const auto [h2a, chi] = x->groupoid.arrows[idx(b)];
      const std::size_t h2 = idx(x->section[idx(h2a)]);
      const std::size_t a1 = h1 / (n * n), b2 = (h2 / n) % n;
      const auto expect = static_cast<std::int64_t>(
          (static_cast<std::size_t>(x->characters.values[chi][1]) * a1 * b2) % x->characters.exponent);
      if (x->omega_exponent[p] != expect && bad.empty()) bad = X.name(a) + "," + X.name(b);
      table.push_back(json::array({X.name(a), X.name(b), x->omega_exponent[p], expect}));
    });
    t.checks.push_back(flag("cocycle_equals_chi_of_ab_prime", bad.empty(), bad));
    t.data["columns"] = json::array({"arrow1", "arrow2", "exponent", "chi_of_ab_prime_exponent"});
    t.data["modulus"] = x->characters.exponent;
    t.data["table"] = table;
    absorb(r, t, "cocycle");
  }
  const auto pi = catalog::heisenberg_quotient(n);
  absorb(r, psi_section(pi, std::nullopt, rng, o), "psi");
  const FellBundle e = build_bundle(pi);
  absorb(r, bundle_verify_section(e, rng, o), "axioms");
  absorb(r, abelian_section(e, rng, o), "abelian");
  if (x) r.data["blocks"] = x->report.groupoid_side.blocks;
  return r;
}

Report demo_cuntz(const Options& o, std::mt19937_64& rng) {
  Report r;
  const auto phi = catalog::cuntz_example();
  absorb(r, graph_check_section(phi, o.depth), "graph");
  // Every word up to the depth: one block of size 2^(number of 1s).
  Section f;
  json words = json::object();
  std::string bad;
  std::vector<std::vector<std::size_t>> frontier{{}};
  for (std::size_t len = 1; len <= o.depth; ++len) {
    std::vector<std::vector<std::size_t>> next;
    for (const auto& w : frontier)
      for (std::size_t b = 0; b < phi.codomain.edge_count(); ++b) {
        auto v = w;
        v.push_back(b);
        const auto kf = kernel_fiber_groupoid(phi, v, rng);
        const auto ones = static_cast<std::size_t>(std::count(v.begin(), v.end(), std::size_t{0}));
        const std::vector<std::size_t> expect{std::size_t{1} << ones};
        const std::string name = word_name(phi.codomain, v);
        words[name] = kf.invariants.blocks;
        if (kf.invariants.blocks != expect && bad.empty()) bad = name;
        next.push_back(std::move(v));
      }
    frontier = std::move(next);
  }
  f.checks.push_back(flag("one_block_of_size_two_to_the_ones", bad.empty(), bad));
  f.data["blocks_by_word"] = words;
  f.notes.push_back(kWindowNote);
  absorb(r, f, "fibers");
  absorb(r, grading_section(collapse_morphism(phi.domain), o.depth, rng), "grading");
  const auto window = window_morphism(phi, 1);
  absorb(r, bundle_verify_section(build_bundle(window), rng, o), "window_axioms");
  absorb(r, psi_section(window, std::nullopt, rng, o), "window_psi");
  return r;
}

Report demo_flip(const Options& o, std::mt19937_64& rng) {
  Report r;
  const auto a = make_action(catalog::cyclic_group(2), {"x", "y"}, {{"x", "0"}, {"y", "0"}},
                             {{"0", "x", "x"}, {"0", "y", "y"}, {"1", "x", "y"}, {"1", "y", "x"}});
  std::optional<ActionGroupoid> ag;
  absorb(r, action_build_section(a, ag), "action");
  if (!ag) return r;
  Section iso;
  const auto pair = catalog::pair_groupoid(std::vector<std::string>{"x", "y"});
  iso.checks.push_back(flag("action_groupoid_is_pair_groupoid", find_isomorphism(*ag->groupoid, *pair).has_value()));
  absorb(r, iso, "pair");
  absorb(r, roundtrip_section(ag->projection, a), "roundtrip");
  const FellBundle e = build_bundle(ag->projection);
  absorb(r, bundle_verify_section(e, rng, o), "axioms");
  absorb(r, psi_section(ag->projection, std::nullopt, rng, o), "psi");
  absorb(r, abelian_section(e, rng, o), "abelian");
  return r;
}

// ---------------------------------------------------------------- commands

std::optional<Cocycle> load_cocycle(io::Loader& l, const Options& o, const GroupoidPtr& base) {
  if (o.cocycle.empty()) return std::nullopt;
  return l.cocycle(o.cocycle, base);
}

void emit(const Options& o, const json& j) {
  if (o.emit.empty()) return;
  std::ofstream f(o.emit, std::ios::binary);
  if (!f) throw ParseError(o.emit, "", "a writable path for --emit");
  f << io::dump(j);
}

Report single(Section s) {
  Report r;
  absorb(r, std::move(s));
  return r;
}

Report cmd_gpd_validate(const Options& o, io::Loader& l) {
  GroupoidPtr g;
  try {
    g = l.groupoid(o.groupoid);
  } catch (const Error& e) {
    if (e.code() == Errc::Parse) throw;
    Report r;
    r.checks.push_back(Check{"groupoid_tables", false, 0.0, std::string(errc_name(e.code())) + ": " + e.witness_string()});
    return r;
  }
  return single(groupoid_section(g));
}

Report cmd_gpd_morphism(const Options& o, io::Loader& l) {
  std::mt19937_64 rng(o.seed);
  return single(morphism_section(l.morphism(o.morphism), rng));
}

Report cmd_alg_wedderburn(const Options& o, io::Loader& l) {
  std::mt19937_64 rng(o.seed);
  const auto g = l.groupoid(o.groupoid);
  return single(algebra_section(g, load_cocycle(l, o, g), rng, o));
}

Report cmd_bundle_build(const Options& o, io::Loader& l) {
  const auto pi = l.morphism(o.morphism);
  Section s;
  std::optional<FellBundle> e;
  guarded(s, [&] { e = build_bundle(pi, load_cocycle(l, o, pi.domain())); });
  if (!e) return single(std::move(s));
  emit(o, io::to_json(*e));
  Report r = single(std::move(s));
  absorb(r, bundle_build_section(*e));
  return r;
}

/// --bundle (tables) or --morphism [--cocycle] (E(π)).
FellBundle load_bundle(const Options& o, io::Loader& l) {
  if (!o.bundle.empty()) return FellBundle::from_tables(l.bundle(o.bundle));
  if (o.morphism.empty()) throw ParseError("(command line)", "", "--bundle <file> or --morphism <file>");
  const auto pi = l.morphism(o.morphism);
  return build_bundle(pi, load_cocycle(l, o, pi.domain()));
}

Report cmd_bundle_verify(const Options& o, io::Loader& l) {
  std::mt19937_64 rng(o.seed);
  Section s;
  std::optional<FellBundle> e;
  guarded(s, [&] { e = load_bundle(o, l); });
  Report r = single(std::move(s));
  if (e) absorb(r, bundle_verify_section(*e, rng, o));
  return r;
}

Report cmd_bundle_psi(const Options& o, io::Loader& l) {
  std::mt19937_64 rng(o.seed);
  const auto pi = l.morphism(o.morphism);
  return single(psi_section(pi, load_cocycle(l, o, pi.domain()), rng, o));
}

Report cmd_graph_check(const Options& o, io::Loader& l) {
  return single(graph_check_section(l.graph_morphism(o.morphism), o.depth));
}

Report cmd_graph_fibers(const Options& o, io::Loader& l) {
  std::mt19937_64 rng(o.seed);
  return single(graph_fibers_section(l.graph_morphism(o.morphism), o.word, rng));
}

Report cmd_graph_grading(const Options& o, io::Loader& l) {
  std::mt19937_64 rng(o.seed);
  if (!o.graph.empty()) return single(grading_section(collapse_morphism(l.graph(o.graph)), o.depth, rng));
  if (o.morphism.empty()) throw ParseError("(command line)", "", "--graph <file> or --morphism <file>");
  return single(grading_section(l.graph_morphism(o.morphism), o.depth, rng));
}

Report cmd_action_build(const Options& o, io::Loader& l) {
  std::optional<ActionGroupoid> ag;
  Report r = single(action_build_section(l.action(o.action), ag));
  if (ag) emit(o, io::to_json(*ag->groupoid));
  return r;
}

Report cmd_action_roundtrip(const Options& o, io::Loader& l) {
  if (!o.action.empty()) {
    const auto a = l.action(o.action);
    std::optional<ActionGroupoid> ag;
    Report r;
    absorb(r, action_build_section(a, ag), "build");
    if (ag) absorb(r, roundtrip_section(ag->projection, a), "roundtrip");
    return r;
  }
  if (o.morphism.empty()) throw ParseError("(command line)", "", "--action <file> or --morphism <file>");
  return single(roundtrip_section(l.morphism(o.morphism), std::nullopt));
}

Report cmd_abelian_extract(const Options& o, io::Loader& l) {
  std::mt19937_64 rng(o.seed);
  Section s;
  std::optional<FellBundle> e;
  guarded(s, [&] { e = load_bundle(o, l); });
  Report r = single(std::move(s));
  if (e) absorb(r, abelian_section(*e, rng, o));
  return r;
}

Report cmd_ext_analyze(const Options& o, io::Loader& l) {
  std::mt19937_64 rng(o.seed);
  Section s;
  std::optional<GroupExtension> ext;
  guarded(s, [&] { ext = l.group(o.group); });
  Report r = single(std::move(s));
  if (ext) absorb(r, extension_section(*ext, rng, o));
  return r;
}

Report cmd_demo(const Options& o, io::Loader&) {
  std::mt19937_64 rng(o.seed);
  Report r;
  if (o.demo == "pair") r = demo_pair(o, rng);
  else if (o.demo == "z3") r = demo_z3(o, rng);
  else if (o.demo == "heisenberg") r = demo_heisenberg(o, rng);
  else if (o.demo == "cuntz") r = demo_cuntz(o, rng);
  else if (o.demo == "flip") r = demo_flip(o, rng);
  else throw ParseError("(command line)", "", "a demo name");
  r.data["demo"] = o.demo;
  return r;
}

void add_common(CLI::App* app, Options& o) {
  app->add_option("--tol", o.tol, "absolute tolerance on norm comparisons (default 1e-9, or GPD_TOL)");
  app->add_option("--iso-tol", o.iso_tol, "relative tolerance on isometry claims")->capture_default_str();
  app->add_option("--seed", o.seed, "seed for random samples")->capture_default_str();
  app->add_option("--samples", o.samples, "random samples per check")->capture_default_str();
  app->add_option("--out", o.out, "also write the report to this path");
}

void add_inputs(CLI::App* app, const std::string& name, Options& o) {
  auto file = [&](const char* flag, std::string& v, const char* what, bool required) {
    auto* opt = app->add_option(flag, v, what);
    if (required) opt->required();
  };
  if (name == "gpd validate") file("--groupoid", o.groupoid, "groupoid file", true);
  if (name == "gpd morphism") file("--morphism", o.morphism, "morphism file", true);
  if (name == "alg wedderburn") {
    file("--groupoid", o.groupoid, "groupoid file", true);
    file("--cocycle", o.cocycle, "cocycle file on the same groupoid", false);
  }
  if (name == "bundle build" || name == "bundle psi-check") {
    file("--morphism", o.morphism, "morphism file", true);
    file("--cocycle", o.cocycle, "cocycle file on the domain", false);
  }
  if (name == "bundle build") file("--emit", o.emit, "write the bundle tables to this path", false);
  if (name == "bundle verify" || name == "abelian extract") {
    auto* b = app->add_option("--bundle", o.bundle, "bundle file");
    auto* m = app->add_option("--morphism", o.morphism, "morphism file (bundle E(pi))");
    b->excludes(m);
    m->excludes(b);
    file("--cocycle", o.cocycle, "cocycle file on the domain of --morphism", false);
  }
  if (name == "graph check" || name == "graph fibers") file("--morphism", o.morphism, "graph morphism file", true);
  if (name == "graph check" || name == "graph grading")
    app->add_option("--depth", o.depth, "path length")->capture_default_str();
  if (name == "graph fibers") file("--word", o.word, "word in the codomain graph", true);
  if (name == "graph grading") {
    auto* g = app->add_option("--graph", o.graph, "graph file (collapsed onto the loop graph)");
    auto* m = app->add_option("--morphism", o.morphism, "graph morphism onto the loop graph");
    g->excludes(m);
    m->excludes(g);
  }
  if (name == "action build") {
    file("--action", o.action, "action file", true);
    file("--emit", o.emit, "write the action groupoid to this path", false);
  }
  if (name == "action roundtrip") {
    auto* a = app->add_option("--action", o.action, "action file");
    auto* m = app->add_option("--morphism", o.morphism, "covering morphism file");
    a->excludes(m);
    m->excludes(a);
  }
  if (name == "ext analyze") file("--group", o.group, "group file with kernel", true);
  if (name == "demo") {
    app->add_option("name", o.demo, "demo name")->required()->check(CLI::IsMember(demo_names()));
    app->add_option("--n", o.n, "Heisenberg modulus")->capture_default_str();
    app->add_option("--depth", o.depth, "word length for the graph demo")->capture_default_str();
  }
}

void summarize(const Report& r, std::ostream& err) {
  std::size_t ok = 0;
  for (const auto& c : r.checks) ok += c.pass;
  err << r.command << ": " << (r.pass() ? "PASS" : "FAIL") << " (" << ok << "/" << r.checks.size()
      << " checks)\n";
  for (const auto& c : r.checks)
    if (!c.pass) err << "  failed " << c.name << " residual=" << c.residual << " witness=" << c.witness << "\n";
}

}  // namespace

const std::vector<std::string>& demo_names() {
  static const std::vector<std::string> names{"pair", "z3", "heisenberg", "cuntz", "flip"};
  return names;
}

const std::vector<Command>& commands() {
  static const std::vector<Command> table{
      {"gpd validate", {"validate_groupoid", "isotropy_quotient", "check_bisection"}, cmd_gpd_validate},
      {"gpd morphism", {"classify_morphism", "kernel"}, cmd_gpd_morphism},
      {"alg wedderburn",
       {"convolve", "involute", "cstar_norm", "wedderburn", "conditional_expectation", "positivity_check",
        "cocycle_check", "twisted_algebra"},
       cmd_alg_wedderburn},
      {"bundle build", {"build_bundle", "fiber_mul", "fiber_star", "fiber_norm"}, cmd_bundle_build},
      {"bundle verify", {"verify_axioms", "section_algebra", "bisection_bimodule_check"}, cmd_bundle_verify},
      {"bundle psi-check", {"psi_iso_check"}, cmd_bundle_psi},
      {"graph check", {"check_graph_morphism"}, cmd_graph_check},
      {"graph fibers", {"lift_paths", "kernel_fiber_groupoid"}, cmd_graph_fibers},
      {"graph grading", {"grading_degree"}, cmd_graph_grading},
      {"action build", {"build_action_groupoid"}, cmd_action_build},
      {"action roundtrip", {"covering_to_action"}, cmd_action_roundtrip},
      {"abelian extract", {"abelian_extract"}, cmd_abelian_extract},
      {"ext analyze", {"group_extension_bundle"}, cmd_ext_analyze},
      {"demo", {}, cmd_demo},
  };
  return table;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  if (const char* env = std::getenv("GPD_TOL")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end == env || *end != '\0' || !(v > 0)) {
      err << "input error: GPD_TOL must be a positive number (got \"" << env << "\")\n";
      return 2;
    }
    o.tol = v;
  }

  CLI::App app{"Finite groupoids, Fell bundles and their C*-algebras"};
  app.require_subcommand(1);
  std::map<std::string, CLI::App*> groups;
  const std::map<std::string, std::string> blurbs{
      {"gpd", "groupoid tables and morphisms"},
      {"alg", "twisted convolution algebras"},
      {"bundle", "Fell bundles over a groupoid"},
      {"graph", "graph morphisms and path groupoids"},
      {"action", "groupoid actions and coverings"},
      {"abelian", "abelian bundles as twisted action groupoids"},
      {"ext", "group extensions as Fell bundles"},
      {"demo", "run a built-in example"}};
  const Command* chosen = nullptr;
  for (const auto& c : commands()) {
    const auto space = c.name.find(' ');
    CLI::App* parent = &app;
    std::string leaf = c.name;
    if (space != std::string::npos) {
      const std::string group = c.name.substr(0, space);
      leaf = c.name.substr(space + 1);
      auto& g = groups[group];
      if (!g) {
        g = app.add_subcommand(group, blurbs.at(group));
        g->require_subcommand(1);
      }
      parent = g;
    }
    CLI::App* sub = parent == &app ? parent->add_subcommand(leaf, blurbs.at(leaf)) : parent->add_subcommand(leaf);
    add_common(sub, o);
    add_inputs(sub, c.name, o);
    sub->callback([&chosen, &c] { chosen = &c; });
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }
  if (!chosen) return 2;

  io::Loader loader;
  Report r;
  try {
    r = chosen->run(o, loader);
  } catch (const Error& e) {
    if (e.code() != Errc::Parse) {
      r = Report{};
      r.checks.push_back(error_check(e));
    } else {
      err << "input error: " << e.what() << "\n";
      return 2;
    }
  }
  r.command = chosen->name == "demo" ? "demo " + o.demo : chosen->name;
  r.inputs = loader.digests();
  r.seed = o.seed;
  r.tolerance = o.tol;
  r.samples = o.samples;

  const std::string text = io::dump(r.to_json());
  out << text;
  if (!o.out.empty()) {
    std::ofstream f(o.out, std::ios::binary);
    if (!f) {
      err << "input error: cannot write --out " << o.out << "\n";
      return 2;
    }
    f << text;
  }
  summarize(r, err);
  return r.pass() ? 0 : 1;
}

}  // namespace fellgpd::cli
