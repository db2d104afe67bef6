#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "fellgpd/action.hpp"
#include "fellgpd/catalog.hpp"
#include "fellgpd/io.hpp"
#include "test_util.hpp"

using namespace fellgpd;
using io::json;

namespace {

const std::string kData = FELLGPD_DATA_DIR;

std::string data(const std::string& name) { return kData + "/" + name; }

/// Writes `j` to a fresh temporary file and returns its path.
std::string temp_file(const std::string& name, const json& j) {
  const auto dir = std::filesystem::temp_directory_path() / "fellgpd_io_test";
  std::filesystem::create_directories(dir);
  const auto p = (dir / name).string();
  std::ofstream(p) << io::dump(j);
  return p;
}

/// Expects a ParseError at the given JSON pointer.
void expect_parse_error(const std::function<void()>& f, const std::string& pointer) {
  try {
    f();
    ADD_FAILURE() << "no ParseError, expected one at \"" << pointer << "\"";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.json_path(), pointer) << e.what();
    EXPECT_FALSE(e.expectation().empty());
  }
}

bool same_tables(const FiniteGroupoid& a, const FiniteGroupoid& b) {
  const auto ta = a.tables(), tb = b.tables();
  return ta.names == tb.names && ta.is_unit == tb.is_unit && ta.src == tb.src && ta.rng == tb.rng &&
         ta.inv == tb.inv && ta.comp == tb.comp;
}

}  // namespace

TEST(Digest, KnownFnvVectors) {
  EXPECT_EQ(io::fnv1a64(""), "cbf29ce484222325");
  EXPECT_EQ(io::fnv1a64("a"), "af63dc4c8601ec8c");
  EXPECT_EQ(io::fnv1a64("foobar"), "85944171f73967e8");
}

TEST(Dump, SortedKeysAndSeventeenDigits) {
  json j = {{"b", 0.1}, {"a", json::array({1, 2})}, {"c", std::numeric_limits<double>::infinity()}};
  EXPECT_EQ(io::dump(j), "{\n  \"a\": [1, 2],\n  \"b\": 0.10000000000000001,\n  \"c\": \"inf\"\n}\n");
  EXPECT_EQ(json::parse(io::dump(j))["b"].get<double>(), 0.1);
}

TEST(Corpus, GroupoidsMatchCatalog) {
  io::Loader l;
  EXPECT_TRUE(same_tables(*l.groupoid(data("pair.json")), *catalog::pair_groupoid(std::vector<std::string>{"1", "2"})));
  EXPECT_TRUE(same_tables(*l.groupoid(data("z3.json")), *catalog::cyclic_group(3)));
  EXPECT_TRUE(same_tables(*l.groupoid(data("heis3.json")), *catalog::heisenberg_group(3)));
  EXPECT_EQ(l.digests().size(), 3u);
}

TEST(Corpus, MorphismsShareGroupoidFiles) {
  io::Loader l;
  const auto pi = l.morphism(data("heis3_quotient.json"));
  const auto ref = catalog::heisenberg_quotient(3);
  ASSERT_EQ(pi.domain()->size(), 27u);
  for (std::size_t i = 0; i < 27; ++i) EXPECT_EQ(idx(pi(arrow_at(i))), idx(ref(arrow_at(i))));
  // The same file read through another reference is the same object.
  EXPECT_EQ(l.groupoid(data("heis3.json")), pi.domain());
  const auto id = l.morphism(data("pair_identity.json"));
  EXPECT_EQ(id.domain(), id.codomain());
}

TEST(Corpus, GraphMorphismAndWord) {
  io::Loader l;
  const auto phi = l.graph_morphism(data("cuntz.json"));
  const auto ref = catalog::cuntz_example();
  EXPECT_EQ(phi.vmap, ref.vmap);
  EXPECT_EQ(phi.emap, ref.emap);
  EXPECT_EQ(phi.domain.edge(2).id, "c");
}

TEST(Corpus, GroupFileMovesIdentityFirst) {
  json g = {{"elements", {"b", "e"}},
            {"mul", {{"e", "e", "e"}, {"e", "b", "b"}, {"b", "e", "b"}, {"b", "b", "e"}}},
            {"kernel", {"e"}}};
  io::Loader l;
  const auto ext = l.group(temp_file("z2_group.json", g));
  EXPECT_EQ(ext.g->names(), (std::vector<std::string>{"e", "b"}));
  EXPECT_TRUE(ext.g->is_unit(ext.g->at("e")));
  const auto heis = l.group(data("heis2_group.json"));
  EXPECT_TRUE(same_tables(*heis.g, *catalog::heisenberg_group(2)));
  EXPECT_EQ(heis.kernel.size(), 2u);
}

TEST(Corpus, ActionAndCocycle) {
  io::Loader l;
  const auto a = l.action(data("flip_action.json"));
  check_action(a);
  EXPECT_EQ(a.points[*a.apply(a.h->at("1"), 0)], "y");
  const auto zsq = l.groupoid(data("z2sq.json"));
  const auto w = l.cocycle(data("z2sq_bicharacter.json"), zsq);
  EXPECT_EQ(w.base(), zsq);
  EXPECT_NEAR(std::abs(w(zsq->at("(1,0)"), zsq->at("(0,1)")) - cplx(-1.0, 0.0)), 0.0, 1e-15);
  EXPECT_TRUE(all_pass(cocycle_check(w)));
}

TEST(RoundTrip, WritersAndReadersAgree) {
  io::Loader l;
  const auto pi = catalog::heisenberg_quotient(2);
  const auto back = l.morphism(temp_file("m.json", io::to_json(pi)));
  EXPECT_TRUE(same_tables(*back.domain(), *pi.domain()));
  for (std::size_t i = 0; i < 8; ++i) EXPECT_EQ(idx(back(arrow_at(i))), idx(pi(arrow_at(i))));

  const FellBundle e = build_bundle(pi, pullback_cocycle(bicharacter_cocycle(pi.codomain(), 2), pi));
  const BundleTables t = l.bundle(temp_file("b.json", io::to_json(e)));
  ASSERT_EQ(t.basis, e.tables().basis);
  for (std::size_t p = 0; p < t.mul.size(); ++p)
    for (std::size_t k = 0; k < t.mul[p].size(); ++k) {
      const auto& x = t.mul[p][k];
      const auto& y = e.tables().mul[p][k];
      ASSERT_EQ(x.size(), y.size());
      for (std::size_t m = 0; m < x.size(); ++m) {
        EXPECT_EQ(x[m].first, y[m].first);
        EXPECT_EQ(x[m].second, y[m].second);
      }
    }

  const auto phi = catalog::cuntz_example();
  const auto gm = l.graph_morphism(temp_file("g.json", io::to_json(phi)));
  EXPECT_EQ(gm.emap, phi.emap);
}

TEST(Errors, MalformedInputNamesThePointer) {
  io::Loader l;
  expect_parse_error([&] { l.groupoid(data("negative/malformed_groupoid.json")); }, "");
  json g = io::to_json(*catalog::pair_groupoid(2));
  g["comp"][3][2] = "nope";
  expect_parse_error([&] { l.groupoid(temp_file("bad_id.json", g)); }, "/comp/3/2");
  g = io::to_json(*catalog::pair_groupoid(2));
  g["src"].erase("1");
  expect_parse_error([&] { l.groupoid(temp_file("no_src.json", g)); }, "/src");
  expect_parse_error([&] { l.groupoid(kData + "/does_not_exist.json"); }, "");
  const auto p = temp_file("not_json.json", json::object());
  std::ofstream(p) << "{ \"arrows\": [";
  expect_parse_error([&] { l.groupoid(p); }, "");

  json m = {{"domain", io::to_json(*catalog::cyclic_group(2))},
            {"codomain", io::to_json(*catalog::cyclic_group(1))},
            {"map", {{"0", "0"}}}};
  expect_parse_error([&] { l.morphism(temp_file("short_map.json", m)); }, "/map");
  m["map"]["1"] = 7;
  expect_parse_error([&] { l.morphism(temp_file("bad_map.json", m)); }, "/map/1");

  json b = io::to_json(line_bundle(Cocycle::trivial(catalog::cyclic_group(2))));
  b["mul"][0][1] = "missing";
  expect_parse_error([&] { l.bundle(temp_file("bad_bundle.json", b)); }, "/mul/0/1");
}

TEST(Errors, BrokenTablesKeepTheirKind) {
  io::Loader l;
  auto e = fixtures::expect_error([&] { l.groupoid(data("negative/bad_composition.json")); },
                                  Errc::IllegalComposite);
  EXPECT_EQ(e->witness(), (std::vector<std::string>{"(1,2)", "(2,1)", "2"}));
}
