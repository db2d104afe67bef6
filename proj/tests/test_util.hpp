#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "fellgpd/error.hpp"
#include "fellgpd/groupoid.hpp"

namespace fellgpd::fixtures {

/// Runs f, expects an Error of the given kind, returns it for witness checks.
inline std::optional<Error> expect_error(const std::function<void()>& f, Errc code) {
  try {
    f();
  } catch (const Error& e) {
    EXPECT_EQ(errc_name(e.code()), errc_name(code)) << e.what();
    return e;
  }
  ADD_FAILURE() << "expected " << errc_name(code) << " but nothing was thrown";
  return std::nullopt;
}

/// Name-keyed tables of the two-point pair groupoid: units "1","2", arrows
/// "12" (from 2 to 1) and "21".
inline RawGroupoid raw_pair() {
  RawGroupoid r;
  r.arrows = {"1", "2", "12", "21"};
  r.units = {"1", "2"};
  r.src = {{"1", "1"}, {"2", "2"}, {"12", "2"}, {"21", "1"}};
  r.rng = {{"1", "1"}, {"2", "2"}, {"12", "1"}, {"21", "2"}};
  r.inv = {{"1", "1"}, {"2", "2"}, {"12", "21"}, {"21", "12"}};
  r.comp = {{"1", "1", "1"},   {"2", "2", "2"},   {"1", "12", "12"}, {"12", "2", "12"},
            {"2", "21", "21"}, {"21", "1", "21"}, {"12", "21", "1"}, {"21", "12", "2"}};
  return r;
}

/// Z_3 = {e, g, h} with g² = h.
inline RawGroupoid raw_z3() {
  RawGroupoid r;
  r.arrows = {"e", "g", "h"};
  r.units = {"e"};
  for (const auto& a : r.arrows) {
    r.src[a] = "e";
    r.rng[a] = "e";
  }
  r.inv = {{"e", "e"}, {"g", "h"}, {"h", "g"}};
  const std::vector<std::string> el{"e", "g", "h"};
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) r.comp.push_back({el[i], el[j], el[(i + j) % 3]});
  return r;
}

inline void set_comp(RawGroupoid& r, const std::string& a, const std::string& b, const std::string& ab) {
  for (auto& t : r.comp)
    if (t[0] == a && t[1] == b) t[2] = ab;
}

}  // namespace fellgpd::fixtures
