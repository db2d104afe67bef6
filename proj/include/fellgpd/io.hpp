#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <string_view>

#include <json.hpp>

#include "fellgpd/action.hpp"
#include "fellgpd/cocycle.hpp"
#include "fellgpd/fell_bundle.hpp"
#include "fellgpd/graph.hpp"
#include "fellgpd/groupoid.hpp"
#include "fellgpd/morphism.hpp"

namespace fellgpd::io {

using json = nlohmann::json;

/// 64-bit FNV-1a, as 16 lowercase hex digits.
std::string fnv1a64(std::string_view bytes);

/// Deterministic serialization: object keys sorted, doubles printed with %.17g
/// (non-finite values as the strings "inf", "-inf", "nan"), two-space indent.
std::string dump(const json& j);

/// Reads the JSON file formats. A reference to another object (`<ref>`) is
/// either a path, resolved against the directory of the referring file, or
/// the object itself inline. Groupoid files are cached by canonical path, so
/// two files naming the same groupoid file get the same groupoid.
///
/// Malformed input throws ParseError naming the file, a JSON pointer and what
/// was expected there. Validation failures of well-formed tables (a broken
/// composition table, say) throw the library's own errors.
class Loader {
 public:
  /// Every file read so far, keyed by the path as given, with its digest.
  const std::map<std::string, std::string>& digests() const noexcept { return digests_; }

  json read(const std::string& path);

  /// {"arrows", "units", "src", "rng", "inv", "comp": [[g1, g2, g1g2], ...]}
  GroupoidPtr groupoid(const std::string& path);
  /// {"domain": <ref>, "codomain": <ref>, "map": {id: id}}
  GroupoidMorphism morphism(const std::string& path);
  /// {"base": <ref>, "fibers": {h: [names]}, "mul": [[h1, i, h2, j, {k: c}]],
  ///  "star": [[h, i, {k: c}]]}. Basis entries are names or positions; c is
  /// [re, im] or a number. Omitted products and stars are zero.
  BundleTables bundle(const std::string& path);
  /// {"vertices": [...], "edges": [{"id", "from", "to"}]}
  DirectedGraph graph(const std::string& path);
  /// {"domain": <ref>, "codomain": <ref>, "vmap": {}, "emap": {}}
  GraphMorphism graph_morphism(const std::string& path);
  /// {"elements": [...], "mul": [[a, b, ab]], "kernel": [...]}. The identity is
  /// found from the table and moved to the front.
  GroupExtension group(const std::string& path);
  /// {"groupoid": <ref>, "X": [...], "rho": {x: unit}, "act": [[h, x, hx]]}
  GroupoidAction action(const std::string& path);
  /// {"groupoid": <ref>, "omega": [[g1, g2, c]]}; omitted pairs are 1. With
  /// `base` set, the referenced groupoid must have the same arrow names in
  /// the same order and the cocycle is attached to `base`.
  Cocycle cocycle(const std::string& path, const GroupoidPtr& base = nullptr);

 private:
  struct Node;
  GroupoidPtr groupoid_at(const Node& n);
  GroupoidPtr groupoid_ref(const Node& n);
  DirectedGraph graph_at(const Node& n);
  DirectedGraph graph_ref(const Node& n);
  Node open(const std::string& path);

  std::map<std::string, std::string> digests_;
  std::map<std::string, std::shared_ptr<const json>> docs_;
  std::map<std::string, GroupoidPtr> groupoids_;
};

json to_json(const FiniteGroupoid& g);
/// Domain and codomain inline.
json to_json(const GroupoidMorphism& pi);
json to_json(const FellBundle& e);
json to_json(const DirectedGraph& g);
json to_json(const GraphMorphism& phi);
json to_json(const GroupoidAction& a);
json to_json(const Cocycle& omega);
json to_json(const GroupExtension& ext);

json complex_to_json(cplx z);

}  // namespace fellgpd::io
