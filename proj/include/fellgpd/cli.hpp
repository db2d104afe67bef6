#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fellgpd/check.hpp"
#include "fellgpd/io.hpp"

namespace fellgpd::cli {

/// Outcome of one command: checks plus free-form data and notes.
struct Report {
  std::string command;
  std::map<std::string, std::string> inputs;  // path -> FNV-1a digest
  std::uint64_t seed = 0;
  double tolerance = 1e-9;
  std::size_t samples = 100;
  CheckList checks;
  io::json data = io::json::object();
  std::vector<std::string> notes;

  bool pass() const { return all_pass(checks); }
  io::json to_json() const;
};

struct Options {
  double tol = 1e-9;
  double iso_tol = 1e-8;
  std::uint64_t seed = 0;
  std::size_t samples = 100;
  std::string out;

  std::string groupoid, morphism, bundle, cocycle, graph, action, group, word, emit;
  std::size_t depth = 3;
  std::size_t n = 3;
  std::string demo;
};

/// One leaf of the command tree and the library operations it exposes.
struct Command {
  std::string name;  // e.g. "bundle verify"
  std::vector<std::string> operations;
  std::function<Report(const Options&, io::Loader&)> run;
};

const std::vector<Command>& commands();

/// Demo names accepted by `demo <name>`.
const std::vector<std::string>& demo_names();

/// Parses argv (without the program name), runs the command and writes the
/// report to `out` (or to --out) and a summary to `err`. Returns 0 when every
/// check passes, 1 on a verification failure and 2 on malformed input.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fellgpd::cli
