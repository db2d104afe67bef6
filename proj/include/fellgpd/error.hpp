#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fellgpd {

/// Every failure the library can raise. Verification failures that are
/// reported (rather than thrown) use the same names in report entries.
enum class Errc {
  MissingComposite,
  IllegalComposite,
  AssociativityFailure,
  UnitFailure,
  InverseFailure,
  NotAMorphism,
  NotABisection,
  NotASubgroupoid,
  BaseMismatch,
  NumericalDegeneracy,
  NotSurjective,
  NotComposable,
  BundleNotVerified,
  NotSaturated,
  IncidenceViolation,
  NotLiftable,
  InadmissibleWord,
  DomainNotCollapse,
  ActionAxiomViolation,
  NotACovering,
  CocycleIdentityFailure,
  NotAbelian,
  LineDimensionFailure,
  NotNormal,
  NotAbelianKernel,
  Parse,
};

std::string_view errc_name(Errc code) noexcept;

/// Exception carrying an error kind and the offending objects (arrow ids,
/// vertices, basis labels) as a witness.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message, std::vector<std::string> witness = {});

  Errc code() const noexcept { return code_; }
  const std::vector<std::string>& witness() const noexcept { return witness_; }
  std::string witness_string() const;

 private:
  Errc code_;
  std::vector<std::string> witness_;
};

/// Malformed input: names the file, a JSON pointer into it, and what was expected.
class ParseError : public Error {
 public:
  ParseError(std::string file, std::string json_path, std::string expectation);

  const std::string& file() const noexcept { return file_; }
  const std::string& json_path() const noexcept { return path_; }
  const std::string& expectation() const noexcept { return expectation_; }

 private:
  std::string file_;
  std::string path_;
  std::string expectation_;
};

}  // namespace fellgpd
