#include "fellgpd/error.hpp"

namespace fellgpd {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::MissingComposite: return "MissingComposite";
    case Errc::IllegalComposite: return "IllegalComposite";
    case Errc::AssociativityFailure: return "AssociativityFailure";
    case Errc::UnitFailure: return "UnitFailure";
    case Errc::InverseFailure: return "InverseFailure";
    case Errc::NotAMorphism: return "NotAMorphism";
    case Errc::NotABisection: return "NotABisection";
    case Errc::NotASubgroupoid: return "NotASubgroupoid";
    case Errc::BaseMismatch: return "BaseMismatch";
    case Errc::NumericalDegeneracy: return "NumericalDegeneracy";
    case Errc::NotSurjective: return "NotSurjective";
    case Errc::NotComposable: return "NotComposable";
    case Errc::BundleNotVerified: return "BundleNotVerified";
    case Errc::NotSaturated: return "NotSaturated";
    case Errc::IncidenceViolation: return "IncidenceViolation";
    case Errc::NotLiftable: return "NotLiftable";
    case Errc::InadmissibleWord: return "InadmissibleWord";
    case Errc::DomainNotCollapse: return "DomainNotCollapse";
    case Errc::ActionAxiomViolation: return "ActionAxiomViolation";
    case Errc::NotACovering: return "NotACovering";
    case Errc::CocycleIdentityFailure: return "CocycleIdentityFailure";
    case Errc::NotAbelian: return "NotAbelian";
    case Errc::LineDimensionFailure: return "LineDimensionFailure";
    case Errc::NotNormal: return "NotNormal";
    case Errc::NotAbelianKernel: return "NotAbelianKernel";
    case Errc::Parse: return "ParseError";
  }
  return "Unknown";
}

namespace {

std::string compose_message(Errc code, const std::string& message,
                            const std::vector<std::string>& witness) {
  std::string out(errc_name(code));
  out += ": ";
  out += message;
  if (!witness.empty()) {
    out += " [";
    for (std::size_t i = 0; i < witness.size(); ++i) {
      if (i) out += ", ";
      out += witness[i];
    }
    out += "]";
  }
  return out;
}

}  // namespace

Error::Error(Errc code, const std::string& message, std::vector<std::string> witness)
    : std::runtime_error(compose_message(code, message, witness)),
      code_(code),
      witness_(std::move(witness)) {}

std::string Error::witness_string() const {
  std::string out;
  for (std::size_t i = 0; i < witness_.size(); ++i) {
    if (i) out += ", ";
    out += witness_[i];
  }
  return out;
}

ParseError::ParseError(std::string file, std::string json_path, std::string expectation)
    : Error(Errc::Parse, file + " at " + (json_path.empty() ? "/" : json_path) + ": " + expectation),
      file_(std::move(file)),
      path_(std::move(json_path)),
      expectation_(std::move(expectation)) {}

}  // namespace fellgpd
