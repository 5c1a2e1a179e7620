#include "graphmac/error.hpp"

#include <sstream>

namespace graphmac {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::malformed_document: return "MalformedDocument";
    case ErrorCode::schema_violation: return "SchemaViolation";
    case ErrorCode::unsupported_version: return "UnsupportedVersion";
    case ErrorCode::import_cycle: return "ImportCycle";
    case ErrorCode::import_not_found: return "ImportNotFound";
    case ErrorCode::unresolved_imports: return "UnresolvedImports";
    case ErrorCode::invalid_request: return "InvalidRequest";
    case ErrorCode::no_applicable_profile: return "NoApplicableProfile";
    case ErrorCode::unmappable_kind: return "UnmappableKind";
    case ErrorCode::unmappable_pattern: return "UnmappablePattern";
    case ErrorCode::invalid_document: return "InvalidDocument";
    case ErrorCode::invalid_config: return "InvalidConfig";
    case ErrorCode::already_initialized: return "AlreadyInitialized";
    case ErrorCode::not_initialized: return "NotInitialized";
    case ErrorCode::duplicate_package: return "DuplicatePackage";
    case ErrorCode::unknown_package: return "UnknownPackage";
    case ErrorCode::not_built: return "NotBuilt";
    case ErrorCode::io_failure: return "IoFailure";
    case ErrorCode::unknown_signer: return "UnknownSigner";
    case ErrorCode::malformed_artifact: return "MalformedArtifact";
    case ErrorCode::invalid_scenario: return "InvalidScenario";
    case ErrorCode::missing_document: return "MissingDocument";
    case ErrorCode::domain_mismatch: return "DomainMismatch";
  }
  return "Unknown";
}

std::string Diagnostic::str() const {
  std::ostringstream out;
  out << (source.empty() ? "<input>" : source);
  if (line != 0) {
    out << ':' << line << ':' << column;
  }
  out << ": " << message;
  return out.str();
}

namespace {

std::string compose(ErrorCode code, const std::string& message,
                    const std::vector<Diagnostic>& diagnostics) {
  std::string text = std::string(to_string(code)) + ": " + message;
  for (const auto& d : diagnostics) {
    text += "\n  ";
    text += d.str();
  }
  return text;
}

}  // namespace

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(compose(code, message, {})), code_(code) {}

Error::Error(ErrorCode code, const std::string& message, std::vector<Diagnostic> diagnostics)
    : std::runtime_error(compose(code, message, diagnostics)),
      code_(code),
      diagnostics_(std::move(diagnostics)) {}

}  // namespace graphmac
