#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace graphmac {

enum class ErrorCode : std::uint8_t {
  malformed_document,
  schema_violation,
  unsupported_version,
  import_cycle,
  import_not_found,
  unresolved_imports,
  invalid_request,
  no_applicable_profile,
  unmappable_kind,
  unmappable_pattern,
  invalid_document,
  invalid_config,
  already_initialized,
  not_initialized,
  duplicate_package,
  unknown_package,
  not_built,
  io_failure,
  unknown_signer,
  malformed_artifact,
  invalid_scenario,
  missing_document,
  domain_mismatch,
};

std::string_view to_string(ErrorCode code);

// A positioned message attached to parse and schema errors. Line and column
// are 1-based; zero means unknown.
struct Diagnostic {
  std::string source;
  std::uint32_t line = 0;
  std::uint32_t column = 0;
  std::string message;

  std::string str() const;
  bool operator==(const Diagnostic&) const = default;
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);
  Error(ErrorCode code, const std::string& message, std::vector<Diagnostic> diagnostics);

  ErrorCode code() const noexcept { return code_; }
  const std::vector<Diagnostic>& diagnostics() const noexcept { return diagnostics_; }

 private:
  ErrorCode code_;
  std::vector<Diagnostic> diagnostics_;
};

}  // namespace graphmac
