#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "graphmac/policy.hpp"
#include "xml.hpp"

namespace graphmac::detail {

// Content of a document that can be spliced into a profile by an import.
struct PolicyFragment {
  std::vector<PolicyRule> rules;
  std::vector<PolicyProfile> profiles;
  std::vector<std::string> imports;
};

PolicyFragment read_fragment(const xml::Element& root, const std::string& source_path);

// Accepts either a <policy> or an <abstraction> root.
PolicyFragment parse_fragment(std::string_view document, const std::string& source_path);

bool valid_profile_name(std::string_view name);

}  // namespace graphmac::detail
