#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "graphmac/policy.hpp"

namespace graphmac {

// One (subject, verb, object) probe at the semantic layer.
struct AccessRequest {
  std::string subject;
  ObjectKind kind = ObjectKind::topic;
  std::string object;
  Verb verb = Verb::publish;

  bool operator==(const AccessRequest&) const = default;
  auto operator<=>(const AccessRequest&) const = default;
};

enum class DecisionReason : std::uint8_t { explicit_allow, explicit_deny, default_deny };

std::string_view to_string(DecisionReason r);

struct Decision {
  Qualifier outcome = Qualifier::deny;
  DecisionReason reason = DecisionReason::default_deny;
  std::vector<std::string> matched_rules;  // rule ids, sorted

  bool operator==(const Decision&) const = default;
};

// A profile's position in the tree as the names from its root, e.g.
// {"talker", "child"}; printed as "talker//child".
using ProfilePath = std::vector<std::string>;

std::string to_string(const ProfilePath& path);

// Rule identifiers have the form "<profile path>#<index>".
std::string rule_id(const ProfilePath& path, std::size_t index);

struct ApplicableRule {
  std::string id;
  const PolicyRule* rule = nullptr;
};

// Profiles whose own attachments and every ancestor's attachments match the
// subject, in depth-first document order. Throws Error(unresolved_imports).
std::vector<ProfilePath> applicable_profiles(const PolicyTree& tree, const std::string& subject);

// All rules of the applicable profiles. Pointers refer into `tree`.
std::vector<ApplicableRule> applicable_rules(const PolicyTree& tree, const std::string& subject);

// True when some attachment of `rule` matches the request (after expanding
// "~" against the request subject).
bool rule_matches(const PolicyRule& rule, const AccessRequest& request);

// Deny-by-default, deny-overrides evaluation. Relative names in the request
// are expanded against its subject. Throws Error(invalid_request) or
// Error(unresolved_imports).
Decision evaluate_request(const PolicyTree& tree, const AccessRequest& request);

}  // namespace graphmac
