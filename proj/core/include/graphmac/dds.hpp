#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "graphmac/policy.hpp"
#include "graphmac/time.hpp"

namespace graphmac {

// How semantic object names are laid out on the transport.
//   ardent: topic = last path segment, partition = prefix + namespace
//   bouncy: topic = prefix + full name, default ("") partition
enum class MappingMode : std::uint8_t { ardent, bouncy };

std::string_view to_string(MappingMode m);
std::optional<MappingMode> parse_mapping_mode(std::string_view text);

enum class DdsAction : std::uint8_t { publish, subscribe, relay };

std::string_view to_string(DdsAction a);
std::optional<DdsAction> parse_dds_action(std::string_view text);

// Transport prefixes per (object kind, leg). Each (kind, verb) pair expands
// to legs with distinct (action, prefix) pairs so no two semantic verbs ever
// share a transport leg.
namespace prefix {
inline constexpr std::string_view topic = "rt";
inline constexpr std::string_view service_request = "rq";
inline constexpr std::string_view service_reply = "rr";
inline constexpr std::string_view parameter_get_request = "pgq";
inline constexpr std::string_view parameter_get_reply = "pgr";
inline constexpr std::string_view parameter_set_request = "psq";
inline constexpr std::string_view parameter_set_reply = "psr";
inline constexpr std::string_view action_goal_request = "agq";
inline constexpr std::string_view action_goal_reply = "agr";
inline constexpr std::string_view action_cancel_request = "acq";
inline constexpr std::string_view action_cancel_reply = "acr";
inline constexpr std::string_view action_feedback = "af";
}  // namespace prefix

// One concrete transport endpoint a semantic action needs.
struct DdsLeg {
  DdsAction action = DdsAction::publish;
  std::string topic;
  std::string partition;

  bool operator==(const DdsLeg&) const = default;
};

// Expands a concrete, absolute object name. Throws Error(unmappable_kind) for
// a verb that is not legal for the kind.
std::vector<DdsLeg> map_object(ObjectKind kind, std::string_view object, Verb verb, MappingMode mode);

// Pattern-level counterpart used by the compiler: the (topic, partition)
// expression lists whose cross product matches exactly the mapped images of
// the names the attachment matches.
struct LegCriteria {
  DdsAction action = DdsAction::publish;
  std::vector<std::string> topics;
  std::vector<std::string> partitions;
};

// Throws Error(unmappable_pattern) when the ardent split cannot represent the
// glob exactly (a final segment mixing "**" with other characters).
std::vector<LegCriteria> map_attachment(ObjectKind kind, const AttachmentExpression& object, Verb verb,
                                        MappingMode mode);

struct DdsCriteria {
  std::vector<std::string> topics;      // empty: no topic constraint
  std::vector<std::string> partitions;  // empty: default partition only
  std::vector<std::string> tags;        // "key=value" expressions; empty: unconstrained

  bool operator==(const DdsCriteria&) const = default;
};

struct DdsRule {
  Qualifier qualifier = Qualifier::allow;
  std::vector<std::int32_t> domains;  // sorted, unique, non-empty
  std::optional<DdsCriteria> publish;
  std::optional<DdsCriteria> subscribe;
  std::optional<DdsCriteria> relay;
  std::vector<std::string> origins;   // semantic rule ids this rule was compiled from

  const std::optional<DdsCriteria>& criteria(DdsAction action) const;
  std::optional<DdsCriteria>& criteria(DdsAction action);

  bool operator==(const DdsRule&) const = default;
};

struct Grant {
  std::string name;
  std::string subject_name;
  Timestamp not_before;
  Timestamp not_after;
  std::vector<DdsRule> rules;  // order is significant
  Qualifier default_qualifier = Qualifier::deny;

  bool operator==(const Grant&) const = default;
};

struct PermissionsDocument {
  std::vector<Grant> grants;
  std::string source_digest;

  bool operator==(const PermissionsDocument&) const = default;
};

// Checks every structural invariant; throws Error(invalid_document).
void validate(const PermissionsDocument& doc);

// Validating constructor for documents assembled by hand.
PermissionsDocument make_document(std::vector<Grant> grants, std::string source_digest);

struct CompileOptions {
  std::vector<std::int32_t> domains{0};
  std::int32_t validity_days = 365;
  std::optional<Timestamp> not_before;  // defaults to the clock's now
  bool amend_empty_partition = false;
  // Glob expressions matched against each source object attachment's text;
  // empty means every ALLOW rule is amended.
  std::vector<std::string> amend_targets;
};

// Compiles the slice of `tree` applicable to `subject`. Deny-derived rules
// precede allow-derived rules. Throws Error(no_applicable_profile),
// Error(unmappable_pattern).
PermissionsDocument compile_permissions(const PolicyTree& tree, const std::string& subject, MappingMode mode,
                                        const CompileOptions& opts, const Clock& clock = system_clock());

// A one-grant document that allows nothing; used for subjects the policy
// never mentions.
PermissionsDocument deny_all_document(const std::string& subject, const CompileOptions& opts,
                                      const Clock& clock = system_clock());

// Merges adjacent compatible rules where the merged criteria admit no
// (topic, partition) pair that the inputs did not.
PermissionsDocument fold_rules(const PermissionsDocument& doc);

// The (action, topic, partition) expression triples a rule admits; used to
// check that folding neither adds nor removes any.
struct CriteriaPair {
  Qualifier qualifier;
  DdsAction action;
  std::string topic;
  std::string partition;

  auto operator<=>(const CriteriaPair&) const = default;
};
std::vector<CriteriaPair> admitted_pairs(const Grant& grant);

std::string serialize_permissions(const PermissionsDocument& doc);

// Throws Error(malformed_document) or Error(invalid_document).
PermissionsDocument parse_permissions(std::string_view document, const std::string& source_name = {});

std::string grant_name_for(std::string_view subject);

}  // namespace graphmac
