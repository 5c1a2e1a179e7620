#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace graphmac {

enum class Qualifier : std::uint8_t { allow, deny };

enum class ObjectKind : std::uint8_t { topic, service, parameter, action };

enum class Verb : std::uint8_t { publish, subscribe, relay, call, reply, read, write, feedback, cancel };

std::string_view to_string(Qualifier q);
std::string_view to_string(ObjectKind k);
std::string_view to_string(Verb v);

std::optional<Qualifier> parse_qualifier(std::string_view text);
std::optional<ObjectKind> parse_object_kind(std::string_view text);
std::optional<Verb> parse_verb(std::string_view text);

// Verbs a rule may grant for each object kind, in canonical order.
const std::vector<Verb>& legal_verbs(ObjectKind kind);
bool is_legal(ObjectKind kind, Verb verb);

enum class AttachmentKind : std::uint8_t { exact, glob };

// Binds a profile to subjects or a rule to objects. Patterns are "/"-rooted
// URIs or "~"-relative to the requesting subject.
struct AttachmentExpression {
  std::string pattern;
  AttachmentKind kind = AttachmentKind::exact;

  // Attribute syntax: a "glob:" prefix forces glob kind; otherwise any glob
  // metacharacter makes it a glob. Throws Error(schema_violation).
  static AttachmentExpression parse(std::string_view text);

  // Non-throwing variant; on failure `problem` holds the reason.
  static std::optional<AttachmentExpression> try_parse(std::string_view text, std::string& problem);

  // Inverse of parse(): the attribute/element text that reproduces this value.
  std::string text() const;

  bool operator==(const AttachmentExpression&) const = default;
};

// Expands a leading "~" against `subject` ("~/x" under "/s" is "/s/x").
std::string expand_relative(std::string_view name, std::string_view subject);
AttachmentExpression expand_relative(const AttachmentExpression& expr, std::string_view subject);

bool match_attachment(const AttachmentExpression& expr, std::string_view candidate);

struct PolicyRule {
  Qualifier qualifier = Qualifier::allow;
  ObjectKind kind = ObjectKind::topic;
  std::vector<Verb> verbs;                         // sorted, unique, non-empty
  std::vector<AttachmentExpression> objects;       // non-empty

  bool operator==(const PolicyRule&) const = default;
};

struct PolicyProfile {
  std::string name;
  std::vector<AttachmentExpression> attachments;   // subject binding, non-empty
  std::vector<PolicyRule> rules;
  std::vector<PolicyProfile> children;
  std::vector<std::string> imports;                // empty once resolved

  bool operator==(const PolicyProfile&) const = default;
};

struct PolicyTree {
  std::string version = "1";
  std::vector<PolicyProfile> profiles;
  std::string source_path;

  bool has_imports() const;

  // Structural equality ignores source_path.
  bool operator==(const PolicyTree& other) const {
    return version == other.version && profiles == other.profiles;
  }
};

inline constexpr std::string_view kPolicyVersion = "1";

// Parses a policy document. Schema problems are collected and reported
// together as Error(schema_violation) with one diagnostic each. Imports are
// recorded, not resolved.
PolicyTree parse_policy(std::string_view document, const std::string& source_path = {});

// Canonical serialization; parse_policy(serialize_policy(t)) == t.
std::string serialize_policy(const PolicyTree& tree);

// Returns the bytes at `path` or throws Error(import_not_found).
using ImportLoader = std::function<std::string(const std::string& path)>;

ImportLoader filesystem_loader();

// Splices every import into its importing profile. Import paths are resolved
// relative to the directory of the importing document. An imported document
// is either a <policy> (its profiles become children) or an <abstraction>
// (its rules, profiles and imports are spliced into the importer).
PolicyTree resolve_imports(const PolicyTree& tree, const ImportLoader& loader);

// Reads and parses a policy file, then resolves its imports from disk.
PolicyTree load_policy_file(const std::string& path);

}  // namespace graphmac
