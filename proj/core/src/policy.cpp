#include "graphmac/policy.hpp"

#include <array>

#include "graphmac/error.hpp"
#include "graphmac/glob.hpp"

namespace graphmac {

namespace {

constexpr std::array<std::string_view, 2> kQualifierNames{"ALLOW", "DENY"};
constexpr std::array<std::string_view, 4> kKindNames{"topic", "service", "parameter", "action"};
constexpr std::array<std::string_view, 9> kVerbNames{"publish", "subscribe", "relay", "call", "reply",
                                                     "read",    "write",     "feedback", "cancel"};

template <typename E, std::size_t N>
std::optional<E> lookup(const std::array<std::string_view, N>& names, std::string_view text) {
  for (std::size_t i = 0; i < N; ++i) {
    if (names[i] == text) return static_cast<E>(i);
  }
  return std::nullopt;
}

constexpr std::string_view kGlobPrefix = "glob:";

}  // namespace

std::string_view to_string(Qualifier q) { return kQualifierNames[static_cast<std::size_t>(q)]; }
std::string_view to_string(ObjectKind k) { return kKindNames[static_cast<std::size_t>(k)]; }
std::string_view to_string(Verb v) { return kVerbNames[static_cast<std::size_t>(v)]; }

std::optional<Qualifier> parse_qualifier(std::string_view text) { return lookup<Qualifier>(kQualifierNames, text); }
std::optional<ObjectKind> parse_object_kind(std::string_view text) { return lookup<ObjectKind>(kKindNames, text); }
std::optional<Verb> parse_verb(std::string_view text) { return lookup<Verb>(kVerbNames, text); }

const std::vector<Verb>& legal_verbs(ObjectKind kind) {
  static const std::vector<Verb> topic{Verb::publish, Verb::subscribe, Verb::relay};
  static const std::vector<Verb> service{Verb::call, Verb::reply};
  static const std::vector<Verb> parameter{Verb::read, Verb::write};
  static const std::vector<Verb> action{Verb::call, Verb::feedback, Verb::cancel};
  switch (kind) {
    case ObjectKind::topic: return topic;
    case ObjectKind::service: return service;
    case ObjectKind::parameter: return parameter;
    case ObjectKind::action: return action;
  }
  return topic;
}

bool is_legal(ObjectKind kind, Verb verb) {
  for (Verb v : legal_verbs(kind)) {
    if (v == verb) return true;
  }
  return false;
}

std::optional<AttachmentExpression> AttachmentExpression::try_parse(std::string_view text, std::string& problem) {
  AttachmentExpression expr;
  if (text.starts_with(kGlobPrefix)) {
    expr.kind = AttachmentKind::glob;
    expr.pattern = std::string(text.substr(kGlobPrefix.size()));
  } else {
    expr.kind = has_glob_metachar(text) ? AttachmentKind::glob : AttachmentKind::exact;
    expr.pattern = std::string(text);
  }
  if (expr.pattern.empty()) {
    problem = "empty attachment expression";
    return std::nullopt;
  }
  if (expr.pattern.front() != '/' && expr.pattern.front() != '~') {
    problem = "attachment '" + expr.pattern + "' must begin with '/' or '~'";
    return std::nullopt;
  }
  if (expr.kind == AttachmentKind::glob) {
    if (auto bad = glob_problem(expr.pattern)) {
      problem = "attachment '" + expr.pattern + "': " + *bad;
      return std::nullopt;
    }
  }
  return expr;
}

AttachmentExpression AttachmentExpression::parse(std::string_view text) {
  std::string problem;
  auto expr = try_parse(text, problem);
  if (!expr) throw Error(ErrorCode::schema_violation, problem);
  return std::move(*expr);
}

std::string AttachmentExpression::text() const {
  if (kind == AttachmentKind::glob && !has_glob_metachar(pattern)) {
    return std::string(kGlobPrefix) + pattern;
  }
  return pattern;
}

std::string expand_relative(std::string_view name, std::string_view subject) {
  if (name.empty() || name.front() != '~') return std::string(name);
  std::string out(subject);
  if (out.size() > 1 && out.back() == '/') out.pop_back();
  if (name.size() > 1) {
    if (out == "/") out.clear();
    out.append(name.substr(1));
  }
  return out;
}

AttachmentExpression expand_relative(const AttachmentExpression& expr, std::string_view subject) {
  if (!expr.pattern.starts_with('~')) return expr;
  return AttachmentExpression{expand_relative(expr.pattern, subject), expr.kind};
}

bool match_attachment(const AttachmentExpression& expr, std::string_view candidate) {
  if (expr.kind == AttachmentKind::exact) return expr.pattern == candidate;
  return glob_match(expr.pattern, candidate);
}

bool PolicyTree::has_imports() const {
  std::function<bool(const PolicyProfile&)> visit = [&](const PolicyProfile& p) {
    if (!p.imports.empty()) return true;
    for (const auto& c : p.children) {
      if (visit(c)) return true;
    }
    return false;
  };
  for (const auto& p : profiles) {
    if (visit(p)) return true;
  }
  return false;
}

}  // namespace graphmac
