#include "graphmac/eval.hpp"

#include <algorithm>

#include "graphmac/error.hpp"

namespace graphmac {

std::string_view to_string(DecisionReason r) {
  switch (r) {
    case DecisionReason::explicit_allow: return "explicit_allow";
    case DecisionReason::explicit_deny: return "explicit_deny";
    case DecisionReason::default_deny: return "default_deny";
  }
  return "default_deny";
}

std::string to_string(const ProfilePath& path) {
  std::string out;
  for (const auto& name : path) {
    if (!out.empty()) out += "//";
    out += name;
  }
  return out;
}

std::string rule_id(const ProfilePath& path, std::size_t index) {
  return to_string(path) + "#" + std::to_string(index);
}

namespace {

bool attached(const PolicyProfile& p, const std::string& subject) {
  return std::any_of(p.attachments.begin(), p.attachments.end(), [&](const AttachmentExpression& a) {
    return match_attachment(expand_relative(a, subject), subject);
  });
}

template <typename Visit>
void walk_applicable(const PolicyProfile& p, const std::string& subject, ProfilePath& path, Visit&& visit) {
  if (!attached(p, subject)) return;
  path.push_back(p.name);
  visit(p, path);
  for (const auto& c : p.children) walk_applicable(c, subject, path, visit);
  path.pop_back();
}

void require_resolved(const PolicyTree& tree) {
  if (tree.has_imports()) {
    throw Error(ErrorCode::unresolved_imports, "policy tree still contains import statements; resolve them first");
  }
}

bool rooted(const std::string& name) { return !name.empty() && name.front() == '/'; }

}  // namespace

std::vector<ProfilePath> applicable_profiles(const PolicyTree& tree, const std::string& subject) {
  require_resolved(tree);
  std::vector<ProfilePath> out;
  ProfilePath path;
  for (const auto& p : tree.profiles) {
    walk_applicable(p, subject, path, [&](const PolicyProfile&, const ProfilePath& at) { out.push_back(at); });
  }
  return out;
}

std::vector<ApplicableRule> applicable_rules(const PolicyTree& tree, const std::string& subject) {
  require_resolved(tree);
  std::vector<ApplicableRule> out;
  ProfilePath path;
  for (const auto& p : tree.profiles) {
    walk_applicable(p, subject, path, [&](const PolicyProfile& profile, const ProfilePath& at) {
      for (std::size_t i = 0; i < profile.rules.size(); ++i) out.push_back({rule_id(at, i), &profile.rules[i]});
    });
  }
  return out;
}

bool rule_matches(const PolicyRule& rule, const AccessRequest& request) {
  if (rule.kind != request.kind) return false;
  if (!std::binary_search(rule.verbs.begin(), rule.verbs.end(), request.verb)) return false;
  const std::string object = expand_relative(request.object, request.subject);
  return std::any_of(rule.objects.begin(), rule.objects.end(), [&](const AttachmentExpression& a) {
    return match_attachment(expand_relative(a, request.subject), object);
  });
}

Decision evaluate_request(const PolicyTree& tree, const AccessRequest& request) {
  if (!rooted(request.subject)) {
    throw Error(ErrorCode::invalid_request, "subject '" + request.subject + "' must be '/'-rooted");
  }
  if (!rooted(expand_relative(request.object, request.subject))) {
    throw Error(ErrorCode::invalid_request, "object '" + request.object + "' must be '/'-rooted or '~'-relative");
  }

  std::vector<std::string> allows;
  std::vector<std::string> denies;
  for (const auto& ar : applicable_rules(tree, request.subject)) {
    if (!rule_matches(*ar.rule, request)) continue;
    (ar.rule->qualifier == Qualifier::deny ? denies : allows).push_back(ar.id);
  }

  Decision d;
  if (!denies.empty()) {
    d.outcome = Qualifier::deny;
    d.reason = DecisionReason::explicit_deny;
    d.matched_rules = std::move(denies);
  } else if (!allows.empty()) {
    d.outcome = Qualifier::allow;
    d.reason = DecisionReason::explicit_allow;
    d.matched_rules = std::move(allows);
  }
  std::sort(d.matched_rules.begin(), d.matched_rules.end());
  return d;
}

}  // namespace graphmac
