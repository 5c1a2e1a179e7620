#include "graphmac/pdp.hpp"

#include <algorithm>

#include "graphmac/glob.hpp"

namespace graphmac {

std::string_view to_string(PdpValue v) {
  switch (v) {
    case PdpValue::allow: return "ALLOW";
    case PdpValue::deny: return "DENY";
    case PdpValue::error: return "ERROR";
  }
  return "ERROR";
}

namespace {

bool any_matches(const std::vector<std::string>& expressions, std::string_view value) {
  return std::any_of(expressions.begin(), expressions.end(),
                     [&](const std::string& e) { return glob_match(e, value); });
}

bool all_covered(const std::vector<std::string>& expressions, const std::vector<std::string>& values) {
  return std::all_of(values.begin(), values.end(), [&](const std::string& v) { return any_matches(expressions, v); });
}

}  // namespace

bool check_criteria(const DdsCriteria& c, const TransportRequest& request) {
  if (!c.topics.empty() && !any_matches(c.topics, request.topic)) return false;
  if (c.partitions.empty()) {
    if (request.partitions != std::vector<std::string>{""}) return false;
  } else if (request.partitions.empty() || !all_covered(c.partitions, request.partitions)) {
    return false;
  }
  if (!c.tags.empty() && !all_covered(c.tags, request.tags)) return false;
  return true;
}

std::optional<std::size_t> check_rules(const std::vector<DdsRule>& rules, const TransportRequest& request) {
  for (std::size_t i = 0; i < rules.size(); ++i) {
    const auto& r = rules[i];
    if (!std::binary_search(r.domains.begin(), r.domains.end(), request.domain)) continue;
    const auto& c = r.criteria(request.action);
    if (c && check_criteria(*c, request)) return i;
  }
  return std::nullopt;
}

PdpOutcome pdp_evaluate(const PermissionsDocument& doc, const TransportRequest& request) {
  for (std::size_t g = 0; g < doc.grants.size(); ++g) {
    const auto& grant = doc.grants[g];
    if (grant.subject_name != request.subject_name) continue;
    if (request.at < grant.not_before || grant.not_after < request.at) continue;
    const auto hit = check_rules(grant.rules, request);
    const Qualifier q = hit ? grant.rules[*hit].qualifier : grant.default_qualifier;
    return {q == Qualifier::allow ? PdpValue::allow : PdpValue::deny, g, hit};
  }
  return {};
}

}  // namespace graphmac
