#include <algorithm>
#include <set>

#include "graphmac/dds.hpp"

namespace graphmac {

namespace {

constexpr DdsAction kActions[] = {DdsAction::publish, DdsAction::subscribe, DdsAction::relay};

std::set<std::string> as_set(const std::vector<std::string>& v) { return {v.begin(), v.end()}; }

void append_unique(std::vector<std::string>& into, const std::vector<std::string>& from) {
  for (const auto& s : from) {
    if (std::find(into.begin(), into.end(), s) == into.end()) into.push_back(s);
  }
}

// Two blocks fold only when their partition lists are equal: the merged
// topic list then admits exactly the union of the original (topic, partition)
// pairs. Equal topic lists are not enough, because a request carrying several
// partitions must have all of them covered by one rule, and a merged
// partition list would cover combinations neither input rule did.
bool criteria_foldable(const DdsCriteria& a, const DdsCriteria& b) {
  // An empty topic list means "any topic"; a union would narrow it.
  if (a.topics.empty() != b.topics.empty()) return false;
  return as_set(a.tags) == as_set(b.tags) && as_set(a.partitions) == as_set(b.partitions);
}

bool foldable(const DdsRule& a, const DdsRule& b) {
  if (a.qualifier != b.qualifier || a.domains != b.domains) return false;
  for (DdsAction act : kActions) {
    const auto& ca = a.criteria(act);
    const auto& cb = b.criteria(act);
    if (ca.has_value() != cb.has_value()) return false;
    if (ca && !criteria_foldable(*ca, *cb)) return false;
  }
  return true;
}

void merge_into(DdsRule& a, const DdsRule& b) {
  for (DdsAction act : kActions) {
    auto& ca = a.criteria(act);
    const auto& cb = b.criteria(act);
    if (ca) append_unique(ca->topics, cb->topics);
  }
  append_unique(a.origins, b.origins);
}

}  // namespace

PermissionsDocument fold_rules(const PermissionsDocument& doc) {
  PermissionsDocument out = doc;
  for (auto& grant : out.grants) {
    std::vector<DdsRule> folded;
    folded.reserve(grant.rules.size());
    for (auto& rule : grant.rules) {
      if (!folded.empty() && foldable(folded.back(), rule)) {
        merge_into(folded.back(), rule);
      } else {
        folded.push_back(std::move(rule));
      }
    }
    grant.rules = std::move(folded);
  }
  return out;
}

std::vector<CriteriaPair> admitted_pairs(const Grant& grant) {
  std::vector<CriteriaPair> pairs;
  for (const auto& rule : grant.rules) {
    for (DdsAction act : kActions) {
      const auto& c = rule.criteria(act);
      if (!c) continue;
      const std::vector<std::string> topics = c->topics.empty() ? std::vector<std::string>{"**"} : c->topics;
      const std::vector<std::string> partitions =
          c->partitions.empty() ? std::vector<std::string>{""} : c->partitions;
      for (const auto& t : topics) {
        for (const auto& p : partitions) pairs.push_back({rule.qualifier, act, t, p});
      }
    }
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  return pairs;
}

}  // namespace graphmac
