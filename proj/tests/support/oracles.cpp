#include "oracles.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "graphmac/pdp.hpp"

namespace graphmac::testing {

namespace {

// Position just past the ']' closing a set that opens at `i`, or npos.
std::size_t close_of_set(std::string_view p, std::size_t i) {
  std::size_t j = i + 1;
  if (j < p.size() && (p[j] == '!' || p[j] == '^')) ++j;
  if (j < p.size() && p[j] == ']') ++j;  // a leading ']' is a member
  for (; j < p.size(); ++j) {
    if (p[j] == ']') return j + 1;
  }
  return std::string_view::npos;
}

bool in_set(std::string_view body, char c) {
  bool negate = false;
  if (!body.empty() && (body[0] == '!' || body[0] == '^')) {
    negate = true;
    body.remove_prefix(1);
  }
  bool hit = false;
  for (std::size_t k = 0; k < body.size(); ++k) {
    if (k + 2 < body.size() && body[k + 1] == '-') {
      if (body[k] <= c && c <= body[k + 2]) hit = true;
      k += 2;
    } else if (body[k] == c) {
      hit = true;
    }
  }
  return hit != negate;
}

std::string expand(std::string_view name, std::string_view subject) {
  if (name.empty() || name[0] != '~') return std::string(name);
  if (name.size() == 1) return std::string(subject);
  return std::string(subject == "/" ? "" : subject) + std::string(name.substr(1));
}

bool oracle_attach(const AttachmentExpression& e, std::string_view candidate, std::string_view subject) {
  const std::string pattern = expand(e.pattern, subject);
  return e.kind == AttachmentKind::exact ? pattern == candidate : oracle_glob(pattern, candidate);
}

}  // namespace

bool oracle_glob(std::string_view p, std::string_view t) {
  if (p.empty()) return t.empty();
  if (p[0] == '*') {
    std::size_t stars = 0;
    while (stars < p.size() && p[stars] == '*') ++stars;
    const std::string_view rest = p.substr(stars);
    for (std::size_t k = 0; k <= t.size(); ++k) {
      if (oracle_glob(rest, t.substr(k))) return true;
      if (k < t.size() && t[k] == '/' && stars < 2) return false;
    }
    return false;
  }
  if (t.empty()) return false;
  if (p[0] == '?') return t[0] != '/' && oracle_glob(p.substr(1), t.substr(1));
  if (p[0] == '[') {
    const std::size_t end = close_of_set(p, 0);
    if (end != std::string_view::npos) {
      return t[0] != '/' && in_set(p.substr(1, end - 2), t[0]) && oracle_glob(p.substr(end), t.substr(1));
    }
  }
  return p[0] == t[0] && oracle_glob(p.substr(1), t.substr(1));
}

Decision oracle_evaluate(const PolicyTree& tree, const AccessRequest& req) {
  struct Entry {
    std::string id;
    const PolicyRule* rule;
  };
  std::vector<Entry> everything;
  std::function<void(const PolicyProfile&, std::vector<const PolicyProfile*>)> walk =
      [&](const PolicyProfile& p, std::vector<const PolicyProfile*> chain) {
        chain.push_back(&p);
        bool gate = true;
        for (const auto* level : chain) {
          bool any = false;
          for (const auto& a : level->attachments) any = any || oracle_attach(a, req.subject, req.subject);
          gate = gate && any;
        }
        std::string path;
        for (const auto* level : chain) path += (path.empty() ? "" : "//") + level->name;
        for (std::size_t i = 0; i < p.rules.size(); ++i) {
          if (gate) everything.push_back({path + "#" + std::to_string(i), &p.rules[i]});
        }
        for (const auto& c : p.children) walk(c, chain);
      };
  for (const auto& p : tree.profiles) walk(p, {});

  std::vector<std::string> allow, deny;
  const std::string object = expand(req.object, req.subject);
  for (const auto& e : everything) {
    const PolicyRule& r = *e.rule;
    if (r.kind != req.kind) continue;
    if (std::find(r.verbs.begin(), r.verbs.end(), req.verb) == r.verbs.end()) continue;
    bool hit = false;
    for (const auto& o : r.objects) hit = hit || oracle_attach(o, object, req.subject);
    if (!hit) continue;
    (r.qualifier == Qualifier::deny ? deny : allow).push_back(e.id);
  }
  Decision d;
  if (!deny.empty()) {
    d = {Qualifier::deny, DecisionReason::explicit_deny, deny};
  } else if (!allow.empty()) {
    d = {Qualifier::allow, DecisionReason::explicit_allow, allow};
  }
  std::sort(d.matched_rules.begin(), d.matched_rules.end());
  return d;
}

std::vector<AccessRequest> Universe::probes() const {
  std::vector<AccessRequest> out;
  for (const auto& s : subjects) {
    for (const auto& [kind, name] : objects) {
      for (Verb v : legal_verbs(kind)) out.push_back({s, kind, name, v});
    }
  }
  return out;
}

const Universe& default_universe() {
  static const Universe u = [] {
    Universe u;
    u.subjects = {"/a", "/b", "/ns/a", "/ns/b", "/ns/sub/c"};
    for (const char* t : {"/x", "/y", "/ns/x", "/ns/y", "/ns/sub/x"}) u.objects.emplace_back(ObjectKind::topic, t);
    for (const char* s : {"/x", "/ns/x"}) u.objects.emplace_back(ObjectKind::service, s);
    for (const auto& s : u.subjects) u.objects.emplace_back(ObjectKind::service, s + "/srv");
    for (const char* p : {"/p", "/ns/p"}) u.objects.emplace_back(ObjectKind::parameter, p);
    for (const char* a : {"/act", "/ns/act"}) u.objects.emplace_back(ObjectKind::action, a);
    return u;
  }();
  return u;
}

namespace {

template <typename T>
const T& pick(std::mt19937_64& rng, const std::vector<T>& items) {
  return items[std::uniform_int_distribution<std::size_t>(0, items.size() - 1)(rng)];
}

bool coin(std::mt19937_64& rng, double p) { return std::bernoulli_distribution(p)(rng); }

AttachmentExpression attach(const std::string& text) { return AttachmentExpression::parse(text); }

const std::vector<std::string>& subject_patterns() {
  static const std::vector<std::string> v = {"/a", "/b", "/ns/a", "/ns/b", "/ns/sub/c", "/*", "/ns/*",
                                             "/**", "/ns/**", "/?", "/[ab]", "/n?/[!a]", "/ns/*/c", "/zzz"};
  return v;
}

std::vector<std::string> object_patterns(ObjectKind kind) {
  std::vector<std::string> v = {"/*", "/**", "/ns/*", "/ns/**", "/n?/*", "/*/x", "/ns/**/x"};
  for (const auto& [k, name] : default_universe().objects) {
    if (k == kind && name.find("/srv") == std::string::npos) v.push_back(name);
  }
  switch (kind) {
    case ObjectKind::topic: v.insert(v.end(), {"/[xy]", "/ns/?", "/ns/[!x]"}); break;
    case ObjectKind::service: v.insert(v.end(), {"~/srv", "~/*", "/*/srv", "/ns/*/srv", "/b/srv"}); break;
    case ObjectKind::parameter: v.insert(v.end(), {"/[pq]", "/n*/p"}); break;
    case ObjectKind::action: v.insert(v.end(), {"/a?t", "/ns/a*"}); break;
  }
  return v;
}

PolicyRule random_rule(std::mt19937_64& rng) {
  static const std::vector<ObjectKind> kinds = {ObjectKind::topic, ObjectKind::service, ObjectKind::parameter,
                                                ObjectKind::action};
  PolicyRule r;
  r.qualifier = coin(rng, 0.3) ? Qualifier::deny : Qualifier::allow;
  r.kind = pick(rng, kinds);
  for (Verb v : legal_verbs(r.kind)) {
    if (coin(rng, 0.5)) r.verbs.push_back(v);
  }
  if (r.verbs.empty()) r.verbs.push_back(pick(rng, legal_verbs(r.kind)));
  const auto pool = object_patterns(r.kind);
  const int n = std::uniform_int_distribution<int>(1, 3)(rng);
  for (int i = 0; i < n; ++i) {
    auto e = attach(pick(rng, pool));
    if (std::find(r.objects.begin(), r.objects.end(), e) == r.objects.end()) r.objects.push_back(e);
  }
  return r;
}

}  // namespace

PolicyTree random_policy(std::mt19937_64& rng, const GenLimits& limits) {
  const int n_profiles = std::uniform_int_distribution<int>(1, limits.max_profiles)(rng);
  const int n_rules = std::uniform_int_distribution<int>(0, limits.max_rules)(rng);

  // Build a flat parent table first, then materialize the nesting.
  std::vector<int> parent(n_profiles, -1);
  for (int i = 1; i < n_profiles; ++i) {
    parent[i] = coin(rng, 0.5) ? std::uniform_int_distribution<int>(0, i - 1)(rng) : -1;
  }
  std::vector<PolicyProfile> flat(n_profiles);
  for (int i = 0; i < n_profiles; ++i) {
    flat[i].name = "p" + std::to_string(i);
    const int n_attach = coin(rng, 0.3) ? 2 : 1;
    for (int k = 0; k < n_attach; ++k) {
      auto e = attach(pick(rng, subject_patterns()));
      if (std::find(flat[i].attachments.begin(), flat[i].attachments.end(), e) == flat[i].attachments.end()) {
        flat[i].attachments.push_back(e);
      }
    }
  }
  for (int r = 0; r < n_rules; ++r) {
    flat[std::uniform_int_distribution<int>(0, n_profiles - 1)(rng)].rules.push_back(random_rule(rng));
  }
  // Children have higher indices than parents, so fold from the back.
  for (int i = n_profiles - 1; i > 0; --i) {
    if (parent[i] >= 0) flat[parent[i]].children.insert(flat[parent[i]].children.begin(), std::move(flat[i]));
  }
  PolicyTree tree;
  for (int i = 0; i < n_profiles; ++i) {
    if (parent[i] < 0) tree.profiles.push_back(std::move(flat[i]));
  }
  return tree;
}

PermissionsDocument force_merge(const PermissionsDocument& doc, std::size_t first, std::size_t second) {
  PermissionsDocument out = doc;
  auto& rules = out.grants.at(0).rules;
  DdsRule& a = rules.at(first);
  const DdsRule b = rules.at(second);
  auto append = [](std::vector<std::string>& into, const std::vector<std::string>& from) {
    for (const auto& s : from) {
      if (std::find(into.begin(), into.end(), s) == into.end()) into.push_back(s);
    }
  };
  for (DdsAction act : {DdsAction::publish, DdsAction::subscribe, DdsAction::relay}) {
    const auto& cb = b.criteria(act);
    if (!cb) continue;
    auto& ca = a.criteria(act);
    if (!ca) ca = DdsCriteria{};
    append(ca->topics, cb->topics);
    append(ca->partitions, cb->partitions);
    append(ca->tags, cb->tags);
  }
  append(a.origins, b.origins);
  rules.erase(rules.begin() + static_cast<std::ptrdiff_t>(second));
  return out;
}

std::vector<TransportRequest> cross_product_requests(const PermissionsDocument& doc, Timestamp at) {
  std::set<std::string> topics, partitions{""};
  std::set<std::int32_t> domains;
  for (const auto& g : doc.grants) {
    for (const auto& r : g.rules) {
      domains.insert(r.domains.begin(), r.domains.end());
      for (DdsAction act : {DdsAction::publish, DdsAction::subscribe, DdsAction::relay}) {
        if (const auto& c = r.criteria(act)) {
          topics.insert(c->topics.begin(), c->topics.end());
          partitions.insert(c->partitions.begin(), c->partitions.end());
        }
      }
    }
  }
  std::vector<TransportRequest> out;
  for (const auto& g : doc.grants) {
    for (auto d : domains) {
      for (DdsAction act : {DdsAction::publish, DdsAction::subscribe, DdsAction::relay}) {
        for (const auto& t : topics) {
          for (const auto& p : partitions) {
            TransportRequest r;
            r.subject_name = g.subject_name;
            r.domain = d;
            r.action = act;
            r.topic = t;
            r.partitions = {p};
            r.at = at;
            out.push_back(std::move(r));
          }
        }
      }
    }
  }
  return out;
}

std::string fixture_path(std::string_view relative) { return std::string(GRAPHMAC_FIXTURES) + "/" + std::string(relative); }

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace graphmac::testing
