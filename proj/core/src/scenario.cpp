#include <algorithm>

#include <nlohmann/json.hpp>

#include "graphmac/error.hpp"
#include "graphmac/keystore.hpp"
#include "graphmac/verify.hpp"

namespace graphmac {

namespace {

using nlohmann::json;

[[noreturn]] void invalid(const std::string& source, const std::string& message) {
  throw Error(ErrorCode::invalid_scenario, "invalid scenario", {Diagnostic{source, 0, 0, message}});
}

const json& member(const json& obj, const char* key, const std::string& where, const std::string& source) {
  if (!obj.is_object() || !obj.contains(key)) invalid(source, where + " is missing '" + key + "'");
  return obj.at(key);
}

std::string string_member(const json& obj, const char* key, const std::string& where, const std::string& source) {
  const json& v = member(obj, key, where, source);
  if (!v.is_string()) invalid(source, where + "." + key + " must be a string");
  return v.get<std::string>();
}

const json& array_member(const json& obj, const char* key, const std::string& source) {
  static const json empty = json::array();
  if (!obj.contains(key)) return empty;
  const json& v = obj.at(key);
  if (!v.is_array()) invalid(source, std::string("'") + key + "' must be an array");
  return v;
}

void require_absolute(const std::string& name, const std::string& what) {
  if (name.empty() || name.front() != '/') {
    throw Error(ErrorCode::invalid_scenario, what + " '" + name + "' must be an absolute name");
  }
}

template <typename T>
void dedupe_stable(std::vector<T>& items) {
  std::vector<T> out;
  for (auto& item : items) {
    if (std::find(out.begin(), out.end(), item) == out.end()) out.push_back(std::move(item));
  }
  items = std::move(out);
}

}  // namespace

std::set<std::string> node_service_names(const ScenarioGraph& scenario) {
  std::set<std::string> out;
  for (const auto& s : scenario.subjects) {
    for (const auto& svc : s.node_services) out.insert(expand_relative(svc, s.uri));
  }
  return out;
}

ScenarioGraph normalize_scenario(const ScenarioGraph& in) {
  ScenarioGraph g = in;
  for (const auto& s : g.subjects) require_absolute(s.uri, "subject");
  for (std::size_t i = 0; i < g.subjects.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (g.subjects[i].uri == g.subjects[j].uri) {
        throw Error(ErrorCode::invalid_scenario, "subject '" + g.subjects[i].uri + "' is listed twice");
      }
    }
  }
  for (const auto& o : g.objects) require_absolute(o.name, "object");

  for (const auto& s : g.subjects) {
    for (const auto& svc : s.node_services) {
      const std::string name = expand_relative(svc, s.uri);
      require_absolute(name, "node service");
      g.objects.push_back({ObjectKind::service, name});
      g.edges.push_back({s.uri, Verb::reply, {ObjectKind::service, name}});
    }
  }
  dedupe_stable(g.objects);

  for (const auto& e : g.edges) {
    const bool known_subject =
        std::any_of(g.subjects.begin(), g.subjects.end(), [&](const ScenarioSubject& s) { return s.uri == e.subject; });
    if (!known_subject) throw Error(ErrorCode::invalid_scenario, "edge subject '" + e.subject + "' is not listed");
    if (std::find(g.objects.begin(), g.objects.end(), e.object) == g.objects.end()) {
      throw Error(ErrorCode::invalid_scenario, "edge object '" + e.object.name + "' (" +
                                                   std::string(to_string(e.object.kind)) + ") is not listed");
    }
    if (!is_legal(e.object.kind, e.verb)) {
      throw Error(ErrorCode::invalid_scenario, "verb '" + std::string(to_string(e.verb)) + "' is not legal on " +
                                                   std::string(to_string(e.object.kind)) + " objects");
    }
  }
  std::sort(g.edges.begin(), g.edges.end());
  g.edges.erase(std::unique(g.edges.begin(), g.edges.end()), g.edges.end());
  return g;
}

ScenarioGraph parse_scenario(std::string_view text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    invalid(source, e.what());
  }
  if (!doc.is_object()) invalid(source, "top level must be an object");

  ScenarioGraph g;
  for (const auto& s : array_member(doc, "subjects", source)) {
    ScenarioSubject subject;
    subject.uri = string_member(s, "uri", "subject", source);
    for (const auto& svc : array_member(s, "node_services", source)) {
      if (!svc.is_string()) invalid(source, "node_services entries must be strings");
      subject.node_services.push_back(svc.get<std::string>());
    }
    g.subjects.push_back(std::move(subject));
  }
  for (const auto& o : array_member(doc, "objects", source)) {
    const std::string kind_text = string_member(o, "kind", "object", source);
    auto kind = parse_object_kind(kind_text);
    if (!kind) invalid(source, "unknown object kind '" + kind_text + "'");
    g.objects.push_back({*kind, string_member(o, "name", "object", source)});
  }

  // Node services are objects too; edges may name them without a kind.
  std::vector<ScenarioObject> known = g.objects;
  for (const auto& s : g.subjects) {
    for (const auto& svc : s.node_services) known.push_back({ObjectKind::service, expand_relative(svc, s.uri)});
  }

  for (const auto& e : array_member(doc, "edges", source)) {
    ScenarioEdge edge;
    edge.subject = string_member(e, "subject", "edge", source);
    const std::string verb_text = string_member(e, "verb", "edge", source);
    auto verb = parse_verb(verb_text);
    if (!verb) invalid(source, "unknown verb '" + verb_text + "'");
    edge.verb = *verb;
    edge.object.name = expand_relative(string_member(e, "object", "edge", source), edge.subject);
    if (e.contains("kind")) {
      const std::string kind_text = string_member(e, "kind", "edge", source);
      auto kind = parse_object_kind(kind_text);
      if (!kind) invalid(source, "unknown object kind '" + kind_text + "'");
      edge.object.kind = *kind;
    } else {
      std::vector<ObjectKind> kinds;
      for (const auto& o : known) {
        if (o.name == edge.object.name && std::find(kinds.begin(), kinds.end(), o.kind) == kinds.end()) {
          kinds.push_back(o.kind);
        }
      }
      if (kinds.empty()) invalid(source, "edge object '" + edge.object.name + "' is not listed");
      if (kinds.size() > 1) invalid(source, "edge object '" + edge.object.name + "' is ambiguous; give its kind");
      edge.object.kind = kinds.front();
    }
    g.edges.push_back(std::move(edge));
  }

  try {
    return normalize_scenario(g);
  } catch (const Error& e) {
    invalid(source, e.what());
  }
}

CompleteGraph build_complete_graph(const ScenarioGraph& scenario) {
  CompleteGraph g;
  g.node_services = node_service_names(scenario);
  for (const auto& s : scenario.subjects) {
    for (const auto& o : scenario.objects) {
      for (Verb v : legal_verbs(o.kind)) g.probes.push_back({s.uri, o.kind, o.name, v});
    }
  }
  return g;
}

PolicyTree extract_min_policy(const ScenarioGraph& scenario) {
  PolicyTree tree;
  for (const auto& s : scenario.subjects) {
    PolicyProfile p;
    p.name = package_dir_name(s.uri);
    p.attachments.push_back({s.uri, AttachmentKind::exact});
    for (const auto& e : scenario.edges) {
      if (e.subject != s.uri) continue;
      PolicyRule r;
      r.qualifier = Qualifier::allow;
      r.kind = e.object.kind;
      r.verbs = {e.verb};
      r.objects = {{e.object.name, AttachmentKind::exact}};
      p.rules.push_back(std::move(r));
    }
    tree.profiles.push_back(std::move(p));
  }
  return tree;
}

}  // namespace graphmac
