#include <nlohmann/json.hpp>

#include "graphmac/verify.hpp"

namespace graphmac {

namespace {

using ordered = nlohmann::ordered_json;

ordered counts_json(const ClassCounts& c) {
  ordered j;
  j["tp"] = c.tp;
  j["tn"] = c.tn;
  j["fp"] = c.fp;
  j["fn"] = c.fn;
  return j;
}

std::string label(bool allowed) { return allowed ? "ALLOW" : "DENY"; }

ordered probe_json(const ProbeRecord& r) {
  ordered j;
  j["subject"] = r.probe.subject;
  j["kind"] = to_string(r.probe.kind);
  j["object"] = r.probe.object;
  j["verb"] = to_string(r.probe.verb);
  j["truth"] = label(r.truth);

  ordered sem;
  sem["label"] = to_string(r.semantic.outcome);
  sem["reason"] = to_string(r.semantic.reason);
  sem["class"] = to_string(r.semantic_class);
  sem["matched_rules"] = r.semantic.matched_rules;
  j["semantic"] = std::move(sem);

  ordered tp;
  tp["label"] = label(r.transport.allowed);
  tp["class"] = to_string(r.transport_class);
  ordered legs = ordered::array();
  for (const auto& leg : r.transport.legs) {
    ordered l;
    l["action"] = to_string(leg.request.action);
    l["topic"] = leg.request.topic;
    l["partitions"] = leg.request.partitions;
    l["outcome"] = to_string(leg.outcome.value);
    l["grant"] = leg.outcome.grant_index ? ordered(*leg.outcome.grant_index) : ordered(nullptr);
    l["rule"] = leg.outcome.rule_index ? ordered(*leg.outcome.rule_index) : ordered(nullptr);
    legs.push_back(std::move(l));
  }
  tp["legs"] = std::move(legs);
  j["transport"] = std::move(tp);
  return j;
}

std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string report_json(const VerificationReport& report, bool include_probes) {
  ordered j;
  ordered summary;
  summary["semantic"] = counts_json(report.semantic);
  summary["transport"] = counts_json(report.transport);
  summary["pass"] = report.pass;
  j["summary"] = std::move(summary);
  if (include_probes) {
    ordered probes = ordered::array();
    for (const auto& r : report.probes) probes.push_back(probe_json(r));
    j["probes"] = std::move(probes);
  }
  return j.dump(2) + "\n";
}

// True negatives are left out; the graph shows what the transport allowed
// plus every intended edge it refused.
std::string report_dot(const VerificationReport& report) {
  std::string out = "digraph verification {\n  rankdir=LR;\n  node [shape=box, fontname=\"monospace\"];\n";
  std::set<std::string> subjects, objects;
  for (const auto& r : report.probes) {
    subjects.insert(r.probe.subject);
    objects.insert(r.probe.object);
  }
  for (const auto& s : subjects) out += "  " + dot_quote(s) + " [shape=ellipse];\n";
  for (const auto& o : objects) {
    if (subjects.count(o) == 0) out += "  " + dot_quote(o) + ";\n";
  }
  for (const auto& r : report.probes) {
    if (r.transport_class == EdgeClass::tn) continue;
    const bool allowed = r.transport.allowed;
    const bool correct = r.transport_class == EdgeClass::tp;
    out += "  " + dot_quote(r.probe.subject) + " -> " + dot_quote(r.probe.object) + " [label=" +
           dot_quote(std::string(to_string(r.probe.verb))) + ", color=" + (allowed ? "green" : "red") +
           ", style=" + (correct ? "dashed" : "solid") + "];\n";
  }
  out += "}\n";
  return out;
}

}  // namespace graphmac
