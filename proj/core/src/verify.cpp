#include <algorithm>

#include "graphmac/error.hpp"
#include "graphmac/verify.hpp"

namespace graphmac {

std::string_view to_string(TransportModel m) { return m == TransportModel::ideal ? "ideal" : "ardent_startup"; }

std::optional<TransportModel> parse_transport_model(std::string_view text) {
  if (text == "ideal") return TransportModel::ideal;
  if (text == "ardent_startup") return TransportModel::ardent_startup;
  return std::nullopt;
}

std::string_view to_string(EdgeClass c) {
  switch (c) {
    case EdgeClass::tp: return "TP";
    case EdgeClass::tn: return "TN";
    case EdgeClass::fp: return "FP";
    case EdgeClass::fn: return "FN";
  }
  return "TN";
}

EdgeClass classify(bool allowed, bool intended) {
  if (allowed) return intended ? EdgeClass::tp : EdgeClass::fp;
  return intended ? EdgeClass::fn : EdgeClass::tn;
}

void ClassCounts::add(EdgeClass c) {
  switch (c) {
    case EdgeClass::tp: ++tp; break;
    case EdgeClass::tn: ++tn; break;
    case EdgeClass::fp: ++fp; break;
    case EdgeClass::fn: ++fn; break;
  }
}

std::vector<Decision> label_semantic(const CompleteGraph& graph, const PolicyTree& tree) {
  std::vector<Decision> out;
  out.reserve(graph.probes.size());
  for (const auto& probe : graph.probes) out.push_back(evaluate_request(tree, probe));
  return out;
}

std::vector<TransportRequest> transport_requests(const AccessRequest& probe, const CompleteGraph& graph,
                                                 const TransportSetup& setup) {
  const std::string object = expand_relative(probe.object, probe.subject);
  // At startup these services come up on the default partition before any
  // namespace partition is applied.
  const bool startup = setup.model == TransportModel::ardent_startup && graph.node_services.count(object) != 0;
  std::vector<TransportRequest> out;
  for (auto& leg : map_object(probe.kind, object, probe.verb, setup.mode)) {
    TransportRequest r;
    r.subject_name = probe.subject;
    r.domain = setup.domain;
    r.action = leg.action;
    r.topic = std::move(leg.topic);
    r.partitions = {startup ? std::string() : std::move(leg.partition)};
    r.at = setup.at;
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<TransportLabel> label_transport(const CompleteGraph& graph,
                                            const std::map<std::string, PermissionsDocument>& docs,
                                            const TransportSetup& setup) {
  std::vector<TransportLabel> out;
  out.reserve(graph.probes.size());
  for (const auto& probe : graph.probes) {
    auto doc = docs.find(probe.subject);
    if (doc == docs.end()) {
      throw Error(ErrorCode::missing_document, "no permissions document for subject '" + probe.subject + "'");
    }
    TransportLabel label;
    label.allowed = true;
    for (auto& request : transport_requests(probe, graph, setup)) {
      PdpOutcome outcome = pdp_evaluate(doc->second, request);
      label.allowed = label.allowed && allows(outcome);
      label.legs.push_back({std::move(request), outcome});
    }
    label.allowed = label.allowed && !label.legs.empty();
    out.push_back(std::move(label));
  }
  return out;
}

VerificationReport compare_labels(const ScenarioGraph& scenario, const CompleteGraph& graph,
                                  const std::vector<Decision>& semantic, const std::vector<TransportLabel>& transport) {
  if (semantic.size() != graph.probes.size() || transport.size() != graph.probes.size()) {
    throw Error(ErrorCode::domain_mismatch, "label sets do not cover the probe set (" +
                                                std::to_string(semantic.size()) + " semantic, " +
                                                std::to_string(transport.size()) + " transport, " +
                                                std::to_string(graph.probes.size()) + " probes)");
  }
  std::set<AccessRequest> truth;
  for (const auto& e : scenario.edges) truth.insert({e.subject, e.object.kind, e.object.name, e.verb});

  VerificationReport report;
  std::size_t covered = 0;
  for (std::size_t i = 0; i < graph.probes.size(); ++i) {
    ProbeRecord rec;
    rec.probe = graph.probes[i];
    rec.truth = truth.count(rec.probe) != 0;
    covered += rec.truth ? 1 : 0;
    rec.semantic = semantic[i];
    rec.transport = transport[i];
    rec.semantic_class = classify(rec.semantic.outcome == Qualifier::allow, rec.truth);
    rec.transport_class = classify(rec.transport.allowed, rec.truth);
    report.semantic.add(rec.semantic_class);
    report.transport.add(rec.transport_class);
    report.probes.push_back(std::move(rec));
  }
  if (covered != truth.size()) {
    throw Error(ErrorCode::domain_mismatch, "some scenario edges are not in the probe set");
  }
  report.pass = report.semantic.fp == 0 && report.semantic.fn == 0 && report.transport.fp == 0 &&
                report.transport.fn == 0;
  return report;
}

VerifyRun run_verification(const ScenarioGraph& scenario, const PolicyTree& policy, const VerifyOptions& options,
                           const Clock& clock) {
  VerifyRun run;
  run.scenario = normalize_scenario(scenario);
  run.graph = build_complete_graph(run.scenario);
  const Timestamp now = clock();
  const Clock pinned = fixed_clock(now);

  for (const auto& s : run.scenario.subjects) {
    CompileOptions opts = options.compile;
    opts.amend_empty_partition = opts.amend_empty_partition || options.amend_subjects.count(s.uri) != 0;
    PermissionsDocument doc = applicable_profiles(policy, s.uri).empty()
                                  ? deny_all_document(s.uri, opts, pinned)
                                  : compile_permissions(policy, s.uri, options.mode, opts, pinned);
    if (options.fold) doc = fold_rules(doc);
    run.documents.emplace(s.uri, std::move(doc));
  }

  TransportSetup setup;
  setup.mode = options.mode;
  setup.model = options.model;
  setup.domain = options.compile.domains.empty() ? 0 : options.compile.domains.front();
  setup.at = options.compile.not_before.value_or(now);
  run.report = compare_labels(run.scenario, run.graph, label_semantic(run.graph, policy),
                              label_transport(run.graph, run.documents, setup));
  return run;
}

}  // namespace graphmac
