#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "graphmac/dds.hpp"
#include "graphmac/eval.hpp"
#include "graphmac/pdp.hpp"
#include "graphmac/policy.hpp"
#include "graphmac/time.hpp"

namespace graphmac {

struct ScenarioObject {
  ObjectKind kind = ObjectKind::topic;
  std::string name;  // absolute

  auto operator<=>(const ScenarioObject&) const = default;
};

struct ScenarioSubject {
  std::string uri;
  std::vector<std::string> node_services;  // as written; "~/x" is relative to uri

  bool operator==(const ScenarioSubject&) const = default;
};

struct ScenarioEdge {
  std::string subject;
  Verb verb = Verb::publish;
  ScenarioObject object;

  auto operator<=>(const ScenarioEdge&) const = default;
};

// The intended deployment graph. After normalize_scenario(), node services
// appear in `objects` and each owner holds an implicit reply edge on them.
struct ScenarioGraph {
  std::vector<ScenarioSubject> subjects;
  std::vector<ScenarioObject> objects;
  std::vector<ScenarioEdge> edges;

  bool operator==(const ScenarioGraph&) const = default;
};

// Parses the scenario JSON and normalizes it. Throws Error(invalid_scenario).
ScenarioGraph parse_scenario(std::string_view json, const std::string& source_name = {});

// Expands node services into service objects plus owner reply edges, sorts
// and deduplicates edges. Idempotent. Throws Error(invalid_scenario) when an
// edge refers to an unknown subject or object or an illegal verb.
ScenarioGraph normalize_scenario(const ScenarioGraph& scenario);

// Absolute names of every node service in the scenario.
std::set<std::string> node_service_names(const ScenarioGraph& scenario);

struct CompleteGraph {
  std::vector<AccessRequest> probes;  // subjects x objects x legal verbs, in scenario order
  std::set<std::string> node_services;
};

CompleteGraph build_complete_graph(const ScenarioGraph& scenario);

// One profile per subject with an exact attachment and one ALLOW rule per edge.
PolicyTree extract_min_policy(const ScenarioGraph& scenario);

std::vector<Decision> label_semantic(const CompleteGraph& graph, const PolicyTree& tree);

enum class TransportModel : std::uint8_t { ideal, ardent_startup };

std::string_view to_string(TransportModel m);
std::optional<TransportModel> parse_transport_model(std::string_view text);

struct TransportSetup {
  MappingMode mode = MappingMode::ardent;
  TransportModel model = TransportModel::ideal;
  std::int32_t domain = 0;
  Timestamp at;  // evaluation time; must fall inside the documents' validity
};

struct LegRecord {
  TransportRequest request;
  PdpOutcome outcome;
};

struct TransportLabel {
  bool allowed = false;  // every leg ALLOW
  std::vector<LegRecord> legs;
};

// The transport request(s) a probe issues under the model. ardent_startup
// issues node-service legs on the default partition only.
std::vector<TransportRequest> transport_requests(const AccessRequest& probe, const CompleteGraph& graph,
                                                 const TransportSetup& setup);

// Throws Error(missing_document) when a probing subject has no document.
std::vector<TransportLabel> label_transport(const CompleteGraph& graph,
                                            const std::map<std::string, PermissionsDocument>& docs,
                                            const TransportSetup& setup);

enum class EdgeClass : std::uint8_t { tp, tn, fp, fn };

std::string_view to_string(EdgeClass c);
EdgeClass classify(bool allowed, bool intended);

struct ClassCounts {
  std::size_t tp = 0, tn = 0, fp = 0, fn = 0;

  void add(EdgeClass c);
  bool operator==(const ClassCounts&) const = default;
};

struct ProbeRecord {
  AccessRequest probe;
  bool truth = false;
  Decision semantic;
  TransportLabel transport;
  EdgeClass semantic_class = EdgeClass::tn;
  EdgeClass transport_class = EdgeClass::tn;
};

struct VerificationReport {
  std::vector<ProbeRecord> probes;
  ClassCounts semantic;
  ClassCounts transport;
  bool pass = false;  // both label sets allow exactly the scenario edges
};

// Throws Error(domain_mismatch) when label vectors do not align with probes.
VerificationReport compare_labels(const ScenarioGraph& scenario, const CompleteGraph& graph,
                                  const std::vector<Decision>& semantic, const std::vector<TransportLabel>& transport);

struct VerifyOptions {
  MappingMode mode = MappingMode::ardent;
  TransportModel model = TransportModel::ideal;
  CompileOptions compile;
  // Subjects whose documents get the empty-partition amendment; overrides
  // compile.amend_empty_partition per subject.
  std::set<std::string> amend_subjects;
  bool fold = false;
};

struct VerifyRun {
  ScenarioGraph scenario;
  CompleteGraph graph;
  std::map<std::string, PermissionsDocument> documents;
  VerificationReport report;
};

// End-to-end: compile one document per subject from `policy` (a deny-all
// document for subjects no profile applies to), label both ways and compare.
VerifyRun run_verification(const ScenarioGraph& scenario, const PolicyTree& policy, const VerifyOptions& options,
                           const Clock& clock = system_clock());

// Stable JSON; identical reports serialize byte-identically.
std::string report_json(const VerificationReport& report, bool include_probes = true);

// Graphviz rendering: green allowed / red denied, dashed true / solid false.
std::string report_dot(const VerificationReport& report);

}  // namespace graphmac
