// Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "graphmac/error.hpp"
#include "graphmac/keystore.hpp"
#include "graphmac/pdp.hpp"
#include "graphmac/signer.hpp"
#include "graphmac/verify.hpp"
#include "oracles.hpp"

namespace {

using namespace graphmac;
using namespace std::chrono_literals;
namespace fs = std::filesystem;
using testing::fixture_path;
using testing::read_text;

const Timestamp kNow = std::chrono::sys_days{std::chrono::year{2026} / 1 / 1};
const Clock kClock = fixed_clock(kNow);

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond && pass) detail << what;
    pass = pass && cond;
  }
};

ScenarioGraph scenario_file(const std::string& rel) { return parse_scenario(read_text(fixture_path(rel)), rel); }

// ---- 1 ------------------------------------------------------------------

Outcome faithfulness() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  const auto& universe = testing::default_universe();
  const auto probes = universe.probes();
  // A subject with no grant in the document gets ERROR from the PDP.
  const PermissionsDocument nobody = deny_all_document("/nobody", {}, kClock);
  std::mt19937_64 rng(20260101);
  std::size_t checked = 0, errors = 0, allowed = 0;
  const int kPolicies = 500;
  for (int i = 0; i < kPolicies && o.pass; ++i) {
    const PolicyTree tree = testing::random_policy(rng, {5, 10});
    for (MappingMode mode : {MappingMode::ardent, MappingMode::bouncy}) {
      std::map<std::string, PermissionsDocument> docs;
      for (const auto& s : universe.subjects) {
        if (!applicable_profiles(tree, s).empty()) docs.emplace(s, compile_permissions(tree, s, mode, {}, kClock));
      }
      for (const auto& p : probes) {
        const bool semantic = evaluate_request(tree, p).outcome == Qualifier::allow;
        auto doc = docs.find(p.subject);
        const PermissionsDocument& d = doc == docs.end() ? nobody : doc->second;
        bool transport = true;
        for (const auto& leg : map_object(p.kind, p.object, p.verb, mode)) {
          const auto out = pdp_evaluate(d, {p.subject, 0, leg.action, leg.topic, {leg.partition}, {}, kNow});
          if (out.value == PdpValue::error) ++errors;
          transport = transport && allows(out);
        }
        ++checked;
        allowed += semantic ? 1 : 0;
        if (semantic != transport) {
          o.require(false, "mismatch on policy " + std::to_string(i) + " (" + std::string(to_string(mode)) + ") " +
                               p.subject + " " + std::string(to_string(p.verb)) + " " + p.object);
          break;
        }
      }
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  o.require(probes.size() <= 500, "probe universe larger than 500");
  o.require(secs < 60.0, "took " + std::to_string(secs) + "s");
  if (o.pass) {
    o.detail << kPolicies << " policies x 2 modes, " << checked << " probes agree (" << allowed << " allowed, "
             << errors << " ERROR legs), " << static_cast<int>(secs * 1000) << " ms";
  }
  return o;
}

// ---- 2 ------------------------------------------------------------------

Outcome talker_listener() {
  Outcome o;
  const auto scenario = scenario_file("talker_listener/scenario.json");
  const auto policy = load_policy_file(fixture_path("talker_listener/policy.xml"));

  VerifyOptions ideal;
  const auto a = run_verification(scenario, policy, ideal, kClock).report;
  o.require(a.pass && a.transport.fp == 0 && a.transport.fn == 0, "(a) ideal model did not pass cleanly; ");

  VerifyOptions startup;
  startup.model = TransportModel::ardent_startup;
  const auto b = run_verification(scenario, policy, startup, kClock).report;
  o.require(!b.pass && b.transport.fn > 0 && b.transport.fp == 0, "(b) startup without amendment; ");

  VerifyOptions amended = startup;
  amended.amend_subjects = {"/talker"};
  const auto c = run_verification(scenario, policy, amended, kClock).report;
  o.require(!c.pass && c.transport.fp > 0 && c.transport.fn > 0, "(c) counts; ");
  std::set<std::string> listener_objects;
  for (const auto& e : scenario.edges) {
    if (e.subject == "/listener") listener_objects.insert(e.object.name);
  }
  for (const auto& r : c.probes) {
    if (r.transport_class == EdgeClass::fp) {
      o.require(r.probe.subject == "/talker" && listener_objects.count(r.probe.object) != 0,
                "(c) FP edge " + r.probe.subject + " -> " + r.probe.object + "; ");
    }
    if (r.transport_class == EdgeClass::fn) {
      o.require(r.probe.subject == "/listener" && r.probe.object.rfind("/listener/", 0) == 0,
                "(c) FN edge " + r.probe.subject + " -> " + r.probe.object + "; ");
    }
  }
  if (o.pass) {
    auto counts = [](const ClassCounts& k) {
      return "tp=" + std::to_string(k.tp) + " fp=" + std::to_string(k.fp) + " fn=" + std::to_string(k.fn);
    };
    o.detail << "ideal " << counts(a.transport) << "; startup " << counts(b.transport) << "; talker amended "
             << counts(c.transport);
  }
  return o;
}

// ---- 3 ------------------------------------------------------------------

Outcome crosstalk() {
  Outcome o;
  const auto scenario = scenario_file("crosstalk/scenario.json");
  const auto policy = load_policy_file(fixture_path("crosstalk/policy.xml"));
  const auto doc = compile_permissions(policy, "/s", MappingMode::ardent, {}, kClock);
  const auto folded = fold_rules(doc);
  o.require(folded.grants[0].rules.size() == 2, "fold merged the crosstalk rules; ");

  const auto graph = build_complete_graph(scenario);
  const auto semantic = label_semantic(graph, policy);
  TransportSetup setup;
  setup.at = kNow;
  const auto merged = testing::force_merge(doc, 0, 1);
  const auto report = compare_labels(scenario, graph, semantic, label_transport(graph, {{"/s", merged}}, setup));
  std::set<std::string> fp;
  for (const auto& r : report.probes) {
    if (r.transport_class == EdgeClass::fp) fp.insert(std::string(to_string(r.probe.verb)) + " " + r.probe.object);
  }
  o.require(fp == std::set<std::string>{"publish /baz/bar", "publish /foo/spam"}, "unexpected FP set; ");
  const auto clean = compare_labels(scenario, graph, semantic, label_transport(graph, {{"/s", folded}}, setup));
  o.require(clean.pass, "folded document does not pass; ");
  if (o.pass) o.detail << "fold keeps 2 rules; forced merge flags FP on /baz/bar and /foo/spam";
  return o;
}

// ---- 4 ------------------------------------------------------------------

Outcome deny_first() {
  Outcome o;
  std::mt19937_64 rng(4);
  std::size_t docs = 0, rules = 0;
  for (int i = 0; i < 500 && o.pass; ++i) {
    const auto tree = testing::random_policy(rng);
    for (MappingMode mode : {MappingMode::ardent, MappingMode::bouncy}) {
      for (const auto& s : testing::default_universe().subjects) {
        if (applicable_profiles(tree, s).empty()) continue;
        const auto doc = compile_permissions(tree, s, mode, {}, kClock);
        const auto& r = doc.grants[0].rules;
        const auto first_allow = std::find_if(r.begin(), r.end(), [](const DdsRule& x) {
          return x.qualifier == Qualifier::allow;
        });
        o.require(std::none_of(first_allow, r.end(), [](const DdsRule& x) { return x.qualifier == Qualifier::deny; }),
                  "ALLOW before DENY in document for " + s + "; ");
        ++docs;
        rules += r.size();
      }
    }
  }

  const auto tree = parse_policy(R"(<policy version="1"><profile name="p" attach="/s">
    <topics qualifier="ALLOW" verbs="publish"><topic>/**</topic></topics>
    <topics qualifier="DENY" verbs="publish"><topic>/secret</topic></topics>
  </profile></policy>)");
  const auto doc = compile_permissions(tree, "/s", MappingMode::ardent, {}, kClock);
  auto swapped = doc;
  std::swap(swapped.grants[0].rules[0], swapped.grants[0].rules[1]);
  const TransportRequest secret{"/s", 0, DdsAction::publish, "secret", {"rt"}, {}, kNow};
  o.require(pdp_evaluate(doc, secret).value == PdpValue::deny, "deny-first document allows /secret; ");
  o.require(pdp_evaluate(swapped, secret).value == PdpValue::allow, "swap did not flip the outcome; ");
  if (o.pass) o.detail << docs << " documents, " << rules << " rules in deny-first order; swap flips /secret to ALLOW";
  return o;
}

// ---- 5 ------------------------------------------------------------------

// Transport labels of `scenario` edges for one subject's document.
bool edges_hold(const ScenarioGraph& scenario, const CompleteGraph& graph, const std::string& subject,
                const PermissionsDocument& doc) {
  TransportSetup setup;
  setup.at = kNow;
  CompleteGraph mine;
  mine.node_services = graph.node_services;
  for (const auto& e : scenario.edges) {
    if (e.subject == subject) mine.probes.push_back({e.subject, e.object.kind, e.object.name, e.verb});
  }
  for (const auto& l : label_transport(mine, {{subject, doc}}, setup)) {
    if (!l.allowed) return false;
  }
  return true;
}

// Number of ALLOW rules whose removal leaves every intended edge intact.
std::size_t gratuitous_rules(const ScenarioGraph& scenario, const PolicyTree& policy, Outcome& o) {
  const auto graph = build_complete_graph(scenario);
  std::size_t gratuitous = 0;
  for (const auto& subj : scenario.subjects) {
    if (applicable_profiles(policy, subj.uri).empty()) continue;
    const auto doc = compile_permissions(policy, subj.uri, MappingMode::ardent, {}, kClock);
    std::set<std::string> ids;
    for (const auto& ar : applicable_rules(policy, subj.uri)) ids.insert(ar.id);
    const auto& rules = doc.grants[0].rules;
    for (std::size_t i = 0; i < rules.size(); ++i) {
      for (const auto& origin : rules[i].origins) o.require(ids.count(origin) != 0, "untraceable origin " + origin);
      if (rules[i].qualifier != Qualifier::allow) continue;
      auto without = doc;
      without.grants[0].rules.erase(without.grants[0].rules.begin() + static_cast<std::ptrdiff_t>(i));
      if (edges_hold(scenario, graph, subj.uri, without)) ++gratuitous;
    }
  }
  return gratuitous;
}

ScenarioGraph random_scenario(std::mt19937_64& rng) {
  const auto& u = testing::default_universe();
  ScenarioGraph g;
  for (const auto& s : u.subjects) g.subjects.push_back({s, {}});
  for (const auto& [k, name] : u.objects) g.objects.push_back({k, name});
  for (const auto& p : u.probes()) {
    if (std::bernoulli_distribution(0.08)(rng)) g.edges.push_back({p.subject, p.verb, {p.kind, p.object}});
  }
  return normalize_scenario(g);
}

Outcome minimal_subset() {
  Outcome o;
  std::size_t scenarios = 0;
  std::vector<ScenarioGraph> cases = {scenario_file("talker_listener/scenario.json"),
                                      scenario_file("crosstalk/scenario.json")};
  std::mt19937_64 rng(5);
  for (int i = 0; i < 25; ++i) cases.push_back(random_scenario(rng));
  for (const auto& sc : cases) {
    const std::size_t g = gratuitous_rules(sc, extract_min_policy(sc), o);
    o.require(g == 0, "minimal policy has " + std::to_string(g) + " gratuitous rules; ");
    ++scenarios;
  }
  const auto tl = scenario_file("talker_listener/scenario.json");
  const auto padded = load_policy_file(fixture_path("padded/policy.xml"));
  const std::size_t padded_gratuitous = gratuitous_rules(tl, padded, o);
  const auto report = run_verification(tl, padded, {}, kClock).report;
  o.require(padded_gratuitous > 0 && report.semantic.fp > 0, "padded template not flagged; ");
  if (o.pass) {
    o.detail << scenarios << " minimal policies with no gratuitous rule; padded template: " << padded_gratuitous
             << " gratuitous rules, semantic fp=" << report.semantic.fp;
  }
  return o;
}

// ---- 6 ------------------------------------------------------------------

std::map<std::string, std::string> provision(const fs::path& root) {
  KeystoreConfig c;
  c.root = root;
  c.seed = "acceptance";
  auto ks = Keystore::init(c, kClock);
  for (const auto* s : {"/talker", "/listener"}) {
    ks.create_package(s, {fixture_path("talker_listener/policy.xml")});
    ks.build_package(s, kClock);
    ks.install_package(s);
  }
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) files[fs::relative(e.path(), root).string()] = read_text(e.path().string());
  }
  return files;
}

Outcome keystore() {
  Outcome o;
  const fs::path base = fs::temp_directory_path() / ("graphmac_acceptance_" + std::to_string(std::random_device{}()));
  fs::remove_all(base);
  const auto a = provision(base / "a");
  const auto b = provision(base / "b");
  o.require(a == b && !a.empty(), "pinned-clock provisioning differs between runs; ");

  const auto ks = Keystore::open(base / "a");
  const TrustRoot root = ks.trust_root();
  std::mt19937_64 rng(6);
  std::size_t flips = 0;
  for (const auto* file : {"install/talker/permissions.p7s", "install/talker/governance.p7s"}) {
    const SignedArtifact art = parse_artifact(a.at(file));
    o.require(verify_document(root, art), std::string(file) + " does not verify; ");
    for (int i = 0; i < 100; ++i) {
      SignedArtifact t = art;
      const auto pos = std::uniform_int_distribution<std::size_t>(0, t.payload.size() - 1)(rng);
      t.payload[pos] = static_cast<char>(t.payload[pos] ^ std::uniform_int_distribution<int>(1, 255)(rng));
      o.require(!verify_document(root, t), std::string(file) + " tamper at " + std::to_string(pos) + " undetected; ");
      std::string text = a.at(file);
      const auto tpos = std::uniform_int_distribution<std::size_t>(0, text.size() - 1)(rng);
      text[tpos] = static_cast<char>(text[tpos] ^ std::uniform_int_distribution<int>(1, 255)(rng));
      o.require(!verify_container(root, text), std::string(file) + " container flip undetected; ");
      flips += 2;
    }
  }
  fs::remove_all(base);
  if (o.pass) o.detail << a.size() << " files byte-identical across runs; " << flips << " single-byte tampers detected";
  return o;
}

// ---- 7 ------------------------------------------------------------------

Outcome algorithm_paths() {
  Outcome o;
  auto rule = [](Qualifier q, std::string topic) {
    DdsRule r;
    r.qualifier = q;
    r.domains = {0};
    r.publish = DdsCriteria{{std::move(topic)}, {}, {}};
    return r;
  };
  const TransportRequest req{"/s", 0, DdsAction::publish, "x", {""}, {}, kNow};

  Grant expired{"s", "/s", kNow - 48h, kNow - 24h, {}, Qualifier::allow};
  o.require(pdp_evaluate(make_document({expired}, ""), req).value == PdpValue::error, "expired grant; ");

  Grant other{"o", "/other", kNow - 24h, kNow + 24h, {}, Qualifier::allow};
  o.require(pdp_evaluate(make_document({other}, ""), req).value == PdpValue::error, "no grant match; ");

  Grant by_default{"s", "/s", kNow - 24h, kNow + 24h, {rule(Qualifier::deny, "y")}, Qualifier::allow};
  const auto d = pdp_evaluate(make_document({by_default}, ""), req);
  o.require(d.value == PdpValue::allow && d.grant_index == 0u && !d.rule_index, "grant default; ");

  Grant ordered{"s", "/s", kNow - 24h, kNow + 24h, {rule(Qualifier::allow, "*"), rule(Qualifier::deny, "x")},
                Qualifier::deny};
  auto reversed = ordered;
  std::swap(reversed.rules[0], reversed.rules[1]);
  const auto first = pdp_evaluate(make_document({ordered}, ""), req);
  const auto second = pdp_evaluate(make_document({reversed}, ""), req);
  o.require(first.value == PdpValue::allow && first.rule_index == 0u, "first match (allow first); ");
  o.require(second.value == PdpValue::deny && second.rule_index == 0u, "first match (deny first); ");
  if (o.pass) o.detail << "expired->ERROR, no match->ERROR, default->grant default, first match wins";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {"C1 faithfulness", faithfulness},
      {"C2 talker-listener", talker_listener},
      {"C3 crosstalk-fold", crosstalk},
      {"C4 deny-first", deny_first},
      {"C5 minimal-subset", minimal_subset},
      {"C6 keystore-integrity", keystore},
      {"C7 pdp-paths", algorithm_paths},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    std::cout << (o.pass ? "PASS " : "FAIL ") << c.name << ": " << o.detail.str() << std::endl;
    failures += o.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
