#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <nlohmann/json.hpp>
#include <sstream>

#include "graphmac/dds.hpp"
#include "graphmac/error.hpp"
#include "graphmac/eval.hpp"
#include "graphmac/keystore.hpp"
#include "graphmac/pdp.hpp"
#include "graphmac/policy.hpp"
#include "graphmac/verify.hpp"

namespace graphmac::cli {

namespace {

using ordered = nlohmann::ordered_json;

struct Globals {
  std::string keystore;
  std::string clock;
  std::string format = "text";
};

// Raised for argument combinations CLI11 cannot express on its own.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::already_initialized:
    case ErrorCode::not_initialized:
    case ErrorCode::duplicate_package:
    case ErrorCode::unknown_package:
    case ErrorCode::not_built:
    case ErrorCode::io_failure:
    case ErrorCode::unknown_signer:
    case ErrorCode::missing_document:
    case ErrorCode::domain_mismatch:
    case ErrorCode::unresolved_imports:
      return kInternal;
    default:
      return kUsage;
  }
}

std::string read_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_failure, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << content;
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorCode::io_failure, "cannot write " + path);
  f << content;
}

template <typename T, typename Parse>
T parse_enum(const std::string& text, Parse parse, const char* what) {
  auto v = parse(text);
  if (!v) throw UsageError(std::string("unknown ") + what + " '" + text + "'");
  return *v;
}

class Context {
 public:
  Context(const Globals& g, std::ostream& out, std::ostream& err) : globals_(g), out_(out), err_(err) {}

  bool json() const { return globals_.format == "json"; }
  std::ostream& out() { return out_; }
  std::ostream& err() { return err_; }

  Clock clock() const {
    if (globals_.clock.empty()) return system_clock();
    auto t = parse_rfc3339(globals_.clock);
    if (!t) throw UsageError("--clock '" + globals_.clock + "' is not an RFC 3339 timestamp");
    return fixed_clock(*t);
  }

  const std::string& keystore_dir() const {
    if (globals_.keystore.empty()) throw UsageError("--keystore DIR is required for keystore commands");
    return globals_.keystore;
  }

  void emit(const ordered& j) { out_ << j.dump(2) << "\n"; }

 private:
  const Globals& globals_;
  std::ostream& out_;
  std::ostream& err_;
};

ordered criteria_json(const DdsCriteria& c) {
  ordered j;
  j["topics"] = c.topics;
  j["partitions"] = c.partitions;
  j["tags"] = c.tags;
  return j;
}

ordered permissions_json(const PermissionsDocument& doc) {
  ordered j;
  j["source_digest"] = doc.source_digest;
  ordered grants = ordered::array();
  for (const auto& g : doc.grants) {
    ordered gj;
    gj["name"] = g.name;
    gj["subject_name"] = g.subject_name;
    gj["not_before"] = format_rfc3339(g.not_before);
    gj["not_after"] = format_rfc3339(g.not_after);
    ordered rules = ordered::array();
    for (const auto& r : g.rules) {
      ordered rj;
      rj["qualifier"] = to_string(r.qualifier);
      rj["domains"] = r.domains;
      for (DdsAction a : {DdsAction::publish, DdsAction::subscribe, DdsAction::relay}) {
        if (const auto& c = r.criteria(a)) rj[std::string(to_string(a))] = criteria_json(*c);
      }
      rj["origins"] = r.origins;
      rules.push_back(std::move(rj));
    }
    gj["rules"] = std::move(rules);
    gj["default"] = to_string(g.default_qualifier);
    grants.push_back(std::move(gj));
  }
  j["grants"] = std::move(grants);
  return j;
}

// ---- policy -------------------------------------------------------------

struct PolicyCheckArgs {
  std::string file, subject, verb, kind, object;
};

int policy_check(Context& ctx, const PolicyCheckArgs& a) {
  const PolicyTree tree = load_policy_file(a.file);
  AccessRequest req;
  req.subject = a.subject;
  req.verb = parse_enum<Verb>(a.verb, parse_verb, "verb");
  req.kind = parse_enum<ObjectKind>(a.kind, parse_object_kind, "object kind");
  req.object = a.object;
  if (!is_legal(req.kind, req.verb)) {
    throw UsageError("verb '" + a.verb + "' is not legal on " + a.kind + " objects");
  }
  const Decision d = evaluate_request(tree, req);
  if (ctx.json()) {
    ordered j;
    j["outcome"] = to_string(d.outcome);
    j["reason"] = to_string(d.reason);
    j["matched_rules"] = d.matched_rules;
    ctx.emit(j);
  } else {
    ctx.out() << to_string(d.outcome) << " (" << to_string(d.reason) << ")\n";
    for (const auto& id : d.matched_rules) ctx.out() << "  " << id << "\n";
  }
  return d.outcome == Qualifier::allow ? kOk : kDenied;
}

struct PolicyFmtArgs {
  std::string file;
  bool resolve = false;
  std::string output;
};

int policy_fmt(Context& ctx, const PolicyFmtArgs& a) {
  PolicyTree tree = a.resolve ? load_policy_file(a.file) : parse_policy(read_input(a.file), a.file);
  write_output(a.output, serialize_policy(tree), ctx.out());
  return kOk;
}

// ---- compile ------------------------------------------------------------

struct CompileArgs {
  std::string file, subject, mode = "ardent", output;
  std::vector<std::int32_t> domains;
  std::int32_t validity_days = 365;
  bool amend = false;
  std::vector<std::string> amend_targets;
  bool fold = false;
};

int compile(Context& ctx, const CompileArgs& a) {
  const PolicyTree tree = load_policy_file(a.file);
  CompileOptions opts;
  if (!a.domains.empty()) opts.domains = a.domains;
  opts.validity_days = a.validity_days;
  opts.amend_empty_partition = a.amend || !a.amend_targets.empty();
  opts.amend_targets = a.amend_targets;
  const MappingMode mode = parse_enum<MappingMode>(a.mode, parse_mapping_mode, "mapping mode");
  PermissionsDocument doc = compile_permissions(tree, a.subject, mode, opts, ctx.clock());
  if (a.fold) doc = fold_rules(doc);
  write_output(a.output, ctx.json() ? permissions_json(doc).dump(2) + "\n" : serialize_permissions(doc), ctx.out());
  return kOk;
}

// ---- pdp ----------------------------------------------------------------

struct PdpArgs {
  std::string file, subject_name, action, topic, at;
  std::int32_t domain = 0;
  std::vector<std::string> partitions;
  std::vector<std::string> tags;
};

int pdp_eval(Context& ctx, const PdpArgs& a) {
  const PermissionsDocument doc = parse_permissions(read_input(a.file), a.file);
  TransportRequest req;
  req.subject_name = a.subject_name;
  req.domain = a.domain;
  req.action = parse_enum<DdsAction>(a.action, parse_dds_action, "action");
  req.topic = a.topic;
  req.partitions = a.partitions.empty() ? std::vector<std::string>{""} : a.partitions;
  req.tags = a.tags;
  if (a.at.empty()) {
    req.at = ctx.clock()();
  } else {
    auto t = parse_rfc3339(a.at);
    if (!t) throw UsageError("--at '" + a.at + "' is not an RFC 3339 timestamp");
    req.at = *t;
  }
  const PdpOutcome o = pdp_evaluate(doc, req);
  if (ctx.json()) {
    ordered j;
    j["outcome"] = to_string(o.value);
    j["grant"] = o.grant_index ? ordered(*o.grant_index) : ordered(nullptr);
    j["rule"] = o.rule_index ? ordered(*o.rule_index) : ordered(nullptr);
    ctx.emit(j);
  } else {
    ctx.out() << to_string(o.value);
    if (o.grant_index) ctx.out() << " grant=" << *o.grant_index;
    if (o.grant_index) ctx.out() << " rule=" << (o.rule_index ? std::to_string(*o.rule_index) : "default");
    ctx.out() << "\n";
  }
  switch (o.value) {
    case PdpValue::allow: return kOk;
    case PdpValue::deny: return kDenied;
    case PdpValue::error: return kUsage;
  }
  return kUsage;
}

// ---- keystore -----------------------------------------------------------

struct InitArgs {
  std::string ca_name = "graphmac-ca", mode = "ardent", signer = "mock", seed;
  std::vector<std::int32_t> domains;
  std::int32_t validity_days = 365;
};

int keystore_init(Context& ctx, const InitArgs& a) {
  KeystoreConfig c;
  c.root = ctx.keystore_dir();
  c.ca_name = a.ca_name;
  if (!a.domains.empty()) c.domains = a.domains;
  c.validity_days = a.validity_days;
  c.mode = parse_enum<MappingMode>(a.mode, parse_mapping_mode, "mapping mode");
  c.signer = parse_enum<SignerKind>(a.signer, parse_signer_kind, "signer kind");
  c.seed = a.seed;
  const Keystore ks = Keystore::init(c, ctx.clock());
  if (ctx.json()) {
    ordered j;
    j["root"] = ks.root().string();
    j["ca_name"] = ks.config().ca_name;
    j["created"] = format_rfc3339(ks.created());
    ctx.emit(j);
  } else {
    ctx.out() << "initialized " << ks.root().string() << "\n";
  }
  return kOk;
}

struct CreateArgs {
  std::string subject;
  std::vector<std::string> policies;
  bool amend = false;
  std::vector<std::string> amend_targets;
};

int keystore_create(Context& ctx, const CreateArgs& a) {
  Keystore ks = Keystore::open(ctx.keystore_dir());
  const auto result =
      ks.create_package(a.subject, a.policies, a.amend || !a.amend_targets.empty(), a.amend_targets);
  for (const auto& w : result.warnings) ctx.err() << "warning: " << w.str() << "\n";
  if (ctx.json()) {
    ordered j;
    j["subject"] = result.manifest.subject;
    j["package"] = package_dir_name(result.manifest.subject);
    j["policies"] = result.manifest.policy_sources;
    j["amend_empty_partition"] = result.manifest.amend_empty_partition;
    j["amend_targets"] = result.manifest.amend_targets;
    j["warnings"] = result.warnings.size();
    ctx.emit(j);
  } else {
    ctx.out() << "created " << package_dir_name(result.manifest.subject) << "\n";
  }
  return kOk;
}

struct SelectArgs {
  std::vector<std::string> subjects;
  bool all = false;
};

std::vector<std::string> selected(const Keystore& ks, const SelectArgs& a) {
  if (a.all == !a.subjects.empty()) throw UsageError("name one or more subjects, or pass --all");
  if (!a.all) return a.subjects;
  std::vector<std::string> out;
  for (const auto& m : ks.packages()) out.push_back(m.subject);
  return out;
}

int keystore_phase(Context& ctx, const SelectArgs& a, bool install) {
  Keystore ks = Keystore::open(ctx.keystore_dir());
  const auto subjects = selected(ks, a);
  ordered done = ordered::array();
  for (const auto& s : subjects) {
    if (install) ks.install_package(s);
    else ks.build_package(s, ctx.clock());
    done.push_back(s);
    if (!ctx.json()) ctx.out() << (install ? "installed " : "built ") << package_dir_name(s) << "\n";
  }
  if (ctx.json()) {
    ordered j;
    j[install ? "installed" : "built"] = std::move(done);
    ctx.emit(j);
  }
  return kOk;
}

int keystore_verify(Context& ctx, const SelectArgs& a) {
  const Keystore ks = Keystore::open(ctx.keystore_dir());
  bool ok = true;
  ordered packages = ordered::array();
  for (const auto& s : selected(ks, a)) {
    const PackageStatus st = ks.status(s);
    const bool good = st.installed && st.permissions_verified && st.governance_verified;
    ok = ok && good;
    if (ctx.json()) {
      ordered j;
      j["subject"] = s;
      j["built"] = st.built;
      j["installed"] = st.installed;
      j["permissions_verified"] = st.permissions_verified;
      j["governance_verified"] = st.governance_verified;
      packages.push_back(std::move(j));
    } else {
      ctx.out() << (good ? "ok     " : "FAILED ") << package_dir_name(s) << " built=" << st.built
                << " installed=" << st.installed << " permissions=" << st.permissions_verified
                << " governance=" << st.governance_verified << "\n";
    }
  }
  if (ctx.json()) {
    ordered j;
    j["packages"] = std::move(packages);
    j["ok"] = ok;
    ctx.emit(j);
  }
  return ok ? kOk : kDenied;
}

int keystore_list(Context& ctx) {
  const Keystore ks = Keystore::open(ctx.keystore_dir());
  ordered packages = ordered::array();
  for (const auto& m : ks.packages()) {
    const PackageStatus st = ks.status(m.subject);
    const char* phase = st.installed ? "installed" : st.built ? "built" : "created";
    if (ctx.json()) {
      ordered j;
      j["subject"] = m.subject;
      j["package"] = package_dir_name(m.subject);
      j["phase"] = phase;
      packages.push_back(std::move(j));
    } else {
      ctx.out() << package_dir_name(m.subject) << "\t" << m.subject << "\t" << phase << "\n";
    }
  }
  if (ctx.json()) ctx.emit(packages);
  return kOk;
}

// ---- extract / verify ---------------------------------------------------

struct ExtractArgs {
  std::string scenario, output;
};

int extract(Context& ctx, const ExtractArgs& a) {
  const ScenarioGraph g = parse_scenario(read_input(a.scenario), a.scenario);
  write_output(a.output, serialize_policy(extract_min_policy(g)), ctx.out());
  return kOk;
}

struct VerifyArgs {
  std::string scenario, policy, mode = "ardent", model = "ideal", dot, report;
  std::vector<std::string> amend_subjects;
  bool amend_all = false;
  bool fold = false;
};

void print_counts(std::ostream& out, const char* name, const ClassCounts& c) {
  out << name << " tp=" << c.tp << " tn=" << c.tn << " fp=" << c.fp << " fn=" << c.fn << "\n";
}

int verify(Context& ctx, const VerifyArgs& a) {
  const ScenarioGraph scenario = parse_scenario(read_input(a.scenario), a.scenario);
  const PolicyTree policy = a.policy.empty() ? extract_min_policy(scenario) : load_policy_file(a.policy);
  VerifyOptions opts;
  opts.mode = parse_enum<MappingMode>(a.mode, parse_mapping_mode, "mapping mode");
  opts.model = parse_enum<TransportModel>(a.model, parse_transport_model, "transport model");
  opts.compile.amend_empty_partition = a.amend_all;
  opts.amend_subjects = {a.amend_subjects.begin(), a.amend_subjects.end()};
  opts.fold = a.fold;
  const VerifyRun run = run_verification(scenario, policy, opts, ctx.clock());

  if (!a.dot.empty()) write_output(a.dot, report_dot(run.report), ctx.out());
  if (!a.report.empty()) write_output(a.report, report_json(run.report), ctx.out());
  if (ctx.json()) {
    ctx.out() << report_json(run.report);
  } else {
    print_counts(ctx.out(), "semantic ", run.report.semantic);
    print_counts(ctx.out(), "transport", run.report.transport);
    for (const auto& r : run.report.probes) {
      for (auto [cls, source] : {std::pair{r.semantic_class, "semantic"}, std::pair{r.transport_class, "transport"}}) {
        if (cls != EdgeClass::fp && cls != EdgeClass::fn) continue;
        ctx.out() << to_string(cls) << " " << source << " " << r.probe.subject << " " << to_string(r.probe.verb)
                  << " " << to_string(r.probe.kind) << " " << r.probe.object << "\n";
      }
    }
    ctx.out() << "pass: " << (run.report.pass ? "true" : "false") << "\n";
  }
  return run.report.pass ? kOk : kDenied;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Policy compiler and verification toolkit for publish/subscribe access control", "graphmac"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals globals;
  app.add_option("--keystore", globals.keystore, "Keystore workspace directory");
  app.add_option("--clock", globals.clock, "Pin the clock to an RFC 3339 timestamp");
  app.add_option("--format", globals.format, "Output format")->check(CLI::IsMember({"text", "json"}));

  std::function<int(Context&)> action;

  // policy
  auto* policy = app.add_subcommand("policy", "Inspect and evaluate policy files")->fallthrough();
  policy->require_subcommand(1);
  PolicyCheckArgs check_args;
  auto* check = policy->add_subcommand("check", "Evaluate one request against a policy")->fallthrough();
  check->add_option("policy-file", check_args.file)->required();
  check->add_option("subject", check_args.subject)->required();
  check->add_option("verb", check_args.verb)->required();
  check->add_option("kind", check_args.kind)->required();
  check->add_option("object", check_args.object)->required();
  check->callback([&] { action = [&](Context& c) { return policy_check(c, check_args); }; });

  PolicyFmtArgs fmt_args;
  auto* fmt = policy->add_subcommand("fmt", "Print a policy in canonical form")->fallthrough();
  fmt->add_option("policy-file", fmt_args.file)->required();
  fmt->add_flag("--resolve", fmt_args.resolve, "Inline imports first");
  fmt->add_option("-o,--output", fmt_args.output, "Write to a file instead of stdout");
  fmt->callback([&] { action = [&](Context& c) { return policy_fmt(c, fmt_args); }; });

  // compile
  CompileArgs compile_args;
  auto* comp = app.add_subcommand("compile", "Compile a permissions document for one subject")->fallthrough();
  comp->add_option("policy-file", compile_args.file)->required();
  comp->add_option("--subject", compile_args.subject, "Subject node name")->required();
  comp->add_option("--mode", compile_args.mode, "ardent or bouncy");
  comp->add_option("--domain", compile_args.domains, "Domain id (repeatable)");
  comp->add_option("--validity-days", compile_args.validity_days);
  comp->add_flag("--amend", compile_args.amend, "Append the empty partition to ALLOW rules");
  comp->add_option("--amend-target", compile_args.amend_targets, "Restrict amendment to matching objects");
  comp->add_flag("--fold", compile_args.fold, "Fold compatible adjacent rules");
  comp->add_option("-o,--output", compile_args.output);
  comp->callback([&] { action = [&](Context& c) { return compile(c, compile_args); }; });

  // pdp
  auto* pdp = app.add_subcommand("pdp", "Transport decision point")->fallthrough();
  pdp->require_subcommand(1);
  PdpArgs pdp_args;
  auto* eval = pdp->add_subcommand("eval", "Evaluate a transport request")->fallthrough();
  eval->add_option("permissions-file", pdp_args.file)->required();
  eval->add_option("--subject-name", pdp_args.subject_name)->required();
  eval->add_option("--domain", pdp_args.domain)->required();
  eval->add_option("--action", pdp_args.action)->required();
  eval->add_option("--topic", pdp_args.topic)->required();
  eval->add_option("--partition", pdp_args.partitions, "Requested partition (repeatable; default \"\")");
  eval->add_option("--tag", pdp_args.tags, "key=value (repeatable)");
  eval->add_option("--at", pdp_args.at, "Evaluation time (RFC 3339)");
  eval->callback([&] { action = [&](Context& c) { return pdp_eval(c, pdp_args); }; });

  // keystore
  auto* ks = app.add_subcommand("keystore", "Provisioning workspace")->fallthrough();
  ks->require_subcommand(1);
  InitArgs init_args;
  auto* init = ks->add_subcommand("init", "Create a keystore and its trust root")->fallthrough();
  init->add_option("--ca-name", init_args.ca_name);
  init->add_option("--domain", init_args.domains, "Domain id (repeatable)");
  init->add_option("--validity-days", init_args.validity_days);
  init->add_option("--mode", init_args.mode);
  init->add_option("--signer", init_args.signer, "mock or external");
  init->add_option("--seed", init_args.seed, "Extra input to the CA key derivation");
  init->callback([&] { action = [&](Context& c) { return keystore_init(c, init_args); }; });

  CreateArgs create_args;
  auto* create = ks->add_subcommand("create", "Add a package for a subject")->fallthrough();
  create->add_option("subject", create_args.subject)->required();
  create->add_option("policy", create_args.policies)->required();
  create->add_flag("--amend", create_args.amend);
  create->add_option("--amend-target", create_args.amend_targets);
  create->callback([&] { action = [&](Context& c) { return keystore_create(c, create_args); }; });

  SelectArgs build_args, install_args, verify_ks_args;
  auto add_select = [](CLI::App* sub, SelectArgs& a) {
    sub->add_option("subjects", a.subjects);
    sub->add_flag("--all", a.all, "Every package in the keystore");
  };
  auto* build = ks->add_subcommand("build", "Compile staged artifacts")->fallthrough();
  add_select(build, build_args);
  build->callback([&] { action = [&](Context& c) { return keystore_phase(c, build_args, false); }; });
  auto* install = ks->add_subcommand("install", "Sign and install built artifacts")->fallthrough();
  add_select(install, install_args);
  install->callback([&] { action = [&](Context& c) { return keystore_phase(c, install_args, true); }; });
  auto* ksverify = ks->add_subcommand("verify", "Check installed signatures")->fallthrough();
  add_select(ksverify, verify_ks_args);
  ksverify->callback([&] { action = [&](Context& c) { return keystore_verify(c, verify_ks_args); }; });
  auto* list = ks->add_subcommand("list", "List packages and their phase")->fallthrough();
  list->callback([&] { action = [&](Context& c) { return keystore_list(c); }; });

  // extract
  ExtractArgs extract_args;
  auto* ext = app.add_subcommand("extract", "Derive the minimal policy of a scenario")->fallthrough();
  ext->add_option("--scenario", extract_args.scenario)->required();
  ext->add_option("-o,--output", extract_args.output);
  ext->callback([&] { action = [&](Context& c) { return extract(c, extract_args); }; });

  // verify
  VerifyArgs verify_args;
  auto* ver = app.add_subcommand("verify", "Label the complete probe graph and compare")->fallthrough();
  ver->add_option("--scenario", verify_args.scenario)->required();
  ver->add_option("--policy", verify_args.policy, "Policy to compile (default: the extracted minimal policy)");
  ver->add_option("--mode", verify_args.mode);
  ver->add_option("--transport-model", verify_args.model, "ideal or ardent_startup");
  ver->add_option("--amend-subject", verify_args.amend_subjects, "Amend this subject's document (repeatable)");
  ver->add_flag("--amend-all", verify_args.amend_all);
  ver->add_flag("--fold", verify_args.fold);
  ver->add_option("--dot", verify_args.dot, "Write a Graphviz rendering");
  ver->add_option("--report", verify_args.report, "Write the JSON report");
  ver->callback([&] { action = [&](Context& c) { return verify(c, verify_args); }; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  Context ctx(globals, out, err);
  try {
    return action(ctx);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    // what() already carries the code name and any diagnostics.
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: internal: " << e.what() << "\n";
    return kInternal;
  }
}

}  // namespace graphmac::cli
