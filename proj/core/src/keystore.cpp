#include "graphmac/keystore.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <system_error>

#include "crypto.hpp"
#include "graphmac/eval.hpp"
#include "graphmac/glob.hpp"
#include "xml.hpp"

namespace graphmac {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kConfigFile = "keystore.cfg";
constexpr std::string_view kManifestFile = "manifest.cfg";
constexpr std::string_view kLayoutVersion = "1";

[[noreturn]] void io_failure(const std::string& what, const fs::path& path) {
  throw Error(ErrorCode::io_failure, what + ": " + path.string());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) io_failure("cannot read", path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, std::string_view content, bool secret = false) {
  {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) io_failure("cannot write", path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) io_failure("cannot write", path);
  }
  if (secret) fs::permissions(path, fs::perms::owner_read | fs::perms::owner_write, fs::perm_options::replace);
}

void make_private_dir(const fs::path& path) {
  fs::create_directories(path);
  fs::permissions(path, fs::perms::owner_all, fs::perm_options::replace);
}

// Builds a directory beside `dest` and swaps it in once `fill` succeeds.
template <typename Fill>
void stage_directory(const fs::path& dest, Fill&& fill) {
  const fs::path staging = dest.parent_path() / ("." + dest.filename().string() + ".staging");
  std::error_code ec;
  fs::remove_all(staging, ec);
  try {
    fs::create_directories(staging);
    fill(staging);
    fs::remove_all(dest);
    fs::rename(staging, dest);
  } catch (const fs::filesystem_error& e) {
    fs::remove_all(staging, ec);
    throw Error(ErrorCode::io_failure, e.what());
  } catch (...) {
    fs::remove_all(staging, ec);
    throw;
  }
}

using KeyValues = std::multimap<std::string, std::string>;

KeyValues parse_key_values(const std::string& text, const fs::path& source) {
  KeyValues out;
  std::istringstream in(text);
  std::string line;
  std::uint32_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::invalid_config, "expected key=value",
                  {Diagnostic{source.string(), lineno, 1, "line has no '='"}});
    }
    out.emplace(line.substr(0, eq), line.substr(eq + 1));
  }
  return out;
}

std::string require(const KeyValues& kv, const std::string& key, const fs::path& source) {
  auto it = kv.find(key);
  if (it == kv.end()) throw Error(ErrorCode::invalid_config, source.string() + " is missing '" + key + "'");
  return it->second;
}

std::vector<std::string> all_of(const KeyValues& kv, const std::string& key) {
  std::vector<std::string> out;
  auto [lo, hi] = kv.equal_range(key);
  for (auto it = lo; it != hi; ++it) out.push_back(it->second);
  return out;
}

std::int32_t parse_int(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const long v = std::stol(text, &used);
    if (used != text.size() || v < INT32_MIN || v > INT32_MAX) throw std::out_of_range(what);
    return static_cast<std::int32_t>(v);
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::invalid_config, what + " '" + text + "' is not an integer");
  }
}

std::string join_domains(const std::vector<std::int32_t>& domains) {
  std::string out;
  for (auto d : domains) {
    if (!out.empty()) out += ',';
    out += std::to_string(d);
  }
  return out;
}

std::vector<std::int32_t> split_domains(const std::string& text) {
  std::vector<std::int32_t> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(parse_int(item, "domain id"));
  return out;
}

std::string config_text(const KeystoreConfig& c, Timestamp created) {
  std::string out = "# graphmac keystore\n";
  out += "version=" + std::string(kLayoutVersion) + "\n";
  out += "ca_name=" + c.ca_name + "\n";
  out += "created=" + format_rfc3339(created) + "\n";
  out += "domains=" + join_domains(c.domains) + "\n";
  out += "validity_days=" + std::to_string(c.validity_days) + "\n";
  out += "mapping_mode=" + std::string(to_string(c.mode)) + "\n";
  out += "signer=" + std::string(to_string(c.signer)) + "\n";
  return out;
}

std::string manifest_text(const PackageManifest& m) {
  std::string out = "subject=" + m.subject + "\n";
  for (const auto& p : m.policy_sources) out += "policy=" + p + "\n";
  out += std::string("amend_empty_partition=") + (m.amend_empty_partition ? "true" : "false") + "\n";
  for (const auto& t : m.amend_targets) out += "amend_target=" + t + "\n";
  return out;
}

PackageManifest parse_manifest(const fs::path& path) {
  const auto kv = parse_key_values(read_file(path), path);
  PackageManifest m;
  m.subject = require(kv, "subject", path);
  m.policy_sources = all_of(kv, "policy");
  const auto amend = require(kv, "amend_empty_partition", path);
  if (amend != "true" && amend != "false") throw Error(ErrorCode::invalid_config, "amend_empty_partition must be true or false");
  m.amend_empty_partition = amend == "true";
  m.amend_targets = all_of(kv, "amend_target");
  return m;
}

std::string trust_root_text(const TrustRoot& root) {
  return "name: " + root.name + "\nalgorithm: " + root.algorithm + "\nkey: " + crypto::to_hex(root.key) + "\n";
}

std::string identity_text(const IdentityCredential& id, bool secret) {
  std::string out = "subject: " + id.subject_name + "\nissuer: " + id.issuer + "\n";
  out += secret ? "private: " + crypto::to_hex(id.private_token) + "\n"
                : "public: " + crypto::to_hex(id.public_token) + "\n";
  return out;
}

PolicyTree load_sources(const std::vector<std::string>& sources) {
  PolicyTree merged;
  for (const auto& src : sources) {
    PolicyTree t = load_policy_file(src);
    if (merged.source_path.empty()) merged.source_path = t.source_path;
    for (auto& p : t.profiles) merged.profiles.push_back(std::move(p));
  }
  return merged;
}

void check_subject(const std::string& subject) {
  if (subject.size() < 2 || subject.front() != '/' || has_glob_metachar(subject) || subject.back() == '/') {
    throw Error(ErrorCode::invalid_request, "package subject must be an absolute node name, got '" + subject + "'");
  }
}

}  // namespace

std::string package_dir_name(std::string_view subject) { return grant_name_for(subject); }

void validate(const KeystoreConfig& c) {
  if (c.validity_days < 1) throw Error(ErrorCode::invalid_config, "validity_days must be at least 1");
  if (c.domains.empty()) throw Error(ErrorCode::invalid_config, "at least one domain id is required");
  if (c.ca_name.empty() || c.ca_name.find_first_of("\n=") != std::string::npos) {
    throw Error(ErrorCode::invalid_config, "ca_name must be a non-empty single line without '='");
  }
}

std::string governance_document(const KeystoreConfig& c) {
  xml::Writer w;
  w.open("governance");
  w.open("domain_access_rules");
  w.open("domain_rule");
  w.open("domains");
  for (auto d : c.domains) w.leaf("id", std::to_string(d));
  w.close();
  w.leaf("allow_unauthenticated_participants", "false");
  w.leaf("enable_join_access_control", "true");
  w.leaf("discovery_protection_kind", "ENCRYPT");
  w.leaf("liveliness_protection_kind", "ENCRYPT");
  w.leaf("rtps_protection_kind", "SIGN");
  w.open("topic_access_rules");
  w.open("topic_rule");
  w.leaf("topic_expression", "*");
  w.leaf("enable_discovery_protection", "true");
  w.leaf("enable_read_access_control", "true");
  w.leaf("enable_write_access_control", "true");
  w.leaf("metadata_protection_kind", "ENCRYPT");
  w.leaf("data_protection_kind", "ENCRYPT");
  w.close();
  w.close();
  w.close();
  w.close();
  w.close();
  return w.finish();
}

Keystore::Keystore(KeystoreConfig config, Timestamp created, std::string ca_key)
    : config_(std::move(config)), created_(created), ca_key_(std::move(ca_key)) {}

Keystore Keystore::init(const KeystoreConfig& input, const Clock& clock) {
  validate(input);
  KeystoreConfig config = input;
  std::sort(config.domains.begin(), config.domains.end());
  config.domains.erase(std::unique(config.domains.begin(), config.domains.end()), config.domains.end());
  if (config.root.empty()) throw Error(ErrorCode::invalid_config, "keystore root directory is required");
  config.root = fs::absolute(config.root).lexically_normal();
  if (config.root.filename().empty()) config.root = config.root.parent_path();

  if (fs::exists(config.root / kConfigFile)) {
    throw Error(ErrorCode::already_initialized, "keystore already initialized at " + config.root.string());
  }
  if (fs::exists(config.root) && (!fs::is_directory(config.root) || !fs::is_empty(config.root))) {
    throw Error(ErrorCode::io_failure, "keystore root exists and is not an empty directory: " + config.root.string());
  }

  const Timestamp created = clock();
  const std::string ca_key =
      crypto::sha256("graphmac-ca\n" + config.ca_name + "\n" + format_rfc3339(created) + "\n" + config.seed);
  const TrustRoot root{config.ca_name, std::string(kMockAlgorithm), ca_key};

  fs::create_directories(config.root.parent_path());
  stage_directory(config.root, [&](const fs::path& dir) {
    write_file(dir / kConfigFile, config_text(config, created));
    fs::create_directories(dir / "ca" / "public");
    write_file(dir / "ca" / "public" / "ca.cert", trust_root_text(root));
    make_private_dir(dir / "ca" / "private");
    write_file(dir / "ca" / "private" / "ca.key", crypto::to_hex(ca_key) + "\n", true);
    fs::create_directory(dir / "src");
    fs::create_directory(dir / "build");
    fs::create_directory(dir / "install");
  });
  return Keystore(config, created, ca_key);
}

Keystore Keystore::open(const fs::path& root_in) {
  const fs::path root = fs::absolute(root_in).lexically_normal();
  const fs::path cfg = root / kConfigFile;
  if (!fs::exists(cfg)) throw Error(ErrorCode::not_initialized, "no keystore at " + root.string());
  const auto kv = parse_key_values(read_file(cfg), cfg);
  if (require(kv, "version", cfg) != kLayoutVersion) throw Error(ErrorCode::invalid_config, "unsupported keystore layout version");

  KeystoreConfig c;
  c.root = root;
  if (c.root.filename().empty()) c.root = c.root.parent_path();
  c.ca_name = require(kv, "ca_name", cfg);
  c.domains = split_domains(require(kv, "domains", cfg));
  c.validity_days = parse_int(require(kv, "validity_days", cfg), "validity_days");
  auto mode = parse_mapping_mode(require(kv, "mapping_mode", cfg));
  if (!mode) throw Error(ErrorCode::invalid_config, "unknown mapping_mode");
  c.mode = *mode;
  auto signer = parse_signer_kind(require(kv, "signer", cfg));
  if (!signer) throw Error(ErrorCode::invalid_config, "unknown signer kind");
  c.signer = *signer;
  validate(c);
  auto created = parse_rfc3339(require(kv, "created", cfg));
  if (!created) throw Error(ErrorCode::invalid_config, "created is not an RFC 3339 timestamp");

  std::string key_hex = read_file(root / "ca" / "private" / "ca.key");
  while (!key_hex.empty() && key_hex.back() == '\n') key_hex.pop_back();
  auto key = crypto::from_hex(key_hex);
  if (!key) throw Error(ErrorCode::invalid_config, "CA key is not hex");
  return Keystore(c, *created, *key);
}

TrustRoot Keystore::trust_root() const { return {config_.ca_name, std::string(kMockAlgorithm), ca_key_}; }

fs::path Keystore::src_dir(const std::string& subject) const { return root() / "src" / package_dir_name(subject); }
fs::path Keystore::build_dir(const std::string& subject) const { return root() / "build" / package_dir_name(subject); }
fs::path Keystore::install_dir(const std::string& subject) const {
  return root() / "install" / package_dir_name(subject);
}

CreateResult Keystore::create_package(const std::string& subject, const std::vector<std::string>& policy_sources,
                                      bool amend_empty_partition, std::vector<std::string> amend_targets) {
  check_subject(subject);
  if (policy_sources.empty()) throw Error(ErrorCode::invalid_config, "a package needs at least one policy source");
  if (fs::exists(src_dir(subject))) throw Error(ErrorCode::duplicate_package, "package already exists for " + subject);

  CreateResult result;
  result.manifest.subject = subject;
  for (const auto& p : policy_sources) {
    result.manifest.policy_sources.push_back(fs::weakly_canonical(fs::absolute(p)).string());
  }
  result.manifest.amend_empty_partition = amend_empty_partition;
  result.manifest.amend_targets = std::move(amend_targets);

  const PolicyTree tree = load_sources(result.manifest.policy_sources);
  if (applicable_profiles(tree, subject).empty()) {
    result.warnings.push_back(
        Diagnostic{result.manifest.policy_sources.front(), 0, 0, "no profile applies to subject '" + subject + "'"});
  }

  stage_directory(src_dir(subject),
                  [&](const fs::path& dir) { write_file(dir / kManifestFile, manifest_text(result.manifest)); });
  return result;
}

PackageManifest Keystore::package(const std::string& subject) const {
  const fs::path path = src_dir(subject) / kManifestFile;
  if (!fs::exists(path)) throw Error(ErrorCode::unknown_package, "no package for subject " + subject);
  return parse_manifest(path);
}

std::vector<PackageManifest> Keystore::packages() const {
  std::vector<PackageManifest> out;
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(root() / "src")) {
    if (entry.is_directory() && fs::exists(entry.path() / kManifestFile)) dirs.push_back(entry.path());
  }
  std::sort(dirs.begin(), dirs.end());
  for (const auto& d : dirs) out.push_back(parse_manifest(d / kManifestFile));
  return out;
}

IdentityCredential Keystore::identity(const std::string& subject) const {
  IdentityCredential id;
  id.subject_name = subject;
  id.issuer = config_.ca_name;
  id.private_token = crypto::hmac_sha256(ca_key_, "identity:" + subject);
  id.public_token = crypto::sha256(id.private_token);
  return id;
}

void Keystore::build_package(const std::string& subject, const Clock& clock) {
  const PackageManifest m = package(subject);
  const PolicyTree tree = load_sources(m.policy_sources);

  CompileOptions opts;
  opts.domains = config_.domains;
  opts.validity_days = config_.validity_days;
  opts.amend_empty_partition = m.amend_empty_partition;
  opts.amend_targets = m.amend_targets;
  const PermissionsDocument doc = compile_permissions(tree, subject, config_.mode, opts, clock);
  const IdentityCredential id = identity(subject);

  fs::create_directories(root() / "build");
  stage_directory(build_dir(subject), [&](const fs::path& dir) {
    write_file(dir / "permissions.xml", serialize_permissions(doc));
    write_file(dir / "governance.xml", governance_document(config_));
    write_file(dir / "identity.pub", identity_text(id, false));
    make_private_dir(dir / "private");
    write_file(dir / "private" / "identity.key", identity_text(id, true), true);
  });
}

void Keystore::install_package(const std::string& subject) {
  package(subject);
  const fs::path built = build_dir(subject);
  for (const char* f : {"permissions.xml", "governance.xml", "identity.pub", "private/identity.key"}) {
    if (!fs::exists(built / f)) throw Error(ErrorCode::not_built, "package " + subject + " has not been built");
  }
  const auto signer = make_signer(config_.signer, config_.ca_name, ca_key_);
  const auto permissions = sign_document(*signer, read_file(built / "permissions.xml"));
  const auto governance = sign_document(*signer, read_file(built / "governance.xml"));
  const std::string pub = read_file(built / "identity.pub");
  const std::string key = read_file(built / "private" / "identity.key");

  fs::create_directories(root() / "install");
  stage_directory(install_dir(subject), [&](const fs::path& dir) {
    write_file(dir / "permissions.p7s", serialize_artifact(permissions));
    write_file(dir / "governance.p7s", serialize_artifact(governance));
    write_file(dir / "identity.pub", pub);
    make_private_dir(dir / "private");
    write_file(dir / "private" / "identity.key", key, true);
  });
}

PackageStatus Keystore::status(const std::string& subject) const {
  package(subject);
  PackageStatus s;
  s.built = fs::exists(build_dir(subject) / "permissions.xml");
  const fs::path inst = install_dir(subject);
  s.installed = fs::exists(inst / "permissions.p7s");
  if (s.installed) {
    const TrustRoot root = trust_root();
    s.permissions_verified = verify_container(root, read_file(inst / "permissions.p7s"));
    s.governance_verified =
        fs::exists(inst / "governance.p7s") && verify_container(root, read_file(inst / "governance.p7s"));
  }
  return s;
}

}  // namespace graphmac
