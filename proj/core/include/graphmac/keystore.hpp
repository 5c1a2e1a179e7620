#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "graphmac/dds.hpp"
#include "graphmac/error.hpp"
#include "graphmac/signer.hpp"
#include "graphmac/time.hpp"

namespace graphmac {

struct KeystoreConfig {
  std::filesystem::path root;
  std::string ca_name = "graphmac-ca";
  std::vector<std::int32_t> domains{0};
  std::int32_t validity_days = 365;
  MappingMode mode = MappingMode::ardent;
  SignerKind signer = SignerKind::mock;
  std::string seed;  // mixed into the CA key; empty is allowed
};

// Throws Error(invalid_config).
void validate(const KeystoreConfig& config);

struct PackageManifest {
  std::string subject;
  std::vector<std::string> policy_sources;  // absolute paths
  bool amend_empty_partition = false;
  std::vector<std::string> amend_targets;

  bool operator==(const PackageManifest&) const = default;
};

// "/ns/talker" -> "ns__talker".
std::string package_dir_name(std::string_view subject);

struct IdentityCredential {
  std::string subject_name;
  std::string issuer;
  std::string public_token;   // raw bytes
  std::string private_token;  // raw bytes
};

struct CreateResult {
  PackageManifest manifest;
  std::vector<Diagnostic> warnings;
};

struct PackageStatus {
  bool built = false;
  bool installed = false;
  bool permissions_verified = false;
  bool governance_verified = false;
};

// On-disk layout under the root:
//   keystore.cfg
//   ca/public/ca.cert, ca/private/ca.key
//   src/<pkg>/manifest.cfg
//   build/<pkg>/{permissions.xml, governance.xml, identity.pub, private/identity.key}
//   install/<pkg>/{permissions.p7s, governance.p7s, identity.pub, private/identity.key}
// Every phase stages its output beside the destination and renames it into
// place, so a failed step leaves no partial directory behind.
class Keystore {
 public:
  // Throws Error(already_initialized), Error(invalid_config), Error(io_failure).
  static Keystore init(const KeystoreConfig& config, const Clock& clock = system_clock());

  // Throws Error(not_initialized).
  static Keystore open(const std::filesystem::path& root);

  const KeystoreConfig& config() const { return config_; }
  const std::filesystem::path& root() const { return config_.root; }
  Timestamp created() const { return created_; }
  TrustRoot trust_root() const;

  // Records the package; compiles nothing. Throws Error(duplicate_package),
  // Error(invalid_request) for a malformed subject, and policy parse errors.
  CreateResult create_package(const std::string& subject, const std::vector<std::string>& policy_sources,
                              bool amend_empty_partition = false, std::vector<std::string> amend_targets = {});

  // Throws Error(unknown_package).
  PackageManifest package(const std::string& subject) const;
  std::vector<PackageManifest> packages() const;

  // Compiles permissions, writes governance and identity. Throws
  // Error(unknown_package), Error(no_applicable_profile), compile errors.
  void build_package(const std::string& subject, const Clock& clock = system_clock());

  // Signs the staged payloads. Throws Error(not_built), Error(unknown_signer).
  void install_package(const std::string& subject);

  PackageStatus status(const std::string& subject) const;

  IdentityCredential identity(const std::string& subject) const;

  std::filesystem::path src_dir(const std::string& subject) const;
  std::filesystem::path build_dir(const std::string& subject) const;
  std::filesystem::path install_dir(const std::string& subject) const;

 private:
  Keystore(KeystoreConfig config, Timestamp created, std::string ca_key);

  KeystoreConfig config_;
  Timestamp created_;
  std::string ca_key_;
};

// Workspace-level governance payload; opaque to every other module.
std::string governance_document(const KeystoreConfig& config);

}  // namespace graphmac
