#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

namespace graphmac {

enum class SignerKind : std::uint8_t { mock, external };

std::string_view to_string(SignerKind k);
std::optional<SignerKind> parse_signer_kind(std::string_view text);

inline constexpr std::string_view kMockAlgorithm = "mock-hmac-sha256";

struct SignedArtifact {
  std::string payload;
  std::string signer_name;
  std::string signature;  // raw bytes
  std::string algorithm;

  bool operator==(const SignedArtifact&) const = default;
};

// What a verifier trusts. The mock scheme is symmetric, so its root carries
// the verification key itself.
struct TrustRoot {
  std::string name;
  std::string algorithm{kMockAlgorithm};
  std::string key;

  bool operator==(const TrustRoot&) const = default;
};

class Signer {
 public:
  virtual ~Signer() = default;
  virtual std::string name() const = 0;
  virtual std::string algorithm() const = 0;
  virtual std::string sign(std::string_view payload) const = 0;
};

// HMAC-SHA256 over the payload bytes; deterministic per (key, payload).
class MockSigner final : public Signer {
 public:
  MockSigner(std::string name, std::string key);
  std::string name() const override { return name_; }
  std::string algorithm() const override { return std::string(kMockAlgorithm); }
  std::string sign(std::string_view payload) const override;
  TrustRoot trust_root() const { return {name_, std::string(kMockAlgorithm), key_}; }

 private:
  std::string name_;
  std::string key_;
};

// Throws Error(unknown_signer) for kinds without a built-in backend.
std::unique_ptr<Signer> make_signer(SignerKind kind, std::string name, std::string key);

SignedArtifact sign_document(const Signer& signer, std::string_view payload);

// True iff the artifact names the root's signer and its signature checks out
// over the unmodified payload. Throws Error(unknown_signer) for an algorithm
// this build cannot verify.
bool verify_document(const TrustRoot& root, const SignedArtifact& artifact);

// Container text: four header lines (signer, algorithm, payload digest,
// hex signature), a blank line, then the payload in 64-column base64.
std::string serialize_artifact(const SignedArtifact& artifact);

// Strict inverse of serialize_artifact: any text that would not be produced
// verbatim by serialize_artifact, or whose digest line disagrees with the
// payload, throws Error(malformed_artifact).
SignedArtifact parse_artifact(std::string_view text);

// parse + verify; malformed or unverifiable containers are simply false.
bool verify_container(const TrustRoot& root, std::string_view text);

}  // namespace graphmac
