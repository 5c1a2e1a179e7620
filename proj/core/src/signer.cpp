#include "graphmac/signer.hpp"

#include "crypto.hpp"
#include "graphmac/error.hpp"

namespace graphmac {

std::string_view to_string(SignerKind k) { return k == SignerKind::mock ? "mock" : "external"; }

std::optional<SignerKind> parse_signer_kind(std::string_view text) {
  if (text == "mock") return SignerKind::mock;
  if (text == "external") return SignerKind::external;
  return std::nullopt;
}

MockSigner::MockSigner(std::string name, std::string key) : name_(std::move(name)), key_(std::move(key)) {}

std::string MockSigner::sign(std::string_view payload) const { return crypto::hmac_sha256(key_, payload); }

std::unique_ptr<Signer> make_signer(SignerKind kind, std::string name, std::string key) {
  if (kind == SignerKind::mock) return std::make_unique<MockSigner>(std::move(name), std::move(key));
  throw Error(ErrorCode::unknown_signer, "no signer backend is available for kind '" + std::string(to_string(kind)) + "'");
}

SignedArtifact sign_document(const Signer& signer, std::string_view payload) {
  return {std::string(payload), signer.name(), signer.sign(payload), signer.algorithm()};
}

bool verify_document(const TrustRoot& root, const SignedArtifact& artifact) {
  if (artifact.algorithm != kMockAlgorithm) {
    throw Error(ErrorCode::unknown_signer, "cannot verify algorithm '" + artifact.algorithm + "'");
  }
  if (artifact.signer_name != root.name || root.algorithm != artifact.algorithm) return false;
  return crypto::constant_time_equal(crypto::hmac_sha256(root.key, artifact.payload), artifact.signature);
}

namespace {

constexpr std::size_t kColumns = 64;

bool header_safe(std::string_view s) { return s.find('\n') == std::string_view::npos && !s.empty(); }

[[noreturn]] void malformed(const std::string& why) {
  throw Error(ErrorCode::malformed_artifact, "signed artifact is malformed: " + why);
}

}  // namespace

std::string serialize_artifact(const SignedArtifact& a) {
  if (!header_safe(a.signer_name) || !header_safe(a.algorithm)) {
    malformed("signer name and algorithm must be single non-empty lines");
  }
  std::string out;
  out += "signer: " + a.signer_name + "\n";
  out += "algorithm: " + a.algorithm + "\n";
  out += "digest: sha256:" + crypto::sha256_hex(a.payload) + "\n";
  out += "signature: " + crypto::to_hex(a.signature) + "\n";
  out += "\n";
  const std::string b64 = crypto::base64_encode(a.payload);
  for (std::size_t i = 0; i < b64.size(); i += kColumns) {
    out += b64.substr(i, kColumns);
    out += '\n';
  }
  return out;
}

SignedArtifact parse_artifact(std::string_view text) {
  std::size_t cursor = 0;
  auto next_line = [&]() -> std::string_view {
    const auto nl = text.find('\n', cursor);
    if (nl == std::string_view::npos) malformed("unterminated line");
    auto line = text.substr(cursor, nl - cursor);
    cursor = nl + 1;
    return line;
  };
  auto field = [&](std::string_view key) {
    auto line = next_line();
    const std::string prefix = std::string(key) + ": ";
    if (line.substr(0, prefix.size()) != prefix) malformed("expected '" + std::string(key) + "' header");
    return std::string(line.substr(prefix.size()));
  };

  SignedArtifact a;
  a.signer_name = field("signer");
  a.algorithm = field("algorithm");
  const std::string digest = field("digest");
  auto signature = crypto::from_hex(field("signature"));
  if (!signature) malformed("signature is not lowercase hex");
  a.signature = std::move(*signature);
  if (!next_line().empty()) malformed("missing blank line after header");

  std::string b64;
  while (cursor < text.size()) b64 += next_line();
  auto payload = crypto::base64_decode_strict(b64);
  if (!payload) malformed("payload is not canonical base64");
  a.payload = std::move(*payload);

  if (digest != "sha256:" + crypto::sha256_hex(a.payload)) malformed("payload digest mismatch");
  if (serialize_artifact(a) != text) malformed("container is not in canonical form");
  return a;
}

bool verify_container(const TrustRoot& root, std::string_view text) {
  try {
    return verify_document(root, parse_artifact(text));
  } catch (const Error&) {
    return false;
  }
}

}  // namespace graphmac
