#include <gtest/gtest.h>

#include <random>

#include "crypto.hpp"
#include "graphmac/error.hpp"
#include "graphmac/signer.hpp"

namespace graphmac {
namespace {

TEST(Signer, MockIsHmacSha256) {
  // RFC 4231 test case 2.
  MockSigner s("ca", "Jefe");
  EXPECT_EQ(crypto::to_hex(s.sign("what do ya want for nothing?")),
            "5bdcc146bf60754e6a042426089575c75a003f089d2739839dec58b964ec3843");
  EXPECT_EQ(s.algorithm(), kMockAlgorithm);
}

TEST(Signer, SignAndVerify) {
  MockSigner s("ca", "key");
  const auto art = sign_document(s, "<permissions/>");
  EXPECT_EQ(art.signer_name, "ca");
  EXPECT_EQ(art.payload, "<permissions/>");
  EXPECT_TRUE(verify_document(s.trust_root(), art));

  auto tampered = art;
  tampered.payload += " ";
  EXPECT_FALSE(verify_document(s.trust_root(), tampered));
  EXPECT_FALSE(verify_document(MockSigner("ca", "other").trust_root(), art));
  EXPECT_FALSE(verify_document(MockSigner("someone", "key").trust_root(), art));
}

TEST(Signer, UnknownAlgorithmAndExternalBackend) {
  MockSigner s("ca", "key");
  auto art = sign_document(s, "x");
  art.algorithm = "rsa-pss";
  try {
    verify_document(s.trust_root(), art);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::unknown_signer);
  }
  EXPECT_THROW(make_signer(SignerKind::external, "ca", "key"), Error);
  EXPECT_EQ(make_signer(SignerKind::mock, "ca", "key")->sign("x"), s.sign("x"));
  EXPECT_EQ(parse_signer_kind("mock"), SignerKind::mock);
  EXPECT_FALSE(parse_signer_kind("pkcs11"));
}

TEST(Container, RoundTripAndFormat) {
  MockSigner s("ca", "key");
  const std::string payload(200, 'p');
  const auto art = sign_document(s, payload);
  const std::string text = serialize_artifact(art);
  EXPECT_EQ(text.rfind("signer: ca\nalgorithm: mock-hmac-sha256\ndigest: sha256:", 0), 0u);
  EXPECT_NE(text.find("\n\n"), std::string::npos);
  EXPECT_EQ(parse_artifact(text), art);
  EXPECT_TRUE(verify_container(s.trust_root(), text));
  const auto body = text.substr(text.find("\n\n") + 2);
  EXPECT_EQ(body.find('\n'), 64u);
}

TEST(Container, StrictParsing) {
  MockSigner s("ca", "key");
  const std::string text = serialize_artifact(sign_document(s, "payload"));
  EXPECT_THROW(parse_artifact(text + "\n"), Error);
  EXPECT_THROW(parse_artifact("signer: ca\n"), Error);
  std::string wrong_digest = text;
  wrong_digest[wrong_digest.find("sha256:") + 7] ^= 1;
  EXPECT_THROW(parse_artifact(wrong_digest), Error);
  EXPECT_FALSE(verify_container(s.trust_root(), wrong_digest));
  EXPECT_FALSE(verify_container(s.trust_root(), ""));
}

TEST(ContainerProperty, EveryByteFlipIsDetected) {
  MockSigner s("ca", "key");
  const std::string text = serialize_artifact(sign_document(s, std::string(300, 'x') + "<grant/>"));
  std::mt19937_64 rng(61);
  for (int i = 0; i < 500; ++i) {
    std::string t = text;
    const auto pos = std::uniform_int_distribution<std::size_t>(0, t.size() - 1)(rng);
    const auto bit = static_cast<char>(1 << std::uniform_int_distribution<int>(0, 7)(rng));
    t[pos] = static_cast<char>(t[pos] ^ bit);
    ASSERT_FALSE(verify_container(s.trust_root(), t)) << "flip at " << pos;
  }
}

}  // namespace
}  // namespace graphmac
