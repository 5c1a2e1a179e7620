#include <gtest/gtest.h>

#include <random>

#include "graphmac/glob.hpp"
#include "graphmac/policy.hpp"
#include "oracles.hpp"

namespace graphmac {
namespace {

using testing::oracle_glob;

std::vector<std::string> all_strings(const std::string& alphabet, std::size_t max_len) {
  std::vector<std::string> out{""};
  std::size_t begin = 0;
  for (std::size_t len = 1; len <= max_len; ++len) {
    const std::size_t end = out.size();
    for (std::size_t i = begin; i < end; ++i) {
      for (char c : alphabet) out.push_back(out[i] + c);
    }
    begin = end;
  }
  return out;
}

TEST(Glob, SingleStarStaysInSegment) {
  EXPECT_TRUE(glob_match("/foo/*", "/foo/bar"));
  EXPECT_FALSE(glob_match("/foo/*", "/foo/bar/baz"));
  EXPECT_TRUE(glob_match("/foo/*", "/foo/"));
}

TEST(Glob, DoubleStarCrossesSegments) {
  EXPECT_TRUE(glob_match("/**", "/a/b/c"));
  EXPECT_TRUE(glob_match("/a/**/c", "/a/x/y/c"));
  EXPECT_TRUE(glob_match("***", "a/b"));
}

TEST(Glob, QuestionAndSets) {
  EXPECT_TRUE(glob_match("/?", "/a"));
  EXPECT_FALSE(glob_match("/?", "//"));
  EXPECT_TRUE(glob_match("/[ab]", "/b"));
  EXPECT_FALSE(glob_match("/[!ab]", "/a"));
  EXPECT_TRUE(glob_match("/[^ab]", "/c"));
  EXPECT_TRUE(glob_match("/[a-c]", "/b"));
  EXPECT_TRUE(glob_match("/[]]", "/]"));
  EXPECT_TRUE(glob_match("/[a-]", "/-"));
}

TEST(Glob, UnterminatedSetIsLiteral) {
  EXPECT_TRUE(glob_match("/[ab", "/[ab"));
  EXPECT_FALSE(glob_match("/[ab", "/a"));
}

TEST(Glob, Problems) {
  EXPECT_FALSE(glob_problem("/ns/*").has_value());
  EXPECT_TRUE(glob_problem("/[a/b]").has_value());
}

TEST(Glob, Metachars) {
  EXPECT_TRUE(has_glob_metachar("/a*"));
  EXPECT_TRUE(has_glob_metachar("/a?"));
  EXPECT_TRUE(has_glob_metachar("/[a]"));
  EXPECT_FALSE(has_glob_metachar("/plain/name"));
}

TEST(Glob, AttachmentExamples) {
  EXPECT_TRUE(match_attachment({"/chatter", AttachmentKind::exact}, "/chatter"));
  EXPECT_TRUE(match_attachment({"/foo/*", AttachmentKind::glob}, "/foo/bar"));
  EXPECT_FALSE(match_attachment({"/foo/*", AttachmentKind::glob}, "/foo/bar/baz"));
  EXPECT_TRUE(match_attachment({"/**", AttachmentKind::glob}, "/a/b/c"));
  EXPECT_FALSE(match_attachment({"/foo/*", AttachmentKind::exact}, "/foo/bar"));
}

// Every pattern of length <= 4 over a metacharacter-heavy alphabet against
// every candidate of length <= 8 over {a, b, /}.
TEST(GlobOracle, ExhaustiveShortPatterns) {
  const auto candidates = all_strings("ab/", 8);
  const auto patterns = all_strings("a/*?", 4);
  std::size_t checked = 0;
  for (const auto& p : patterns) {
    for (const auto& c : candidates) {
      ASSERT_EQ(glob_match(p, c), oracle_glob(p, c)) << "pattern '" << p << "' text '" << c << "'";
      ++checked;
    }
  }
  EXPECT_GT(checked, 3'000'000u);
}

// Random patterns up to length 6 built from tokens including sets.
TEST(GlobOracle, RandomPatternsWithSets) {
  const std::vector<std::string> tokens = {"a", "b", "/", "*", "**", "?", "[ab]", "[!a]", "[a-b]", "["};
  const auto candidates = all_strings("ab/", 8);
  std::mt19937_64 rng(7);
  for (int n = 0; n < 300; ++n) {
    std::string p;
    while (true) {
      const auto& t = tokens[rng() % tokens.size()];
      if (p.size() + t.size() > 6) break;
      p += t;
      if (rng() % 4 == 0) break;
    }
    for (const auto& c : candidates) {
      ASSERT_EQ(glob_match(p, c), oracle_glob(p, c)) << "pattern '" << p << "' text '" << c << "'";
    }
  }
}

TEST(Attachment, ParseKinds) {
  EXPECT_EQ(AttachmentExpression::parse("/talker").kind, AttachmentKind::exact);
  EXPECT_EQ(AttachmentExpression::parse("/ns/*").kind, AttachmentKind::glob);
  auto forced = AttachmentExpression::parse("glob:/plain");
  EXPECT_EQ(forced.kind, AttachmentKind::glob);
  EXPECT_EQ(forced.pattern, "/plain");
  EXPECT_EQ(AttachmentExpression::parse(forced.text()), forced);
  std::string why;
  EXPECT_FALSE(AttachmentExpression::try_parse("relative", why).has_value());
  EXPECT_FALSE(why.empty());
  EXPECT_FALSE(AttachmentExpression::try_parse("", why).has_value());
}

TEST(Attachment, RelativeExpansion) {
  EXPECT_EQ(expand_relative("~/x", "/s"), "/s/x");
  EXPECT_EQ(expand_relative("/abs", "/s"), "/abs");
  EXPECT_EQ(expand_relative(AttachmentExpression{"~/*", AttachmentKind::glob}, "/ns/s").pattern, "/ns/s/*");
}

}  // namespace
}  // namespace graphmac
