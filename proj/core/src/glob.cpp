#include "graphmac/glob.hpp"

#include <vector>

namespace graphmac {

namespace {

enum class TokenKind { literal, star, double_star, question, set };

struct Token {
  Token(TokenKind k, char c = 0) : kind(k), ch(c) {}

  TokenKind kind;
  char ch = 0;
  std::string members;  // for sets: pairs of (low, high) bytes
  bool negated = false;
};

// Returns the index one past the closing ']' for a set starting at `open`, or
// npos if the set is unterminated.
std::size_t set_end(std::string_view p, std::size_t open) {
  std::size_t i = open + 1;
  if (i < p.size() && (p[i] == '!' || p[i] == '^')) ++i;
  if (i < p.size() && p[i] == ']') ++i;
  while (i < p.size() && p[i] != ']') ++i;
  return i < p.size() ? i + 1 : std::string_view::npos;
}

std::vector<Token> tokenize(std::string_view p) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < p.size()) {
    const char c = p[i];
    if (c == '*') {
      std::size_t run = 0;
      while (i < p.size() && p[i] == '*') {
        ++run;
        ++i;
      }
      tokens.push_back({run >= 2 ? TokenKind::double_star : TokenKind::star});
    } else if (c == '?') {
      tokens.push_back({TokenKind::question});
      ++i;
    } else if (c == '[' && set_end(p, i) != std::string_view::npos) {
      const std::size_t end = set_end(p, i);
      Token t{TokenKind::set};
      std::size_t j = i + 1;
      if (p[j] == '!' || p[j] == '^') {
        t.negated = true;
        ++j;
      }
      const std::size_t last = end - 1;  // index of the closing ']'
      bool first = true;
      while (j < last) {
        if (p[j] == ']' && !first) break;
        const char lo = p[j];
        if (j + 2 < last && p[j + 1] == '-') {
          t.members += lo;
          t.members += p[j + 2];
          j += 3;
        } else {
          t.members += lo;
          t.members += lo;
          ++j;
        }
        first = false;
      }
      tokens.push_back(std::move(t));
      i = end;
    } else {
      tokens.push_back({TokenKind::literal, c});
      ++i;
    }
  }
  return tokens;
}

bool set_contains(const Token& t, char c) {
  bool hit = false;
  for (std::size_t k = 0; k + 1 < t.members.size(); k += 2) {
    const auto u = static_cast<unsigned char>(c);
    if (static_cast<unsigned char>(t.members[k]) <= u && u <= static_cast<unsigned char>(t.members[k + 1])) {
      hit = true;
      break;
    }
  }
  return hit != t.negated;
}

bool single_matches(const Token& t, char c) {
  switch (t.kind) {
    case TokenKind::literal: return t.ch == c;
    case TokenKind::question: return c != '/';
    case TokenKind::set: return c != '/' && set_contains(t, c);
    default: return false;
  }
}

}  // namespace

bool glob_match(std::string_view pattern, std::string_view text) {
  const std::vector<Token> tokens = tokenize(pattern);
  const std::size_t n = tokens.size();
  const std::size_t m = text.size();
  // reach[j] == true when tokens[0..i) can consume text[0..j).
  std::vector<char> reach(m + 1, 0), next(m + 1, 0);
  reach[0] = 1;
  for (std::size_t i = 0; i < n; ++i) {
    const Token& t = tokens[i];
    std::fill(next.begin(), next.end(), 0);
    switch (t.kind) {
      case TokenKind::star: {
        bool carry = false;
        for (std::size_t j = 0; j <= m; ++j) {
          if (reach[j]) carry = true;
          if (carry) next[j] = 1;
          if (j < m && text[j] == '/') carry = false;
        }
        break;
      }
      case TokenKind::double_star: {
        bool carry = false;
        for (std::size_t j = 0; j <= m; ++j) {
          if (reach[j]) carry = true;
          if (carry) next[j] = 1;
        }
        break;
      }
      default:
        for (std::size_t j = 0; j < m; ++j) {
          if (reach[j] && single_matches(t, text[j])) next[j + 1] = 1;
        }
    }
    reach.swap(next);
  }
  return reach[m] != 0;
}

bool has_glob_metachar(std::string_view text) {
  return text.find_first_of("*?[") != std::string_view::npos;
}

std::optional<std::string> glob_problem(std::string_view pattern) {
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    if (pattern[i] != '[') continue;
    const std::size_t end = set_end(pattern, i);
    if (end == std::string_view::npos) continue;
    if (pattern.substr(i, end - i).find('/') != std::string_view::npos) {
      return "character set at offset " + std::to_string(i) + " contains '/'";
    }
    i = end - 1;
  }
  return std::nullopt;
}

}  // namespace graphmac
