#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace graphmac {

// Glob dialect shared by attachment expressions and permissions criteria:
//
//   *      any run of characters other than '/' (possibly empty)
//   **     any run of characters, '/' included (possibly empty)
//   ?      exactly one character other than '/'
//   [...]  one character other than '/' from the set; ranges "a-z" and
//          leading '!' or '^' for negation; ']' first in the set is literal
//
// A '[' without a closing ']' is a literal. Three or more consecutive stars
// behave like "**".
bool glob_match(std::string_view pattern, std::string_view text);

// True when the text contains any of '*', '?', '['.
bool has_glob_metachar(std::string_view text);

// Returns a description of the first problem, or nullopt if the pattern is
// acceptable. A character set may not contain '/'.
std::optional<std::string> glob_problem(std::string_view pattern);

}  // namespace graphmac
