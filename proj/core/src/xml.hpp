#pragma once

// Minimal XML reader/writer shared by the policy and permissions formats.
// Supports elements, attributes, character data, CDATA, comments, processing
// instructions and the predefined/numeric entities. DOCTYPE declarations are
// rejected. Every element records where it started for diagnostics.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace graphmac::xml {

struct Position {
  std::uint32_t line = 1;
  std::uint32_t column = 1;
};

struct Attribute {
  std::string name;
  std::string value;
  Position pos;
};

struct Element {
  std::string name;
  std::vector<Attribute> attributes;
  std::vector<Element> children;
  std::string text;  // concatenated character data of direct children
  Position pos;

  const Attribute* attribute(std::string_view key) const;
};

// Throws graphmac::Error(malformed_document) with one positioned diagnostic.
Element parse(std::string_view document, const std::string& source_name);

std::string escape(std::string_view raw, bool attribute);

// Streaming writer producing two-space indented, LF-terminated output.
class Writer {
 public:
  Writer();

  void open(std::string_view name, const std::vector<std::pair<std::string, std::string>>& attrs = {});
  void close();
  void leaf(std::string_view name, std::string_view text,
            const std::vector<std::pair<std::string, std::string>>& attrs = {});
  void empty(std::string_view name, const std::vector<std::pair<std::string, std::string>>& attrs = {});

  std::string finish();

 private:
  void indent();
  void write_attrs(const std::vector<std::pair<std::string, std::string>>& attrs);

  std::string out_;
  std::vector<std::string> stack_;
};

}  // namespace graphmac::xml
