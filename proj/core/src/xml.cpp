#include "xml.hpp"

#include <cstdint>

#include "graphmac/error.hpp"

namespace graphmac::xml {

const Attribute* Element::attribute(std::string_view key) const {
  for (const auto& a : attributes) {
    if (a.name == key) return &a;
  }
  return nullptr;
}

namespace {

bool is_name_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || c == ':' ||
         static_cast<unsigned char>(c) >= 0x80;
}

bool is_name_char(char c) {
  return is_name_start(c) || (c >= '0' && c <= '9') || c == '-' || c == '.';
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

class Parser {
 public:
  Parser(std::string_view doc, const std::string& source) : doc_(doc), source_(source) {}

  Element run() {
    skip_bom();
    skip_misc();
    if (at_end() || peek() != '<') fail("expected root element");
    Element root = element();
    skip_misc();
    if (!at_end()) fail("content after root element");
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& message) const { fail_at(pos_, message); }

  [[noreturn]] void fail_at(Position p, const std::string& message) const {
    throw Error(ErrorCode::malformed_document, "document is not well-formed",
                {Diagnostic{source_, p.line, p.column, message}});
  }

  bool at_end() const { return i_ >= doc_.size(); }
  char peek(std::size_t ahead = 0) const { return i_ + ahead < doc_.size() ? doc_[i_ + ahead] : '\0'; }
  bool starts_with(std::string_view s) const { return doc_.substr(i_, s.size()) == s; }

  void advance(std::size_t n = 1) {
    for (std::size_t k = 0; k < n && i_ < doc_.size(); ++k, ++i_) {
      if (doc_[i_] == '\n') {
        ++pos_.line;
        pos_.column = 1;
      } else if ((static_cast<unsigned char>(doc_[i_]) & 0xC0) != 0x80) {
        ++pos_.column;
      }
    }
  }

  void expect(std::string_view s) {
    if (!starts_with(s)) fail("expected '" + std::string(s) + "'");
    advance(s.size());
  }

  void skip_space() {
    while (!at_end() && is_space(peek())) advance();
  }

  void skip_bom() {
    if (starts_with("\xEF\xBB\xBF")) i_ += 3;
  }

  void skip_until(std::string_view terminator, const char* what) {
    while (!at_end() && !starts_with(terminator)) advance();
    if (at_end()) fail(std::string("unterminated ") + what);
    advance(terminator.size());
  }

  void skip_misc() {
    for (;;) {
      skip_space();
      if (starts_with("<?")) {
        skip_until("?>", "processing instruction");
      } else if (starts_with("<!--")) {
        comment();
      } else if (starts_with("<!DOCTYPE") || starts_with("<!doctype")) {
        fail("DOCTYPE declarations are not supported");
      } else {
        return;
      }
    }
  }

  void comment() {
    advance(4);
    while (!at_end() && !starts_with("-->")) {
      if (starts_with("--")) fail("'--' is not allowed inside a comment");
      advance();
    }
    if (at_end()) fail("unterminated comment");
    advance(3);
  }

  std::string name() {
    if (at_end() || !is_name_start(peek())) fail("expected a name");
    const std::size_t start = i_;
    while (!at_end() && is_name_char(peek())) advance();
    return std::string(doc_.substr(start, i_ - start));
  }

  void entity(std::string& out) {
    const Position start = pos_;
    advance();  // '&'
    const std::size_t begin = i_;
    while (!at_end() && peek() != ';' && i_ - begin < 12) advance();
    if (peek() != ';') fail_at(start, "unterminated entity reference");
    const std::string_view ref = doc_.substr(begin, i_ - begin);
    advance();
    if (ref == "lt") out += '<';
    else if (ref == "gt") out += '>';
    else if (ref == "amp") out += '&';
    else if (ref == "quot") out += '"';
    else if (ref == "apos") out += '\'';
    else if (ref.size() > 1 && ref[0] == '#') {
      std::uint32_t cp = 0;
      const bool hex = ref[1] == 'x';
      const std::string_view digits = ref.substr(hex ? 2 : 1);
      if (digits.empty()) fail_at(start, "empty character reference");
      for (char c : digits) {
        std::uint32_t v;
        if (c >= '0' && c <= '9') v = static_cast<std::uint32_t>(c - '0');
        else if (hex && c >= 'a' && c <= 'f') v = static_cast<std::uint32_t>(c - 'a' + 10);
        else if (hex && c >= 'A' && c <= 'F') v = static_cast<std::uint32_t>(c - 'A' + 10);
        else fail_at(start, "bad character reference");
        cp = cp * (hex ? 16 : 10) + v;
        if (cp > 0x10FFFF) fail_at(start, "character reference out of range");
      }
      if (cp == 0) fail_at(start, "character reference to NUL");
      append_utf8(out, cp);
    } else {
      fail_at(start, "unknown entity '&" + std::string(ref) + ";'");
    }
  }

  std::string attribute_value() {
    const char quote = peek();
    if (quote != '"' && quote != '\'') fail("expected quoted attribute value");
    advance();
    std::string value;
    while (!at_end() && peek() != quote) {
      if (peek() == '<') fail("'<' in attribute value");
      if (peek() == '&') {
        entity(value);
      } else {
        value += peek();
        advance();
      }
    }
    if (at_end()) fail("unterminated attribute value");
    advance();
    return value;
  }

  Element element() {
    Element el;
    el.pos = pos_;
    expect("<");
    el.name = name();
    for (;;) {
      const bool had_space = !at_end() && is_space(peek());
      skip_space();
      if (starts_with("/>")) {
        advance(2);
        return el;
      }
      if (peek() == '>') {
        advance();
        break;
      }
      if (!had_space) fail("expected whitespace before attribute");
      Attribute attr;
      attr.pos = pos_;
      attr.name = name();
      if (el.attribute(attr.name) != nullptr) fail_at(attr.pos, "duplicate attribute '" + attr.name + "'");
      skip_space();
      expect("=");
      skip_space();
      attr.value = attribute_value();
      el.attributes.push_back(std::move(attr));
    }

    for (;;) {
      if (at_end()) fail_at(el.pos, "element '" + el.name + "' is not closed");
      if (starts_with("</")) {
        const Position close_pos = pos_;
        advance(2);
        const std::string closing = name();
        skip_space();
        expect(">");
        if (closing != el.name) {
          fail_at(close_pos, "mismatched closing tag '" + closing + "' for '" + el.name + "'");
        }
        return el;
      }
      if (starts_with("<!--")) {
        comment();
      } else if (starts_with("<![CDATA[")) {
        advance(9);
        const std::size_t start = i_;
        while (!at_end() && !starts_with("]]>")) advance();
        if (at_end()) fail("unterminated CDATA section");
        el.text.append(doc_.substr(start, i_ - start));
        advance(3);
      } else if (starts_with("<?")) {
        skip_until("?>", "processing instruction");
      } else if (peek() == '<') {
        el.children.push_back(element());
      } else if (peek() == '&') {
        entity(el.text);
      } else {
        if (starts_with("]]>")) fail("']]>' in character data");
        el.text += peek();
        advance();
      }
    }
  }

  std::string_view doc_;
  const std::string& source_;
  std::size_t i_ = 0;
  Position pos_;
};

}  // namespace

Element parse(std::string_view document, const std::string& source_name) {
  return Parser(document, source_name).run();
}

std::string escape(std::string_view raw, bool attribute) {
  std::string out;
  out.reserve(raw.size());
  for (char c : raw) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"':
        out += attribute ? "&quot;" : "\"";
        break;
      case '\n':
        out += attribute ? "&#10;" : "\n";
        break;
      default: out += c;
    }
  }
  return out;
}

Writer::Writer() { out_ = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"; }

void Writer::indent() { out_.append(stack_.size() * 2, ' '); }

void Writer::write_attrs(const std::vector<std::pair<std::string, std::string>>& attrs) {
  for (const auto& [k, v] : attrs) {
    out_ += ' ';
    out_ += k;
    out_ += "=\"";
    out_ += escape(v, true);
    out_ += '"';
  }
}

void Writer::open(std::string_view name, const std::vector<std::pair<std::string, std::string>>& attrs) {
  indent();
  out_ += '<';
  out_ += name;
  write_attrs(attrs);
  out_ += ">\n";
  stack_.emplace_back(name);
}

void Writer::close() {
  std::string name = std::move(stack_.back());
  stack_.pop_back();
  indent();
  out_ += "</" + name + ">\n";
}

void Writer::leaf(std::string_view name, std::string_view text,
                  const std::vector<std::pair<std::string, std::string>>& attrs) {
  indent();
  out_ += '<';
  out_ += name;
  write_attrs(attrs);
  out_ += '>';
  out_ += escape(text, false);
  out_ += "</";
  out_ += name;
  out_ += ">\n";
}

void Writer::empty(std::string_view name, const std::vector<std::pair<std::string, std::string>>& attrs) {
  indent();
  out_ += '<';
  out_ += name;
  write_attrs(attrs);
  out_ += "/>\n";
}

std::string Writer::finish() {
  while (!stack_.empty()) close();
  return std::move(out_);
}

}  // namespace graphmac::xml
