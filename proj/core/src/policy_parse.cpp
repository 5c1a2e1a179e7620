#include <algorithm>
#include <set>
#include <sstream>

#include "graphmac/error.hpp"
#include "policy_internal.hpp"
#include "xml.hpp"

namespace graphmac {

namespace {

struct BlockSpec {
  std::string_view block;
  std::string_view item;
  ObjectKind kind;
};

constexpr BlockSpec kBlocks[] = {
    {"topics", "topic", ObjectKind::topic},
    {"services", "service", ObjectKind::service},
    {"parameters", "parameter", ObjectKind::parameter},
    {"actions", "action", ObjectKind::action},
};

const BlockSpec* block_for(std::string_view element) {
  for (const auto& spec : kBlocks) {
    if (spec.block == element) return &spec;
  }
  return nullptr;
}

std::vector<std::string> split_ws(std::string_view text) {
  std::vector<std::string> out;
  std::istringstream in{std::string(text)};
  std::string word;
  while (in >> word) out.push_back(word);
  return out;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

class SchemaReader {
 public:
  explicit SchemaReader(const std::string& source) : source_(source) {}

  void report(const xml::Position& pos, std::string message) {
    diagnostics_.push_back(Diagnostic{source_, pos.line, pos.column, std::move(message)});
  }

  void finish() const {
    if (!diagnostics_.empty()) {
      throw Error(ErrorCode::schema_violation,
                  "policy document violates the schema (" + std::to_string(diagnostics_.size()) + " problem" +
                      (diagnostics_.size() == 1 ? "" : "s") + ")",
                  diagnostics_);
    }
  }

  void check_version(const xml::Element& root) {
    const auto* version = root.attribute("version");
    if (version == nullptr) {
      report(root.pos, "<" + root.name + "> is missing required attribute 'version'");
      return;
    }
    if (version->value != kPolicyVersion) {
      throw Error(ErrorCode::unsupported_version, "policy version '" + version->value + "' is not supported",
                  {Diagnostic{source_, version->pos.line, version->pos.column,
                              "supported version is \"" + std::string(kPolicyVersion) + "\""}});
    }
    allow_only(root, {"version"});
  }

  void allow_only(const xml::Element& el, std::initializer_list<std::string_view> names) {
    for (const auto& a : el.attributes) {
      if (std::find(names.begin(), names.end(), a.name) == names.end()) {
        report(a.pos, "unknown attribute '" + a.name + "' on <" + el.name + ">");
      }
    }
  }

  void no_text(const xml::Element& el) {
    if (!trim(el.text).empty()) report(el.pos, "<" + el.name + "> may not contain text");
  }

  const xml::Attribute* required(const xml::Element& el, std::string_view name) {
    const auto* a = el.attribute(name);
    if (a == nullptr) report(el.pos, "<" + el.name + "> is missing required attribute '" + std::string(name) + "'");
    return a;
  }

  std::optional<AttachmentExpression> attachment(const xml::Position& pos, std::string_view text) {
    std::string problem;
    auto expr = AttachmentExpression::try_parse(text, problem);
    if (!expr) report(pos, std::move(problem));
    return expr;
  }

  // Reads the content model shared by <profile> and <abstraction>.
  void body(const xml::Element& el, std::vector<PolicyRule>& rules, std::vector<PolicyProfile>& children,
            std::vector<std::string>& imports) {
    no_text(el);
    std::set<std::string> names;
    for (const auto& child : el.children) {
      if (child.name == "profile") {
        auto profile = this->profile(child);
        if (!profile.name.empty() && !names.insert(profile.name).second) {
          report(child.pos, "duplicate sibling profile name '" + profile.name + "'");
        }
        children.push_back(std::move(profile));
      } else if (child.name == "import") {
        allow_only(child, {"path"});
        no_text(child);
        if (!child.children.empty()) report(child.pos, "<import> must be empty");
        if (const auto* path = required(child, "path")) {
          if (trim(path->value).empty()) report(path->pos, "import path is empty");
          else imports.emplace_back(trim(path->value));
        }
      } else if (const BlockSpec* spec = block_for(child.name)) {
        if (auto rule = this->rule(child, *spec)) rules.push_back(std::move(*rule));
      } else {
        report(child.pos, "unknown element <" + child.name + "> inside <" + el.name + ">");
      }
    }
  }

  PolicyProfile profile(const xml::Element& el) {
    PolicyProfile p;
    allow_only(el, {"name", "attach"});
    if (const auto* name = required(el, "name")) {
      if (!detail::valid_profile_name(name->value)) {
        report(name->pos, "profile name '" + name->value + "' must be non-empty and use only [A-Za-z0-9_.-]");
      }
      p.name = name->value;
    }
    if (const auto* attach = required(el, "attach")) {
      const auto words = split_ws(attach->value);
      if (words.empty()) report(attach->pos, "empty attachment expression");
      for (const auto& w : words) {
        if (auto expr = attachment(attach->pos, w)) p.attachments.push_back(std::move(*expr));
      }
    }
    body(el, p.rules, p.children, p.imports);
    return p;
  }

  std::optional<PolicyRule> rule(const xml::Element& el, const BlockSpec& spec) {
    PolicyRule r;
    r.kind = spec.kind;
    bool ok = true;
    allow_only(el, {"qualifier", "verbs"});
    no_text(el);
    if (const auto* q = required(el, "qualifier")) {
      if (auto parsed = parse_qualifier(q->value)) {
        r.qualifier = *parsed;
      } else {
        report(q->pos, "bad qualifier '" + q->value + "' (expected ALLOW or DENY)");
        ok = false;
      }
    } else {
      ok = false;
    }
    if (const auto* verbs = required(el, "verbs")) {
      const auto words = split_ws(verbs->value);
      if (words.empty()) {
        report(verbs->pos, "verbs list is empty");
        ok = false;
      }
      for (const auto& w : words) {
        const auto verb = parse_verb(w);
        if (!verb) {
          report(verbs->pos, "unknown verb '" + w + "'");
          ok = false;
        } else if (!is_legal(spec.kind, *verb)) {
          report(verbs->pos, "verb '" + w + "' is not legal for " + std::string(to_string(spec.kind)) + " objects");
          ok = false;
        } else {
          r.verbs.push_back(*verb);
        }
      }
    } else {
      ok = false;
    }
    for (const auto& item : el.children) {
      if (item.name != spec.item) {
        report(item.pos, "<" + item.name + "> is not allowed inside <" + std::string(spec.block) + ">; expected <" +
                             std::string(spec.item) + ">");
        ok = false;
        continue;
      }
      allow_only(item, {});
      if (!item.children.empty()) report(item.pos, "<" + item.name + "> may only contain text");
      const auto text = trim(item.text);
      if (text.empty()) {
        report(item.pos, "empty attachment expression");
        ok = false;
      } else if (auto expr = attachment(item.pos, text)) {
        r.objects.push_back(std::move(*expr));
      } else {
        ok = false;
      }
    }
    if (el.children.empty()) {
      report(el.pos, "<" + std::string(spec.block) + "> needs at least one <" + std::string(spec.item) + ">");
      ok = false;
    }
    std::sort(r.verbs.begin(), r.verbs.end());
    r.verbs.erase(std::unique(r.verbs.begin(), r.verbs.end()), r.verbs.end());
    if (!ok) return std::nullopt;
    return r;
  }

 private:
  const std::string& source_;
  std::vector<Diagnostic> diagnostics_;
};

}  // namespace

namespace detail {

bool valid_profile_name(std::string_view name) {
  if (name.empty()) return false;
  return std::all_of(name.begin(), name.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '.' ||
           c == '-';
  });
}

PolicyFragment read_fragment(const xml::Element& root, const std::string& source_path) {
  SchemaReader reader(source_path);
  PolicyFragment fragment;
  if (root.name == "policy") {
    reader.check_version(root);
    reader.no_text(root);
    std::set<std::string> names;
    for (const auto& child : root.children) {
      if (child.name != "profile") {
        reader.report(child.pos, "unknown element <" + child.name + "> inside <policy>; expected <profile>");
        continue;
      }
      auto profile = reader.profile(child);
      if (!profile.name.empty() && !names.insert(profile.name).second) {
        reader.report(child.pos, "duplicate sibling profile name '" + profile.name + "'");
      }
      fragment.profiles.push_back(std::move(profile));
    }
  } else if (root.name == "abstraction") {
    reader.check_version(root);
    reader.body(root, fragment.rules, fragment.profiles, fragment.imports);
  } else {
    reader.report(root.pos, "root element must be <policy> or <abstraction>, found <" + root.name + ">");
  }
  reader.finish();
  return fragment;
}

PolicyFragment parse_fragment(std::string_view document, const std::string& source_path) {
  return read_fragment(xml::parse(document, source_path), source_path);
}

}  // namespace detail

PolicyTree parse_policy(std::string_view document, const std::string& source_path) {
  const xml::Element root = xml::parse(document, source_path);
  if (root.name != "policy") {
    throw Error(ErrorCode::schema_violation, "not a policy document",
                {Diagnostic{source_path, root.pos.line, root.pos.column,
                            "root element must be <policy>, found <" + root.name + ">"}});
  }
  auto fragment = detail::read_fragment(root, source_path);
  PolicyTree tree;
  tree.version = std::string(kPolicyVersion);
  tree.profiles = std::move(fragment.profiles);
  tree.source_path = source_path;
  return tree;
}

}  // namespace graphmac
