#include <charconv>
#include <sstream>

#include "graphmac/dds.hpp"
#include "graphmac/error.hpp"
#include "xml.hpp"

namespace graphmac {

namespace {

constexpr DdsAction kActions[] = {DdsAction::publish, DdsAction::subscribe, DdsAction::relay};

std::string join(const std::vector<std::string>& items, char sep) {
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) out += sep;
    out += s;
  }
  return out;
}

void write_list(xml::Writer& w, std::string_view outer, std::string_view inner, const std::vector<std::string>& items) {
  if (items.empty()) return;
  w.open(outer);
  for (const auto& s : items) w.leaf(inner, s);
  w.close();
}

void write_rule(xml::Writer& w, const DdsRule& r) {
  std::vector<std::pair<std::string, std::string>> attrs;
  if (!r.origins.empty()) attrs.emplace_back("origin", join(r.origins, ' '));
  w.open(r.qualifier == Qualifier::allow ? "allow_rule" : "deny_rule", attrs);
  w.open("domains");
  for (auto id : r.domains) w.leaf("id", std::to_string(id));
  w.close();
  for (DdsAction act : kActions) {
    const auto& c = r.criteria(act);
    if (!c) continue;
    if (c->topics.empty() && c->partitions.empty() && c->tags.empty()) {
      w.empty(to_string(act));
      continue;
    }
    w.open(to_string(act));
    write_list(w, "topics", "topic", c->topics);
    write_list(w, "partitions", "partition", c->partitions);
    write_list(w, "tags", "tag", c->tags);
    w.close();
  }
  w.close();
}

class Reader {
 public:
  explicit Reader(const std::string& source) : source_(source) {}

  [[noreturn]] void fail(const xml::Element& at, const std::string& message) const {
    throw Error(ErrorCode::invalid_document, "permissions document is invalid",
                {Diagnostic{source_, at.pos.line, at.pos.column, message}});
  }

  void only_children(const xml::Element& el, std::initializer_list<std::string_view> names) const {
    for (const auto& c : el.children) {
      if (std::find(names.begin(), names.end(), c.name) == names.end()) {
        fail(c, "unexpected <" + c.name + "> inside <" + el.name + ">");
      }
    }
  }

  void only_attrs(const xml::Element& el, std::initializer_list<std::string_view> names) const {
    for (const auto& a : el.attributes) {
      if (std::find(names.begin(), names.end(), a.name) == names.end()) {
        fail(el, "unknown attribute '" + a.name + "' on <" + el.name + ">");
      }
    }
  }

  const xml::Element& single(const xml::Element& el, std::string_view name) const {
    const xml::Element* found = nullptr;
    for (const auto& c : el.children) {
      if (c.name != name) continue;
      if (found != nullptr) fail(c, "duplicate <" + c.name + "> inside <" + el.name + ">");
      found = &c;
    }
    if (found == nullptr) fail(el, "<" + el.name + "> is missing <" + std::string(name) + ">");
    return *found;
  }

  Timestamp timestamp(const xml::Element& el) const {
    auto t = parse_rfc3339(el.text);
    if (!t) fail(el, "'" + el.text + "' is not an RFC 3339 timestamp");
    return *t;
  }

  std::vector<std::string> list(const xml::Element& el, std::string_view item) const {
    only_children(el, {item});
    std::vector<std::string> out;
    for (const auto& c : el.children) out.push_back(c.text);
    return out;
  }

  DdsCriteria criteria(const xml::Element& el) const {
    only_children(el, {"topics", "partitions", "tags"});
    DdsCriteria c;
    for (const auto& child : el.children) {
      if (child.name == "topics") c.topics = list(child, "topic");
      else if (child.name == "partitions") c.partitions = list(child, "partition");
      else c.tags = list(child, "tag");
    }
    return c;
  }

  DdsRule rule(const xml::Element& el) const {
    only_attrs(el, {"origin"});
    only_children(el, {"domains", "publish", "subscribe", "relay"});
    DdsRule r;
    r.qualifier = el.name == "allow_rule" ? Qualifier::allow : Qualifier::deny;
    if (const auto* origin = el.attribute("origin")) {
      std::istringstream in(origin->value);
      std::string id;
      while (in >> id) r.origins.push_back(id);
    }
    const auto& domains = single(el, "domains");
    only_children(domains, {"id"});
    for (const auto& id : domains.children) {
      std::int32_t v = 0;
      const auto* end = id.text.data() + id.text.size();
      auto [ptr, ec] = std::from_chars(id.text.data(), end, v);
      if (ec != std::errc() || ptr != end) fail(id, "domain id '" + id.text + "' is not an integer");
      r.domains.push_back(v);
    }
    for (const auto& child : el.children) {
      if (child.name == "domains") continue;
      auto act = parse_dds_action(child.name);
      auto& slot = r.criteria(*act);
      if (slot) fail(child, "duplicate <" + child.name + "> block in rule");
      slot = criteria(child);
    }
    return r;
  }

  Grant grant(const xml::Element& el) const {
    only_attrs(el, {"name"});
    only_children(el, {"subject_name", "validity", "allow_rule", "deny_rule", "default"});
    Grant g;
    if (const auto* name = el.attribute("name")) g.name = name->value;
    else fail(el, "<grant> is missing attribute 'name'");
    g.subject_name = single(el, "subject_name").text;
    const auto& validity = single(el, "validity");
    only_children(validity, {"not_before", "not_after"});
    g.not_before = timestamp(single(validity, "not_before"));
    g.not_after = timestamp(single(validity, "not_after"));
    const auto& def = single(el, "default");
    auto q = parse_qualifier(def.text);
    if (!q) fail(def, "default must be ALLOW or DENY, found '" + def.text + "'");
    g.default_qualifier = *q;
    bool seen_default = false;
    for (const auto& child : el.children) {
      if (child.name == "default") seen_default = true;
      if (child.name != "allow_rule" && child.name != "deny_rule") continue;
      if (seen_default) fail(child, "rules must precede <default>");
      g.rules.push_back(rule(child));
    }
    return g;
  }

 private:
  const std::string& source_;
};

}  // namespace

std::string serialize_permissions(const PermissionsDocument& doc) {
  xml::Writer w;
  w.open("permissions", {{"source_digest", doc.source_digest}});
  for (const auto& g : doc.grants) {
    w.open("grant", {{"name", g.name}});
    w.leaf("subject_name", g.subject_name);
    w.open("validity");
    w.leaf("not_before", format_rfc3339(g.not_before));
    w.leaf("not_after", format_rfc3339(g.not_after));
    w.close();
    for (const auto& r : g.rules) write_rule(w, r);
    w.leaf("default", to_string(g.default_qualifier));
    w.close();
  }
  w.close();
  return w.finish();
}

PermissionsDocument parse_permissions(std::string_view document, const std::string& source_name) {
  const xml::Element root = xml::parse(document, source_name);
  Reader reader(source_name);
  if (root.name != "permissions") reader.fail(root, "root element must be <permissions>");
  reader.only_attrs(root, {"source_digest"});
  reader.only_children(root, {"grant"});
  PermissionsDocument doc;
  if (const auto* digest = root.attribute("source_digest")) doc.source_digest = digest->value;
  for (const auto& g : root.children) doc.grants.push_back(reader.grant(g));
  validate(doc);
  return doc;
}

}  // namespace graphmac
