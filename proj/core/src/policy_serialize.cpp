#include "graphmac/policy.hpp"
#include "xml.hpp"

namespace graphmac {

namespace {

std::string_view block_name(ObjectKind kind) {
  switch (kind) {
    case ObjectKind::topic: return "topics";
    case ObjectKind::service: return "services";
    case ObjectKind::parameter: return "parameters";
    case ObjectKind::action: return "actions";
  }
  return "topics";
}

std::string join_verbs(const std::vector<Verb>& verbs) {
  std::string out;
  for (Verb v : verbs) {
    if (!out.empty()) out += ' ';
    out += to_string(v);
  }
  return out;
}

void write_profile(xml::Writer& w, const PolicyProfile& p) {
  std::string attach;
  for (const auto& a : p.attachments) {
    if (!attach.empty()) attach += ' ';
    attach += a.text();
  }
  w.open("profile", {{"name", p.name}, {"attach", attach}});
  for (const auto& path : p.imports) w.empty("import", {{"path", path}});
  for (const auto& r : p.rules) {
    w.open(block_name(r.kind), {{"qualifier", std::string(to_string(r.qualifier))}, {"verbs", join_verbs(r.verbs)}});
    for (const auto& o : r.objects) w.leaf(to_string(r.kind), o.text());
    w.close();
  }
  for (const auto& c : p.children) write_profile(w, c);
  w.close();
}

}  // namespace

std::string serialize_policy(const PolicyTree& tree) {
  xml::Writer w;
  if (tree.profiles.empty()) {
    w.empty("policy", {{"version", tree.version}});
  } else {
    w.open("policy", {{"version", tree.version}});
    for (const auto& p : tree.profiles) write_profile(w, p);
    w.close();
  }
  return w.finish();
}

}  // namespace graphmac
