#include <algorithm>

#include "crypto.hpp"
#include "graphmac/dds.hpp"
#include "graphmac/error.hpp"
#include "graphmac/eval.hpp"
#include "graphmac/glob.hpp"

namespace graphmac {

const std::optional<DdsCriteria>& DdsRule::criteria(DdsAction action) const {
  switch (action) {
    case DdsAction::publish: return publish;
    case DdsAction::subscribe: return subscribe;
    case DdsAction::relay: return relay;
  }
  return publish;
}

std::optional<DdsCriteria>& DdsRule::criteria(DdsAction action) {
  return const_cast<std::optional<DdsCriteria>&>(std::as_const(*this).criteria(action));
}

std::string grant_name_for(std::string_view subject) {
  std::string out;
  std::string_view s = subject;
  while (!s.empty() && s.front() == '/') s.remove_prefix(1);
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '/') out += "__";
    else out += s[i];
  }
  return out.empty() ? std::string("root") : out;
}

void validate(const PermissionsDocument& doc) {
  auto fail = [](const std::string& why) { throw Error(ErrorCode::invalid_document, why); };
  if (doc.grants.empty()) fail("a permissions document needs at least one grant");
  for (const auto& g : doc.grants) {
    if (g.subject_name.empty()) fail("grant '" + g.name + "' has an empty subject name");
    if (!(g.not_before < g.not_after)) fail("grant '" + g.name + "' validity window is empty (not_before >= not_after)");
    for (std::size_t i = 0; i < g.rules.size(); ++i) {
      const auto& r = g.rules[i];
      const std::string where = "grant '" + g.name + "' rule " + std::to_string(i);
      if (r.domains.empty()) fail(where + " has no domains");
      if (!std::is_sorted(r.domains.begin(), r.domains.end()) ||
          std::adjacent_find(r.domains.begin(), r.domains.end()) != r.domains.end()) {
        fail(where + " domains must be sorted and unique");
      }
      if (!r.publish && !r.subscribe && !r.relay) fail(where + " has no publish, subscribe or relay criteria");
    }
  }
}

PermissionsDocument make_document(std::vector<Grant> grants, std::string source_digest) {
  PermissionsDocument doc{std::move(grants), std::move(source_digest)};
  validate(doc);
  return doc;
}

namespace {

// Canonical text of the applicable slice; its digest binds a document to
// the policy it was compiled from.
std::string slice_text(const std::string& subject, const std::vector<ApplicableRule>& rules) {
  std::string text = "subject " + subject + "\n";
  for (const auto& ar : rules) {
    text += ar.id;
    text += ' ';
    text += to_string(ar.rule->qualifier);
    text += ' ';
    text += to_string(ar.rule->kind);
    for (Verb v : ar.rule->verbs) {
      text += ' ';
      text += to_string(v);
    }
    for (const auto& o : ar.rule->objects) {
      text += " ";
      text += o.text();
    }
    text += '\n';
  }
  return text;
}

Grant base_grant(const std::string& subject, const CompileOptions& opts, const Clock& clock) {
  if (opts.validity_days < 1) throw Error(ErrorCode::invalid_config, "validity_days must be at least 1");
  if (opts.domains.empty()) throw Error(ErrorCode::invalid_config, "at least one domain id is required");
  Grant g;
  g.name = grant_name_for(subject);
  g.subject_name = subject;
  g.not_before = opts.not_before.value_or(clock());
  g.not_after = g.not_before + std::chrono::days{opts.validity_days};
  g.default_qualifier = Qualifier::deny;
  return g;
}

std::vector<std::int32_t> sorted_domains(std::vector<std::int32_t> d) {
  std::sort(d.begin(), d.end());
  d.erase(std::unique(d.begin(), d.end()), d.end());
  return d;
}

bool amend_applies(const CompileOptions& opts, const AttachmentExpression& source) {
  if (opts.amend_targets.empty()) return true;
  const std::string text = source.text();
  return std::any_of(opts.amend_targets.begin(), opts.amend_targets.end(),
                     [&](const std::string& target) { return glob_match(target, text) || target == text; });
}

}  // namespace

PermissionsDocument compile_permissions(const PolicyTree& tree, const std::string& subject, MappingMode mode,
                                        const CompileOptions& opts, const Clock& clock) {
  if (applicable_profiles(tree, subject).empty()) {
    throw Error(ErrorCode::no_applicable_profile, "no profile in the policy applies to subject '" + subject + "'");
  }
  const auto rules = applicable_rules(tree, subject);
  Grant grant = base_grant(subject, opts, clock);
  const auto domains = sorted_domains(opts.domains);

  for (Qualifier pass : {Qualifier::deny, Qualifier::allow}) {
    for (const auto& ar : rules) {
      if (ar.rule->qualifier != pass) continue;
      for (const auto& object : ar.rule->objects) {
        const AttachmentExpression absolute = expand_relative(object, subject);
        for (Verb verb : ar.rule->verbs) {
          for (auto& leg : map_attachment(ar.rule->kind, absolute, verb, mode)) {
            DdsRule r;
            r.qualifier = pass;
            r.domains = domains;
            DdsCriteria c{std::move(leg.topics), std::move(leg.partitions), {}};
            if (pass == Qualifier::allow && opts.amend_empty_partition && amend_applies(opts, absolute) &&
                std::find(c.partitions.begin(), c.partitions.end(), "") == c.partitions.end()) {
              c.partitions.emplace_back();
            }
            r.criteria(leg.action) = std::move(c);
            r.origins.push_back(ar.id);
            grant.rules.push_back(std::move(r));
          }
        }
      }
    }
  }

  return make_document({std::move(grant)}, "sha256:" + crypto::sha256_hex(slice_text(subject, rules)));
}

PermissionsDocument deny_all_document(const std::string& subject, const CompileOptions& opts, const Clock& clock) {
  return make_document({base_grant(subject, opts, clock)}, "sha256:" + crypto::sha256_hex(slice_text(subject, {})));
}

}  // namespace graphmac
