#include "graphmac/dds.hpp"
#include "graphmac/error.hpp"

namespace graphmac {

std::string_view to_string(MappingMode m) { return m == MappingMode::ardent ? "ardent" : "bouncy"; }

std::optional<MappingMode> parse_mapping_mode(std::string_view text) {
  if (text == "ardent") return MappingMode::ardent;
  if (text == "bouncy") return MappingMode::bouncy;
  return std::nullopt;
}

std::string_view to_string(DdsAction a) {
  switch (a) {
    case DdsAction::publish: return "publish";
    case DdsAction::subscribe: return "subscribe";
    case DdsAction::relay: return "relay";
  }
  return "publish";
}

std::optional<DdsAction> parse_dds_action(std::string_view text) {
  if (text == "publish") return DdsAction::publish;
  if (text == "subscribe") return DdsAction::subscribe;
  if (text == "relay") return DdsAction::relay;
  return std::nullopt;
}

namespace {

struct LegTemplate {
  DdsAction action;
  std::string_view prefix;
  std::string_view suffix = {};
};

constexpr std::string_view kRequest = "Request";
constexpr std::string_view kReply = "Reply";

std::vector<LegTemplate> leg_templates(ObjectKind kind, Verb verb) {
  using A = DdsAction;
  namespace p = prefix;
  switch (kind) {
    case ObjectKind::topic:
      if (verb == Verb::publish) return {{A::publish, p::topic}};
      if (verb == Verb::subscribe) return {{A::subscribe, p::topic}};
      if (verb == Verb::relay) return {{A::relay, p::topic}};
      break;
    case ObjectKind::service:
      if (verb == Verb::call) return {{A::publish, p::service_request, kRequest}, {A::subscribe, p::service_reply, kReply}};
      if (verb == Verb::reply) return {{A::subscribe, p::service_request, kRequest}, {A::publish, p::service_reply, kReply}};
      break;
    case ObjectKind::parameter:
      if (verb == Verb::read) return {{A::publish, p::parameter_get_request, kRequest}, {A::subscribe, p::parameter_get_reply, kReply}};
      if (verb == Verb::write) return {{A::publish, p::parameter_set_request, kRequest}, {A::subscribe, p::parameter_set_reply, kReply}};
      break;
    case ObjectKind::action:
      if (verb == Verb::call) return {{A::publish, p::action_goal_request, kRequest}, {A::subscribe, p::action_goal_reply, kReply}};
      if (verb == Verb::cancel) return {{A::publish, p::action_cancel_request, kRequest}, {A::subscribe, p::action_cancel_reply, kReply}};
      if (verb == Verb::feedback) return {{A::subscribe, p::action_feedback}};
      break;
  }
  throw Error(ErrorCode::unmappable_kind, "no transport mapping for verb '" + std::string(to_string(verb)) +
                                              "' on " + std::string(to_string(kind)) + " objects");
}

struct Split {
  std::string_view ns;    // everything before the final '/', "" for root names
  std::string_view last;  // final segment
};

Split split_name(std::string_view name) {
  const auto slash = name.rfind('/');
  return {name.substr(0, slash), name.substr(slash + 1)};
}

void require_absolute(std::string_view name) {
  if (name.empty() || name.front() != '/') {
    throw Error(ErrorCode::unmappable_pattern, "object '" + std::string(name) + "' must be absolute to be mapped");
  }
}

bool only_stars(std::string_view s) { return s.find_first_not_of('*') == std::string_view::npos; }

}  // namespace

std::vector<DdsLeg> map_object(ObjectKind kind, std::string_view object, Verb verb, MappingMode mode) {
  const auto templates = leg_templates(kind, verb);
  require_absolute(object);
  std::vector<DdsLeg> legs;
  legs.reserve(templates.size());
  for (const auto& t : templates) {
    DdsLeg leg{t.action, {}, {}};
    if (mode == MappingMode::ardent) {
      const Split s = split_name(object);
      leg.topic = std::string(s.last) + std::string(t.suffix);
      leg.partition = std::string(t.prefix) + std::string(s.ns);
    } else {
      leg.topic = std::string(t.prefix) + std::string(object) + std::string(t.suffix);
    }
    legs.push_back(std::move(leg));
  }
  return legs;
}

std::vector<LegCriteria> map_attachment(ObjectKind kind, const AttachmentExpression& object, Verb verb,
                                        MappingMode mode) {
  const auto templates = leg_templates(kind, verb);
  const std::string_view pattern = object.pattern;
  require_absolute(pattern);

  std::vector<LegCriteria> out;
  for (const auto& t : templates) {
    LegCriteria c{t.action, {}, {}};
    if (mode == MappingMode::bouncy) {
      c.topics.push_back(std::string(t.prefix) + std::string(pattern) + std::string(t.suffix));
      c.partitions.emplace_back();
    } else {
      // '/' never appears inside a character set, so the final '/' of the
      // pattern lines up with the final '/' of every name it matches.
      const Split s = split_name(pattern);
      const std::string ns = std::string(t.prefix) + std::string(s.ns);
      if (object.kind == AttachmentKind::glob && s.last.find("**") != std::string_view::npos) {
        if (!only_stars(s.last)) {
          throw Error(ErrorCode::unmappable_pattern,
                      "glob '" + std::string(pattern) +
                          "' mixes '**' with other characters in its final segment; the ardent mapping "
                          "splits names at the last '/' and cannot represent it exactly");
        }
        c.topics.push_back("*" + std::string(t.suffix));
        c.partitions.push_back(ns);
        c.partitions.push_back(ns + "/**");
      } else {
        c.topics.push_back(std::string(s.last) + std::string(t.suffix));
        c.partitions.push_back(ns);
      }
    }
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace graphmac
