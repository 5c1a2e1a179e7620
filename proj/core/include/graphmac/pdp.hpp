#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "graphmac/dds.hpp"
#include "graphmac/time.hpp"

namespace graphmac {

struct TransportRequest {
  std::string subject_name;
  std::int32_t domain = 0;
  DdsAction action = DdsAction::publish;
  std::string topic;
  std::vector<std::string> partitions{""};  // non-empty; "" is the default partition
  std::vector<std::string> tags;            // "key=value"
  Timestamp at;
};

enum class PdpValue : std::uint8_t { allow, deny, error };

std::string_view to_string(PdpValue v);

// Indices are present exactly when a grant matched. rule_index is absent when
// the grant default decided.
struct PdpOutcome {
  PdpValue value = PdpValue::error;
  std::optional<std::size_t> grant_index;
  std::optional<std::size_t> rule_index;

  bool operator==(const PdpOutcome&) const = default;
};

// Every present criterion class must pass. Absent partitions admit only the
// default partition; absent topics and tags are unconstrained. Every
// requested partition and tag must be matched by some expression.
bool check_criteria(const DdsCriteria& criteria, const TransportRequest& request);

// Index of the first rule whose domain, action block and criteria all match.
std::optional<std::size_t> check_rules(const std::vector<DdsRule>& rules, const TransportRequest& request);

// First grant whose subject name equals the request's and whose validity
// window (inclusive) contains request.at decides; no such grant is ERROR.
PdpOutcome pdp_evaluate(const PermissionsDocument& doc, const TransportRequest& request);

// ERROR is a refusal at every boundary that only distinguishes allow/deny.
inline bool allows(const PdpOutcome& o) { return o.value == PdpValue::allow; }

}  // namespace graphmac
