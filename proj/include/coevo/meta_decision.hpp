#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "coevo/graph.hpp"

namespace coevo {

enum class TimeControl { Continue, SlowAgain, Stop };

const char* time_control_name(TimeControl tc);
std::optional<TimeControl> time_control_from_name(const std::string& name);

/// Per-agent capability feedback from the meta-controller.
struct AgentFeedback {
  std::string prompt_delta;
  std::string memory_seed;

  friend bool operator==(const AgentFeedback&, const AgentFeedback&) = default;
};

/// The meta-controller's full structured output. The structural fields feed
/// validate_delta downstream; graph_diff is provenance only and never trusted
/// as the actual diff.
struct MetaDecision {
  StructuralDelta delta;
  nlohmann::json graph_diff = nlohmann::json::object();
  std::map<std::string, AgentFeedback> agent_feedback;
  std::string global_rationale;
  TimeControl time_control = TimeControl::Continue;

  /// The documented fallback for unparseable replies.
  static MetaDecision fallback() { return MetaDecision{}; }
};

struct MetaParseResult {
  std::optional<MetaDecision> decision;
  std::string error;  // set when decision is absent

  bool ok() const { return decision.has_value(); }
};

/// Strict schema parse: all six top-level fields required, unknown fields
/// rejected, literals checked. Oversized birth/death or edge lists parse
/// fine; budget enforcement happens at validation time.
MetaParseResult parse_meta_decision(const std::string& text);

/// Canonical serialization: sorted object keys, compact separators. Parsing
/// then re-serializing any valid document is byte-stable.
std::string serialize_meta_decision(const MetaDecision& decision);

nlohmann::json meta_decision_to_json(const MetaDecision& decision);

}  // namespace coevo
