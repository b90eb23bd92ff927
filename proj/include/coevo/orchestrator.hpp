#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "coevo/backends.hpp"
#include "coevo/graph.hpp"

namespace coevo {

struct RunConfig {
  std::vector<std::string> roles = {"planner", "searcher", "calculator",
                                    "verifier", "reflector"};
  std::string sink_role = "reflector";
  int round_cap = 10;       // R
  int slow_interval = 2;    // K
  double success_threshold = 1.0;  // tau
  EditBudget budget;
  double eta = 0.5;
  int node_cap = 20;
  std::uint64_t seed = 0;
  Rubric rubric = {{RubricOp::Correctness, "answers the question"}};

  void validate() const;  // throws std::invalid_argument
};

struct AgentRecord {
  std::string agent_id;
  std::string role;
  double weight = 0.0;        // frequency at scoring time
  std::string output;
  double contribution = 0.0;  // c_{v,t}, judged, in [0,1]
  std::string justification;
  bool failed = false;
};

/// One fast round's record. team_mean is the capability-weighted mean
/// contribution sum_v weight_v * c_{v,t}.
struct RoundTrace {
  int round = 0;
  std::vector<AgentRecord> agents;
  double team_mean = 0.0;
  std::string answer;
  double answer_score = 0.0;
  int graph_generation = 0;
  int edge_count = 0;  // edges in the graph the round executed on
};

enum class StopReason { Threshold, BudgetExhausted, StopSignal };
const char* stop_reason_name(StopReason reason);

struct SlowUpdateEvent {
  int round = 0;  // the round t after which the update fired
  int pairs_applied = 0;
  int edge_edits_applied = 0;
  int violations = 0;
  TimeControl time_control = TimeControl::Continue;
};

struct InstanceResult {
  std::string final_answer;
  StopReason stop_reason = StopReason::BudgetExhausted;
  int rounds_used = 0;
  int slow_updates_used = 0;
  std::vector<RoundTrace> traces;
  std::vector<SlowUpdateEvent> slow_events;
  AgentGraph final_graph;
};

/// Executes one fast round: agents run in topological order, the judge scores
/// each output, capability weights take a replicator step, and refinement
/// text lands in each agent's memory. Backend failures score the agent 0 and
/// never abort the round.
std::pair<RoundTrace, AgentGraph> fast_round(const AgentGraph& graph,
                                             const Backends& backends,
                                             const std::string& query, int round,
                                             const RunConfig& config);

struct SlowUpdateResult {
  AgentGraph graph;
  TimeControl time_control = TimeControl::Continue;
  StructuralDelta applied;
  std::vector<Violation> violations;
};

/// Asks the meta-controller for a structural delta over the recent history,
/// validates (truncates) it, applies it, and writes capability feedback into
/// surviving agents' memories.
SlowUpdateResult slow_update(const AgentGraph& graph,
                             const std::vector<RoundTrace>& history,
                             MetaBackend& meta, const EditBudget& budget,
                             const std::string& query);

/// The full loop: fast rounds, slow updates when (t+1) mod K == 0 and
/// s_t < tau, termination on threshold, round cap, or meta stop signal.
/// `on_trace`, when set, receives each round trace as it is produced.
InstanceResult run_instance(const std::string& query, const RunConfig& config,
                            const Backends& backends,
                            const std::function<void(const RoundTrace&)>& on_trace = {});

struct RoundIncrementSummary {
  std::vector<double> m_series;  // team mean per round
  std::vector<double> deltas;    // m_{t+1} - m_t
  double mean_delta = 0.0;
  double fraction_positive = 0.0;
};

/// The round-to-round increment check over a trace list. Throws with fewer
/// than two traces.
RoundIncrementSummary round_increment_check(const std::vector<RoundTrace>& traces);

// JSONL trace persistence: one header line, one line per round, one result
// line. The CLI and the analysis module consume this format.
nlohmann::json trace_header_json(const RunConfig& config, const AgentGraph& graph,
                                 const std::string& query);
nlohmann::json round_trace_to_json(const RoundTrace& trace);
RoundTrace round_trace_from_json(const nlohmann::json& j);
nlohmann::json instance_result_json(const InstanceResult& result);

nlohmann::json run_config_to_json(const RunConfig& config);
RunConfig run_config_from_json(const nlohmann::json& j);

}  // namespace coevo
