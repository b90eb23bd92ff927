#include "coevo/orchestrator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "coevo/replicator.hpp"

namespace coevo {

void RunConfig::validate() const {
  if (roles.empty()) throw std::invalid_argument("config: empty role list");
  if (round_cap <= 0) throw std::invalid_argument("config: round_cap must be positive");
  if (slow_interval <= 0 || slow_interval > round_cap)
    throw std::invalid_argument("config: require 0 < K <= R");
  if (success_threshold < 0.0 || success_threshold > 1.0)
    throw std::invalid_argument("config: threshold must be in [0,1]");
  if (!(eta > 0.0)) throw std::invalid_argument("config: eta must be positive");
  if (node_cap <= 0) throw std::invalid_argument("config: node_cap must be positive");
  if (budget.max_birth_death_pairs < 0 || budget.max_edge_edits < 0)
    throw std::invalid_argument("config: budgets must be nonnegative");
}

const char* stop_reason_name(StopReason reason) {
  switch (reason) {
    case StopReason::Threshold: return "threshold";
    case StopReason::BudgetExhausted: return "budget_exhausted";
    case StopReason::StopSignal: return "stop_signal";
  }
  return "budget_exhausted";
}

namespace {

std::string extract_final_answer(const std::string& sink_output) {
  const std::string marker = "Final Answer:";
  size_t pos = sink_output.rfind(marker);
  if (pos == std::string::npos) return sink_output;
  size_t start = pos + marker.size();
  while (start < sink_output.size() && sink_output[start] == ' ') ++start;
  size_t end = sink_output.find('\n', start);
  return sink_output.substr(start, end == std::string::npos ? std::string::npos
                                                            : end - start);
}

}  // namespace

std::pair<RoundTrace, AgentGraph> fast_round(const AgentGraph& graph,
                                             const Backends& backends,
                                             const std::string& query, int round,
                                             const RunConfig& config) {
  RoundTrace trace;
  trace.round = round;
  trace.graph_generation = graph.generation;
  trace.edge_count = static_cast<int>(graph.edges.size());

  std::vector<std::string> order = execution_order(graph);
  std::map<std::string, std::string> outputs;
  std::map<std::string, bool> failed;

  for (const std::string& id : order) {
    const AgentNode& node = graph.nodes.at(id);
    std::vector<std::string> incoming;
    for (const auto& [from, to] : graph.edges)
      if (to == id && outputs.count(from)) incoming.push_back(outputs[from]);
    try {
      outputs[id] = backends.agent->execute(node, incoming, query, round);
      failed[id] = false;
    } catch (const BackendError& e) {
      outputs[id] = "";
      failed[id] = true;
      trace.agents.push_back({id, node.role, 0.0, "", 0.0,
                              std::string("backend_failure: ") + e.what(), true});
    }
  }

  std::map<std::string, double> weights;
  for (const auto& [id, node] : graph.nodes) weights[id] = node.capability_weight;
  SimplexVector pi = to_frequencies(weights);

  FitnessVector scores;
  scores.ids = pi.ids;
  scores.values.assign(pi.ids.size(), 0.0);
  for (size_t i = 0; i < pi.ids.size(); ++i) {
    const std::string& id = pi.ids[i];
    if (failed[id]) continue;  // failed agents score 0 for the round
    JudgeContext context{query, id, graph.nodes.at(id).role, round, &graph};
    JudgeVerdict verdict = backends.judge->contribution(outputs[id], context);
    double c = std::clamp(verdict.score, 0.0, 1.0);
    scores.values[i] = c;
    trace.agents.push_back({id, graph.nodes.at(id).role, pi.values[i], outputs[id],
                            c, verdict.reason, false});
  }
  // Fill in frequencies for failed agents (they stayed in the population).
  for (auto& record : trace.agents)
    if (record.failed) record.weight = pi.at(record.agent_id);

  trace.team_mean = mean_fitness(pi, scores);

  SimplexVector next = replicator_step(pi, scores, config.eta);

  AgentGraph out = graph;
  for (size_t i = 0; i < next.ids.size(); ++i) {
    AgentNode& node = out.nodes.at(next.ids[i]);
    node.capability_weight = std::max(next.values[i], 1e-12);
  }
  for (auto& record : trace.agents) {
    std::ostringstream note;
    note << "round " << round << " c=" << record.contribution << ": "
         << record.justification;
    out.nodes.at(record.agent_id).capability_memory.push_back(note.str());
  }

  std::string sink_output = outputs[graph.sink];
  trace.answer = extract_final_answer(sink_output);
  if (config.rubric.empty()) {
    trace.answer_score = 0.0;
  } else {
    trace.answer_score =
        std::clamp(judge_answer(*backends.judge, trace.answer, config.rubric), 0.0, 1.0);
  }

  std::sort(trace.agents.begin(), trace.agents.end(),
            [](const AgentRecord& a, const AgentRecord& b) {
              return a.agent_id < b.agent_id;
            });
  return {std::move(trace), std::move(out)};
}

SlowUpdateResult slow_update(const AgentGraph& graph,
                             const std::vector<RoundTrace>& history,
                             MetaBackend& meta, const EditBudget& budget,
                             const std::string& query) {
  MetaSnapshot snapshot;
  snapshot.task_description = query;
  snapshot.graph = graph;
  for (const auto& trace : history) {
    snapshot.round_scores.push_back(trace.answer_score);
    for (const auto& record : trace.agents) {
      if (!graph.has_node(record.agent_id)) continue;
      std::ostringstream os;
      os << "r" << trace.round << " c=" << record.contribution;
      if (record.failed) os << " (failed)";
      auto& summary = snapshot.per_agent_summaries[record.agent_id];
      if (!summary.empty()) summary += "; ";
      summary += os.str();
    }
  }

  MetaDecision decision = meta.decide(snapshot);

  SlowUpdateResult result;
  ValidationReport report = validate_delta(graph, decision.delta, budget);
  result.violations = report.violations;
  result.applied = report.truncated;
  result.graph = apply_delta(graph, report.truncated);
  result.time_control = decision.time_control;

  for (const auto& [agent_id, feedback] : decision.agent_feedback) {
    auto it = result.graph.nodes.find(agent_id);
    if (it == result.graph.nodes.end()) continue;
    if (!feedback.prompt_delta.empty())
      it->second.capability_memory.push_back("prompt_delta: " + feedback.prompt_delta);
    if (!feedback.memory_seed.empty())
      it->second.capability_memory.push_back("memory_seed: " + feedback.memory_seed);
  }
  return result;
}

InstanceResult run_instance(const std::string& query, const RunConfig& config,
                            const Backends& backends,
                            const std::function<void(const RoundTrace&)>& on_trace) {
  config.validate();
  if (!backends.agent || !backends.judge || !backends.meta)
    throw std::invalid_argument("run_instance: backends not wired");

  AgentGraph graph = init_graph(config.roles, config.sink_role, config.node_cap);
  InstanceResult result;
  bool stopped = false;

  for (int t = 0; t < config.round_cap && !stopped; ++t) {
    auto [trace, next_graph] = fast_round(graph, backends, query, t, config);
    graph = std::move(next_graph);
    result.traces.push_back(trace);
    result.rounds_used = t + 1;
    if (on_trace) on_trace(result.traces.back());

    if (trace.answer_score >= config.success_threshold) {
      result.stop_reason = StopReason::Threshold;
      break;
    }

    if ((t + 1) % config.slow_interval == 0 &&
        trace.answer_score < config.success_threshold) {
      size_t take = std::min<size_t>(result.traces.size(),
                                     static_cast<size_t>(config.slow_interval));
      std::vector<RoundTrace> history(result.traces.end() - static_cast<long>(take),
                                      result.traces.end());
      // slow_again re-consults the meta-controller once at the same round
      // boundary, so the schedule gate still holds for every update.
      for (int consult = 0; consult < 2; ++consult) {
        SlowUpdateResult slow =
            slow_update(graph, history, *backends.meta, config.budget, query);
        graph = std::move(slow.graph);
        result.slow_updates_used++;
        result.slow_events.push_back(
            {t, static_cast<int>(slow.applied.birth_death_pairs.size()),
             static_cast<int>(slow.applied.edge_edits.size()),
             static_cast<int>(slow.violations.size()), slow.time_control});
        if (slow.time_control == TimeControl::Stop) {
          result.stop_reason = StopReason::StopSignal;
          stopped = true;
          break;
        }
        if (slow.time_control != TimeControl::SlowAgain) break;
      }
    }

    if (t + 1 >= config.round_cap) result.stop_reason = StopReason::BudgetExhausted;
  }

  result.final_answer = result.traces.empty() ? "" : result.traces.back().answer;
  result.final_graph = std::move(graph);
  return result;
}

RoundIncrementSummary round_increment_check(const std::vector<RoundTrace>& traces) {
  if (traces.size() < 2)
    throw std::invalid_argument("round_increment_check: need at least 2 traces");
  RoundIncrementSummary summary;
  for (const auto& trace : traces) summary.m_series.push_back(trace.team_mean);
  int positive = 0;
  for (size_t i = 0; i + 1 < summary.m_series.size(); ++i) {
    double delta = summary.m_series[i + 1] - summary.m_series[i];
    summary.deltas.push_back(delta);
    summary.mean_delta += delta;
    if (delta > 0.0) positive++;
  }
  summary.mean_delta /= static_cast<double>(summary.deltas.size());
  summary.fraction_positive =
      static_cast<double>(positive) / static_cast<double>(summary.deltas.size());
  return summary;
}

// ---------------------------------------------------------------------------
// JSONL persistence
// ---------------------------------------------------------------------------

nlohmann::json run_config_to_json(const RunConfig& config) {
  return {{"roles", config.roles},
          {"sink_role", config.sink_role},
          {"round_cap", config.round_cap},
          {"slow_interval", config.slow_interval},
          {"success_threshold", config.success_threshold},
          {"max_birth_death_pairs", config.budget.max_birth_death_pairs},
          {"max_edge_edits", config.budget.max_edge_edits},
          {"eta", config.eta},
          {"node_cap", config.node_cap},
          {"seed", config.seed}};
}

RunConfig run_config_from_json(const nlohmann::json& j) {
  RunConfig config;
  if (j.contains("roles")) config.roles = j.at("roles").get<std::vector<std::string>>();
  if (j.contains("sink_role")) config.sink_role = j.at("sink_role").get<std::string>();
  if (j.contains("round_cap")) config.round_cap = j.at("round_cap").get<int>();
  if (j.contains("slow_interval"))
    config.slow_interval = j.at("slow_interval").get<int>();
  if (j.contains("success_threshold"))
    config.success_threshold = j.at("success_threshold").get<double>();
  if (j.contains("max_birth_death_pairs"))
    config.budget.max_birth_death_pairs = j.at("max_birth_death_pairs").get<int>();
  if (j.contains("max_edge_edits"))
    config.budget.max_edge_edits = j.at("max_edge_edits").get<int>();
  if (j.contains("eta")) config.eta = j.at("eta").get<double>();
  if (j.contains("node_cap")) config.node_cap = j.at("node_cap").get<int>();
  if (j.contains("seed")) config.seed = j.at("seed").get<std::uint64_t>();
  return config;
}

nlohmann::json trace_header_json(const RunConfig& config, const AgentGraph& graph,
                                 const std::string& query) {
  return {{"type", "header"},
          {"format_version", 1},
          {"query", query},
          {"config", run_config_to_json(config)},
          {"graph", graph_to_json(graph)}};
}

nlohmann::json round_trace_to_json(const RoundTrace& trace) {
  nlohmann::json agents = nlohmann::json::array();
  for (const auto& record : trace.agents)
    agents.push_back({{"agent_id", record.agent_id},
                      {"role", record.role},
                      {"weight", record.weight},
                      {"output", record.output},
                      {"contribution", record.contribution},
                      {"justification", record.justification},
                      {"failed", record.failed}});
  return {{"type", "round"},
          {"round", trace.round},
          {"agents", agents},
          {"team_mean", trace.team_mean},
          {"answer", trace.answer},
          {"answer_score", trace.answer_score},
          {"graph_generation", trace.graph_generation},
          {"edge_count", trace.edge_count}};
}

RoundTrace round_trace_from_json(const nlohmann::json& j) {
  RoundTrace trace;
  trace.round = j.at("round").get<int>();
  for (const auto& aj : j.at("agents")) {
    AgentRecord record;
    record.agent_id = aj.at("agent_id").get<std::string>();
    record.role = aj.at("role").get<std::string>();
    record.weight = aj.at("weight").get<double>();
    record.output = aj.at("output").get<std::string>();
    record.contribution = aj.at("contribution").get<double>();
    record.justification = aj.at("justification").get<std::string>();
    record.failed = aj.at("failed").get<bool>();
    trace.agents.push_back(std::move(record));
  }
  trace.team_mean = j.at("team_mean").get<double>();
  trace.answer = j.at("answer").get<std::string>();
  trace.answer_score = j.at("answer_score").get<double>();
  trace.graph_generation = j.at("graph_generation").get<int>();
  trace.edge_count = j.value("edge_count", 0);
  return trace;
}

nlohmann::json instance_result_json(const InstanceResult& result) {
  nlohmann::json events = nlohmann::json::array();
  for (const auto& event : result.slow_events)
    events.push_back({{"round", event.round},
                      {"pairs_applied", event.pairs_applied},
                      {"edge_edits_applied", event.edge_edits_applied},
                      {"violations", event.violations},
                      {"time_control", time_control_name(event.time_control)}});
  return {{"type", "result"},
          {"stop_reason", stop_reason_name(result.stop_reason)},
          {"rounds_used", result.rounds_used},
          {"slow_updates_used", result.slow_updates_used},
          {"slow_events", events},
          {"final_answer", result.final_answer},
          {"final_nodes", result.final_graph.nodes.size()},
          {"final_edges", result.final_graph.edges.size()}};
}

}  // namespace coevo
