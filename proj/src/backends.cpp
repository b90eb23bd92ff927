#include "coevo/backends.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "coevo/mutator_lab.hpp"

namespace coevo {

using nlohmann::json;

double rubric_score(const Rubric& rubric, const std::vector<bool>& results) {
  if (rubric.empty()) throw std::invalid_argument("rubric_score: empty rubric");
  if (rubric.size() != results.size())
    throw std::invalid_argument("rubric_score: results length mismatch");
  int passed = 0;
  for (size_t i = 0; i < rubric.size(); ++i) {
    bool pass = (rubric[i].op == RubricOp::Correctness) ? results[i] : !results[i];
    passed += pass ? 1 : 0;
  }
  return static_cast<double>(passed) / static_cast<double>(rubric.size());
}

double judge_answer(JudgeBackend& judge, const std::string& answer,
                    const Rubric& rubric) {
  if (rubric.empty()) throw std::invalid_argument("judge_answer: empty rubric");
  std::vector<bool> results = judge.rubric_verdicts(answer, rubric);
  return rubric_score(rubric, results);
}

std::optional<JudgeVerdict> parse_judge_verdict(const std::string& text) {
  json root = json::parse(text, nullptr, false);
  if (root.is_discarded() || !root.is_object()) return std::nullopt;
  if (!root.contains("score") || !root.contains("reason")) return std::nullopt;
  if (!root.at("score").is_number() || !root.at("reason").is_string())
    return std::nullopt;
  JudgeVerdict verdict;
  verdict.score = std::clamp(root.at("score").get<double>(), 0.0, 1.0);
  verdict.reason = root.at("reason").get<std::string>();
  return verdict;
}

std::optional<std::vector<bool>> parse_rubric_results(const std::string& text,
                                                      size_t n) {
  json root = json::parse(text, nullptr, false);
  if (root.is_discarded() || !root.is_object() || !root.contains("results"))
    return std::nullopt;
  const json& arr = root.at("results");
  if (!arr.is_array() || arr.size() != n) return std::nullopt;
  std::vector<bool> results;
  for (const auto& v : arr) {
    if (!v.is_boolean()) return std::nullopt;
    results.push_back(v.get<bool>());
  }
  return results;
}

// ---------------------------------------------------------------------------

std::string ScriptedAgentBackend::execute(const AgentNode& node,
                                          const std::vector<std::string>& incoming,
                                          const std::string& query, int round) {
  if (failures_.count({node.id, round}))
    throw BackendError(BackendError::Kind::Transport,
                       "scripted failure for " + node.id);
  std::string text;
  auto it = table_.find({node.id, round});
  if (it != table_.end()) {
    text = it->second;
  } else {
    std::ostringstream os;
    os << "[" << node.role << " r" << round << "] " << query;
    if (!incoming.empty()) os << " (+" << incoming.size() << " msgs)";
    text = os.str();
  }
  return text;
}

std::string LandscapeAgentBackend::execute(const AgentNode& node,
                                           const std::vector<std::string>& incoming,
                                           const std::string& query, int round) {
  std::ostringstream os;
  os << "role=" << node.role << " round=" << round
     << " inputs=" << incoming.size();
  os << "\nFinal Answer: " << query;
  return os.str();
}

JudgeVerdict LandscapeJudgeBackend::contribution(const std::string& output,
                                                 const JudgeContext& context) {
  (void)output;
  if (context.graph == nullptr)
    throw std::invalid_argument("LandscapeJudgeBackend: missing graph context");
  std::map<std::string, double> weights;
  for (const auto& [id, node] : context.graph->nodes)
    weights[id] = node.capability_weight;
  SimplexVector pi = to_frequencies(weights);
  FitnessVector f = landscape_.eval(pi, *context.graph);
  double score = f.at(context.agent_id);
  if (landscape_.noise_bound > 0.0) {
    std::uniform_real_distribution<double> noise(-landscape_.noise_bound,
                                                 landscape_.noise_bound);
    score = std::clamp(score + noise(rng_), 0.0, 1.0);
  }
  return {score, "landscape fitness for role " + context.role};
}

std::vector<bool> LandscapeJudgeBackend::rubric_verdicts(const std::string& answer,
                                                         const Rubric& rubric) {
  (void)answer;
  // The lab landscapes have no notion of rubric truth; every correctness
  // item fails and every contradiction item passes, so the answer score
  // tracks the contradiction fraction and never spuriously terminates runs.
  return std::vector<bool>(rubric.size(), false);
}

JudgeVerdict ScriptedJudgeBackend::contribution(const std::string& output,
                                                const JudgeContext& context) {
  (void)output;
  auto it = contributions_.find({context.agent_id, context.round});
  if (it != contributions_.end()) return {std::clamp(it->second, 0.0, 1.0), "scripted"};
  return {0.5, "scripted default"};
}

std::vector<bool> ScriptedJudgeBackend::rubric_verdicts(const std::string& answer,
                                                        const Rubric& rubric) {
  (void)answer;
  double target = 0.0;
  if (!answer_scores_.empty()) {
    size_t idx = std::min<size_t>(static_cast<size_t>(rubric_calls_),
                                  answer_scores_.size() - 1);
    target = answer_scores_[idx];
  }
  rubric_calls_++;
  // Emit verdicts whose pass fraction is as close to the scripted score as
  // the rubric granularity allows.
  int passes = static_cast<int>(std::lround(target * static_cast<double>(rubric.size())));
  std::vector<bool> results;
  for (size_t i = 0; i < rubric.size(); ++i) {
    bool pass = static_cast<int>(i) < passes;
    results.push_back(rubric[i].op == RubricOp::Correctness ? pass : !pass);
  }
  return results;
}

MetaDecision OracleMetaBackend::decide(const MetaSnapshot& snapshot) {
  MutationProposal proposal =
      biased_mutation_oracle(snapshot.graph, landscape_, p_, rng_);
  MetaDecision decision;
  decision.delta = proposal.delta;
  decision.global_rationale = proposal.improving
                                  ? "oracle: distance-decreasing edit"
                                  : "oracle: random legal edit";
  if (calls_ < time_controls_.size())
    decision.time_control = time_controls_[calls_];
  calls_++;
  return decision;
}

MetaDecision ScriptedMetaBackend::decide(const MetaSnapshot& snapshot) {
  (void)snapshot;
  if (queue_.empty()) return MetaDecision::fallback();
  MetaDecision decision = queue_.front();
  if (queue_.size() > 1) queue_.pop_front();
  return decision;
}

}  // namespace coevo
