#pragma once

#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "coevo/graph.hpp"
#include "coevo/landscape.hpp"
#include "coevo/meta_decision.hpp"

namespace coevo {

/// Typed backend failure (timeout or transport). The orchestrator records
/// these per agent and keeps the round going.
class BackendError : public std::runtime_error {
 public:
  enum class Kind { Timeout, Transport };
  BackendError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct JudgeVerdict {
  double score = 0.0;  // clamped to [0,1]
  std::string reason;
};

enum class RubricOp { Correctness, Contradiction };

struct RubricItem {
  RubricOp op = RubricOp::Correctness;
  std::string text;
};

using Rubric = std::vector<RubricItem>;

/// Fraction of rubric items passed. A correctness item passes on true, a
/// contradiction item on false. Throws on empty rubric or length mismatch.
double rubric_score(const Rubric& rubric, const std::vector<bool>& results);

struct JudgeContext {
  std::string query;
  std::string agent_id;
  std::string role;
  int round = 0;
  const AgentGraph* graph = nullptr;
};

class AgentBackend {
 public:
  virtual ~AgentBackend() = default;
  virtual std::string execute(const AgentNode& node,
                              const std::vector<std::string>& incoming,
                              const std::string& query, int round) = 0;
};

class JudgeBackend {
 public:
  virtual ~JudgeBackend() = default;
  virtual JudgeVerdict contribution(const std::string& output,
                                    const JudgeContext& context) = 0;
  virtual std::vector<bool> rubric_verdicts(const std::string& answer,
                                            const Rubric& rubric) = 0;
};

/// Scores the final answer through the backend's rubric verdicts.
double judge_answer(JudgeBackend& judge, const std::string& answer,
                    const Rubric& rubric);

struct MetaSnapshot {
  std::string task_description;
  AgentGraph graph;
  std::map<std::string, std::string> per_agent_summaries;
  std::vector<double> round_scores;  // oldest to newest
};

class MetaBackend {
 public:
  virtual ~MetaBackend() = default;
  virtual MetaDecision decide(const MetaSnapshot& snapshot) = 0;
};

struct Backends {
  AgentBackend* agent = nullptr;
  JudgeBackend* judge = nullptr;
  MetaBackend* meta = nullptr;
};

/// Parses a model reply as strict {"score": x, "reason": "..."} JSON,
/// clamping the score to [0,1]. Returns nullopt on anything else.
std::optional<JudgeVerdict> parse_judge_verdict(const std::string& text);

/// Parses {"results":[true,false,...]}; the array length must match n.
std::optional<std::vector<bool>> parse_rubric_results(const std::string& text,
                                                      size_t n);

// ---------------------------------------------------------------------------
// Deterministic mock backends
// ---------------------------------------------------------------------------

/// Replays a (agent-id, round) -> text table; falls back to a synthesized
/// line. Sink agents always get a "Final Answer:" line appended when the
/// scripted text lacks one.
class ScriptedAgentBackend : public AgentBackend {
 public:
  void script(const std::string& agent_id, int round, const std::string& text) {
    table_[{agent_id, round}] = text;
  }
  void fail(const std::string& agent_id, int round) {
    failures_.insert({agent_id, round});
  }
  std::string execute(const AgentNode& node, const std::vector<std::string>& incoming,
                      const std::string& query, int round) override;

 private:
  std::map<std::pair<std::string, int>, std::string> table_;
  std::set<std::pair<std::string, int>> failures_;
};

/// Tags each output with the node's role so the landscape judge can score it.
class LandscapeAgentBackend : public AgentBackend {
 public:
  std::string execute(const AgentNode& node, const std::vector<std::string>& incoming,
                      const std::string& query, int round) override;
};

/// Contribution scores come from the landscape's fitness plus seeded noise
/// within its bound; rubric verdicts pass once the answer score target is hit.
class LandscapeJudgeBackend : public JudgeBackend {
 public:
  LandscapeJudgeBackend(FitnessLandscape landscape, std::uint64_t seed)
      : landscape_(std::move(landscape)), rng_(seed) {}

  JudgeVerdict contribution(const std::string& output,
                            const JudgeContext& context) override;
  std::vector<bool> rubric_verdicts(const std::string& answer,
                                    const Rubric& rubric) override;

 private:
  FitnessLandscape landscape_;
  std::mt19937_64 rng_;
};

/// Per-round scripted contribution and answer scores.
class ScriptedJudgeBackend : public JudgeBackend {
 public:
  void script_contribution(const std::string& agent_id, int round, double score) {
    contributions_[{agent_id, round}] = score;
  }
  void script_answer_scores(std::vector<double> per_round) {
    answer_scores_ = std::move(per_round);
  }
  JudgeVerdict contribution(const std::string& output,
                            const JudgeContext& context) override;
  std::vector<bool> rubric_verdicts(const std::string& answer,
                                    const Rubric& rubric) override;

 private:
  std::map<std::pair<std::string, int>, double> contributions_;
  std::vector<double> answer_scores_;
  int rubric_calls_ = 0;
};

/// Wraps the biased mutation oracle as a meta-controller; time_control is
/// scripted per invocation (defaulting to continue).
class OracleMetaBackend : public MetaBackend {
 public:
  OracleMetaBackend(FitnessLandscape landscape, double p, std::uint64_t seed)
      : landscape_(std::move(landscape)), p_(p), rng_(seed) {}
  void script_time_control(std::vector<TimeControl> sequence) {
    time_controls_ = std::move(sequence);
  }
  MetaDecision decide(const MetaSnapshot& snapshot) override;

 private:
  FitnessLandscape landscape_;
  double p_;
  std::mt19937_64 rng_;
  std::vector<TimeControl> time_controls_;
  size_t calls_ = 0;
};

/// Replays a fixed queue of decisions; repeats the last one when exhausted.
class ScriptedMetaBackend : public MetaBackend {
 public:
  void enqueue(MetaDecision decision) { queue_.push_back(std::move(decision)); }
  MetaDecision decide(const MetaSnapshot& snapshot) override;

 private:
  std::deque<MetaDecision> queue_;
};

}  // namespace coevo
