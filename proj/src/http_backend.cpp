#include "coevo/http_backend.hpp"

#include <cstdlib>
#include <sstream>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "coevo/prompts.hpp"

namespace coevo {

using nlohmann::json;

namespace {

std::string join_lines(const std::vector<std::string>& lines) {
  if (lines.empty()) return "(none)";
  std::ostringstream os;
  for (size_t i = 0; i < lines.size(); ++i) {
    if (i) os << "\n";
    os << "- " << lines[i];
  }
  return os.str();
}

std::string env_or(const char* name, const std::string& fallback) {
  const char* v = std::getenv(name);
  return v ? std::string(v) : fallback;
}

}  // namespace

std::vector<ChatMessage> assemble_agent_prompt(const AgentNode& node,
                                               const std::vector<std::string>& incoming,
                                               const std::string& query) {
  std::string goal = "fulfill the " + node.role + " role for the task";
  std::string constraint = "stay concise and grounded in the incoming evidence";
  for (const auto& record : node.capability_memory) {
    if (record.rfind("goal: ", 0) == 0) goal = record.substr(6);
  }
  std::string memory;
  for (const auto& record : node.capability_memory) memory += record + "\n";

  std::string system = prompts::fill_slots(
      prompts::kAgentSystem,
      {{"role_name", node.role},
       {"role_goal", goal},
       {"role_constraint", constraint},
       {"tool_specs", "(none)"},
       {"incoming_messages", join_lines(incoming)}});
  std::string user = "Task:\n" + query;
  if (!memory.empty()) user += "\n\nAccumulated capability notes:\n" + memory;
  return {{"system", system}, {"user", user}};
}

std::vector<ChatMessage> assemble_contribution_prompt(const std::string& output,
                                                      const JudgeContext& context) {
  std::string user = prompts::fill_slots(
      prompts::kContributionJudge,
      {{"evidence_note", ""},
       {"task", context.query},
       {"query", context.query},
       {"agent_id", context.agent_id},
       {"role", context.role},
       {"tool_names", "(none)"},
       {"precheck", "PASS"},
       {"output_for_judge", output}});
  return {{"user", user}};
}

std::vector<ChatMessage> assemble_rubric_prompt(const std::string& answer,
                                                const Rubric& rubric) {
  json items = json::array();
  for (const auto& item : rubric)
    items.push_back({{"operator", item.op == RubricOp::Correctness
                                      ? "correctness"
                                      : "contradiction"},
                     {"criterion", item.text}});
  std::string user = prompts::fill_slots(
      prompts::kRubricJudge,
      {{"answer", answer}, {"rubric_json", items.dump(2)}});
  return {{"user", user}};
}

std::vector<ChatMessage> assemble_meta_prompt(const MetaSnapshot& snapshot) {
  json summaries = json::object();
  for (const auto& [agent_id, summary] : snapshot.per_agent_summaries)
    summaries[agent_id] = summary;
  json scores = json::array();
  for (double s : snapshot.round_scores) scores.push_back(s);

  std::string user = prompts::fill_slots(
      prompts::kMetaUser,
      {{"task_description", snapshot.task_description},
       {"graph_json", graph_to_json(snapshot.graph).dump(2)},
       {"per_agent_summaries", summaries.dump(2)},
       {"round_scores", scores.dump()}});
  return {{"system", prompts::kMetaSystem},
          {"developer", prompts::kMetaDeveloper},
          {"user", user}};
}

HttpConfig HttpConfig::from_env() {
  HttpConfig config;
  config.base_url = env_or("COEVO_API_BASE", "");
  config.path = env_or("COEVO_API_PATH", "/v1/chat/completions");
  config.model = env_or("COEVO_MODEL", "");
  config.api_key = env_or("COEVO_API_KEY", "");
  return config;
}

std::string HttpChatBackend::complete(const std::vector<ChatMessage>& messages) {
  if (config_.base_url.empty())
    throw BackendError(BackendError::Kind::Transport,
                       "no endpoint configured (COEVO_API_BASE)");
  json body;
  body["model"] = config_.model;
  body["temperature"] = config_.temperature;
  json msgs = json::array();
  for (const auto& m : messages)
    msgs.push_back({{"role", m.role == "developer" ? "system" : m.role},
                    {"content", m.content}});
  body["messages"] = msgs;

  httplib::Client client(config_.base_url);
  client.set_read_timeout(config_.timeout_seconds, 0);
  client.set_connection_timeout(10, 0);
  httplib::Headers headers;
  if (!config_.api_key.empty())
    headers.emplace("Authorization", "Bearer " + config_.api_key);

  auto res = client.Post(config_.path, headers, body.dump(), "application/json");
  if (!res)
    throw BackendError(BackendError::Kind::Transport,
                       "transport failure: " + httplib::to_string(res.error()));
  if (res->status != 200)
    throw BackendError(BackendError::Kind::Transport,
                       "endpoint returned status " + std::to_string(res->status));
  json reply = json::parse(res->body, nullptr, false);
  if (reply.is_discarded())
    throw BackendError(BackendError::Kind::Transport, "non-JSON endpoint reply");
  try {
    return reply.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception&) {
    throw BackendError(BackendError::Kind::Transport,
                       "unexpected completion payload shape");
  }
}

std::string HttpChatBackend::execute(const AgentNode& node,
                                     const std::vector<std::string>& incoming,
                                     const std::string& query, int round) {
  (void)round;
  return complete(assemble_agent_prompt(node, incoming, query));
}

JudgeVerdict HttpChatBackend::contribution(const std::string& output,
                                           const JudgeContext& context) {
  auto messages = assemble_contribution_prompt(output, context);
  for (int attempt = 0; attempt <= config_.parse_retries; ++attempt) {
    std::string reply = complete(messages);
    if (auto verdict = parse_judge_verdict(reply)) return *verdict;
  }
  return {0.0, "judge_parse_failure"};
}

std::vector<bool> HttpChatBackend::rubric_verdicts(const std::string& answer,
                                                   const Rubric& rubric) {
  auto messages = assemble_rubric_prompt(answer, rubric);
  for (int attempt = 0; attempt <= config_.parse_retries; ++attempt) {
    std::string reply = complete(messages);
    if (auto results = parse_rubric_results(reply, rubric.size())) return *results;
  }
  // All-fail verdicts keep the run going with a zero answer score.
  return std::vector<bool>(rubric.size(), false);
}

MetaDecision HttpChatBackend::decide(const MetaSnapshot& snapshot) {
  auto messages = assemble_meta_prompt(snapshot);
  for (int attempt = 0; attempt <= config_.parse_retries; ++attempt) {
    std::string reply = complete(messages);
    MetaParseResult result = parse_meta_decision(reply);
    if (result.ok()) return *result.decision;
  }
  return MetaDecision::fallback();  // empty delta, time_control = continue
}

}  // namespace coevo
