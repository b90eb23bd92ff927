#pragma once

#include <string>
#include <vector>

#include "coevo/backends.hpp"
#include "coevo/meta_decision.hpp"

namespace coevo {

struct ChatMessage {
  std::string role;  // "system" | "developer" | "user"
  std::string content;
};

/// Prompt assembly, shared by the live client and the prompt-fidelity tests.
std::vector<ChatMessage> assemble_agent_prompt(const AgentNode& node,
                                               const std::vector<std::string>& incoming,
                                               const std::string& query);
std::vector<ChatMessage> assemble_contribution_prompt(const std::string& output,
                                                      const JudgeContext& context);
std::vector<ChatMessage> assemble_rubric_prompt(const std::string& answer,
                                                const Rubric& rubric);
std::vector<ChatMessage> assemble_meta_prompt(const MetaSnapshot& snapshot);

struct HttpConfig {
  std::string base_url;  // e.g. http://localhost:8000
  std::string path = "/v1/chat/completions";
  std::string model;
  std::string api_key;
  double temperature = 0.0;
  int timeout_seconds = 120;
  int parse_retries = 2;

  /// Reads COEVO_API_BASE, COEVO_API_PATH, COEVO_MODEL, COEVO_API_KEY.
  static HttpConfig from_env();
};

/// Chat-completions client implementing all three backend roles. Transport
/// failures surface as BackendError; unparseable judge or meta replies fall
/// back to the documented defaults after the configured retries.
class HttpChatBackend : public AgentBackend, public JudgeBackend, public MetaBackend {
 public:
  explicit HttpChatBackend(HttpConfig config) : config_(std::move(config)) {}

  std::string execute(const AgentNode& node, const std::vector<std::string>& incoming,
                      const std::string& query, int round) override;
  JudgeVerdict contribution(const std::string& output,
                            const JudgeContext& context) override;
  std::vector<bool> rubric_verdicts(const std::string& answer,
                                    const Rubric& rubric) override;
  MetaDecision decide(const MetaSnapshot& snapshot) override;

 private:
  std::string complete(const std::vector<ChatMessage>& messages);

  HttpConfig config_;
};

}  // namespace coevo
