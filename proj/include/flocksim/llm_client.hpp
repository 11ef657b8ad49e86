#pragma once

#include <memory>
#include <string>
#include <vector>

#include "flocksim/core.hpp"
#include "flocksim/planner.hpp"

// Chat-completions transport and the conversation-driven planner built on
// it. Each robot owns one session: the system message is sent once, then
// plan/step requests accumulate as a capped conversation history.

namespace flocksim {

// Transport failed after all retries (connection refused, repeated 5xx, ...).
struct LlmTransportError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The model answered, but no reply survived parsing within the re-prompt budget.
struct LlmParseError : std::runtime_error {
  LlmParseError(ParseError code, const std::string& what)
      : std::runtime_error(what), code(code) {}
  ParseError code;
};

struct LlmConfig {
  std::string base_url = "http://127.0.0.1:8080/v1";
  std::string model;
  double temperature = 0.0;
  int timeout_seconds = 60;
  std::string api_key_env = "LLM_API_KEY";  // key read from this env var, never from files
  int transport_retries = 2;
  int retry_delay_ms = 500;
  int reprompt_budget = 2;       // format-restating retries per request
  int history_exchanges = 6;     // user/assistant pairs kept after the system message
};

struct ChatMessage {
  std::string role;  // "system" | "user" | "assistant"
  std::string content;
};

// Minimal chat-completions client: POST {base_url}/chat/completions with
// {model, messages, temperature}, bearer auth from the configured env var.
class ChatClient {
 public:
  explicit ChatClient(LlmConfig config);
  ~ChatClient();

  // Returns the first choice's message content. Retries transient transport
  // failures with linear backoff; throws LlmTransportError when exhausted.
  std::string complete(const std::vector<ChatMessage>& messages);

  const LlmConfig& config() const { return config_; }

 private:
  LlmConfig config_;
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Conversation state and request/parse loop for one robot.
class LlmPlannerSession {
 public:
  LlmPlannerSession(int robot_id, const TaskSpec& spec, const LlmConfig& config);

  // Sends the plan-generation request and parses the reply. Unparseable
  // replies trigger up to `reprompt_budget` rewrites of the format
  // instruction; after that an LlmParseError escapes (a trial cannot run
  // without an initial plan).
  PlanResult generate_plan();

  // Sends a position-update request and parses the waypoint. When the reply
  // budget is exhausted the session falls back to the deterministic oracle
  // step so long runs survive occasional model failures; `used_fallback`
  // reports that.
  Vec2 propose_step(const StepContext& ctx, bool& used_fallback);

  int replies_total() const { return replies_total_; }
  int parse_fallbacks() const { return parse_fallbacks_; }

 private:
  std::string exchange(const std::string& user_message);
  void truncate_history();

  int robot_id_;
  TaskSpec spec_;
  ChatClient client_;
  std::vector<ChatMessage> history_;
  int replies_total_ = 0;
  int parse_fallbacks_ = 0;
};

}  // namespace flocksim
