#include "flocksim/llm_client.hpp"

#include <chrono>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace flocksim {

namespace {

// Split "https://host:port/v1" into the client root and the path prefix.
std::pair<std::string, std::string> split_base_url(const std::string& base_url) {
  const auto scheme_end = base_url.find("://");
  const std::size_t host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
  const auto path_start = base_url.find('/', host_start);
  if (path_start == std::string::npos) return {base_url, ""};
  std::string prefix = base_url.substr(path_start);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return {base_url.substr(0, path_start), prefix};
}

}  // namespace

struct ChatClient::Impl {
  httplib::Client http;
  std::string path;
  std::string api_key;

  Impl(const std::string& root, std::string path_prefix, const LlmConfig& cfg)
      : http(root), path(std::move(path_prefix) + "/chat/completions") {
    http.set_connection_timeout(cfg.timeout_seconds, 0);
    http.set_read_timeout(cfg.timeout_seconds, 0);
    http.set_write_timeout(cfg.timeout_seconds, 0);
    if (const char* key = std::getenv(cfg.api_key_env.c_str())) api_key = key;
  }
};

ChatClient::ChatClient(LlmConfig config) : config_(std::move(config)) {
  const auto [root, prefix] = split_base_url(config_.base_url);
  impl_ = std::make_unique<Impl>(root, prefix, config_);
}

ChatClient::~ChatClient() = default;

std::string ChatClient::complete(const std::vector<ChatMessage>& messages) {
  nlohmann::json payload;
  payload["model"] = config_.model;
  payload["temperature"] = config_.temperature;
  payload["messages"] = nlohmann::json::array();
  for (const auto& m : messages)
    payload["messages"].push_back({{"role", m.role}, {"content", m.content}});
  const std::string body = payload.dump();

  httplib::Headers headers;
  if (!impl_->api_key.empty())
    headers.emplace("Authorization", "Bearer " + impl_->api_key);

  std::string last_error;
  for (int attempt = 0; attempt <= config_.transport_retries; ++attempt) {
    if (attempt > 0 && config_.retry_delay_ms > 0)
      std::this_thread::sleep_for(std::chrono::milliseconds(config_.retry_delay_ms * attempt));

    auto res = impl_->http.Post(impl_->path, headers, body, "application/json");
    if (!res) {
      last_error = "transport: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 429 || res->status >= 500) {
      last_error = "http status " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200)
      throw LlmTransportError("chat completion failed: http status " +
                              std::to_string(res->status) + ": " + res->body);
    try {
      const auto json = nlohmann::json::parse(res->body);
      return json.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw LlmTransportError(std::string("malformed chat completion response: ") +
                              e.what());
    }
  }
  throw LlmTransportError("chat completion failed after " +
                          std::to_string(config_.transport_retries + 1) +
                          " attempts: " + last_error);
}

LlmPlannerSession::LlmPlannerSession(int robot_id, const TaskSpec& spec,
                                     const LlmConfig& config)
    : robot_id_(robot_id), spec_(spec), client_(config) {
  history_.push_back({"system", render_system_prompt(spec_)});
}

std::string LlmPlannerSession::exchange(const std::string& user_message) {
  history_.push_back({"user", user_message});
  truncate_history();
  const std::string reply = client_.complete(history_);
  history_.push_back({"assistant", reply});
  ++replies_total_;
  return reply;
}

void LlmPlannerSession::truncate_history() {
  // System message stays; beyond it keep only the most recent exchanges so
  // long runs do not outgrow the model's context window.
  const std::size_t keep = 1 + 2 * static_cast<std::size_t>(client_.config().history_exchanges);
  if (history_.size() <= keep) return;
  history_.erase(history_.begin() + 1,
                 history_.begin() + static_cast<std::ptrdiff_t>(history_.size() - keep + 1));
}

PlanResult LlmPlannerSession::generate_plan() {
  std::string request = render_plan_request(spec_);
  ParseError last_error = ParseError::plan_missing;
  for (int attempt = 0; attempt <= client_.config().reprompt_budget; ++attempt) {
    const std::string reply = exchange(request);
    PlanReplyParse parsed = parse_plan_reply(reply, spec_.team_size);
    if (parsed.ok()) {
      parsed.result->plan.origin_id = robot_id_;
      return *parsed.result;
    }
    last_error = parsed.error;
    ++parse_fallbacks_;
    request = std::string("Your previous reply could not be parsed (") +
              parse_error_name(parsed.error) +
              "). Please restate the final answer exactly in the form "
              "'Plan: [[x_1, y_1], [x_2, y_2], ...]' with one pair per robot, "
              "followed by 'my plan: a' where a is your index.";
  }
  throw LlmParseError(last_error,
                      "robot " + std::to_string(robot_id_) +
                          ": plan reply unparseable after re-prompts (" +
                          parse_error_name(last_error) + ")");
}

Vec2 LlmPlannerSession::propose_step(const StepContext& ctx, bool& used_fallback) {
  used_fallback = false;
  std::string request = render_step_request(ctx);
  for (int attempt = 0; attempt <= client_.config().reprompt_budget; ++attempt) {
    const std::string reply = exchange(request);
    const PositionReplyParse parsed = parse_position_reply(reply);
    if (parsed.ok()) return *parsed.position;
    ++parse_fallbacks_;
    request =
        "Your previous reply could not be parsed. Please provide only the new "
        "position in the format 'Position: [x, y].'";
  }
  used_fallback = true;
  return flocksim::propose_step(PlannerKind::oracle, ctx);
}

}  // namespace flocksim
