#include <cstdlib>
#include <thread>

#include <httplib.h>

#include "evsynth/error.hpp"
#include "evsynth/extraction.hpp"

namespace evsynth {

namespace {

bool retryable(int status) { return status == 429 || status >= 500; }

}  // namespace

RemoteConfig RemoteConfig::from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("remote config must be a JSON object");
  RemoteConfig config;
  config.base_url = j.value("base_url", config.base_url);
  config.path = j.value("path", config.path);
  config.model_id = j.value("model_id", config.model_id);
  config.max_output_length = j.value("max_output_length", config.max_output_length);
  config.api_key_env = j.value("api_key_env", config.api_key_env);
  config.timeout_seconds = j.value("timeout_seconds", config.timeout_seconds);
  config.max_retries = j.value("max_retries", config.max_retries);
  config.backoff_ms = j.value("backoff_ms", config.backoff_ms);
  if (config.max_retries < 0 || config.backoff_ms < 0 || config.timeout_seconds <= 0) {
    throw ConfigError("remote config: retries/backoff must be >= 0 and timeout > 0");
  }
  return config;
}

RemoteConfig RemoteConfig::load(const std::string& path) {
  RemoteConfig config = from_json(parse_json(read_file(path)));
  if (const char* url = std::getenv("EVSYNTH_REMOTE_URL")) config.base_url = url;
  if (const char* model = std::getenv("EVSYNTH_REMOTE_MODEL")) config.model_id = model;
  if (config.base_url.empty()) throw ConfigError("remote config: base_url is required");
  return config;
}

RemoteTextClient::RemoteTextClient(RemoteConfig config) : config_(std::move(config)) {}

std::optional<std::string> RemoteTextClient::complete(const std::string& instruction,
                                                      const std::string& input_text) const {
  httplib::Client client(config_.base_url);
  client.set_connection_timeout(config_.timeout_seconds, 0);
  client.set_read_timeout(config_.timeout_seconds, 0);
  httplib::Headers headers;
  if (!config_.api_key_env.empty()) {
    if (const char* key = std::getenv(config_.api_key_env.c_str())) {
      headers.emplace("Authorization", std::string("Bearer ") + key);
    }
  }
  const std::string body = Json{{"model_id", config_.model_id},
                                {"instruction", instruction},
                                {"input_text", input_text},
                                {"max_output_length", config_.max_output_length}}
                               .dump();

  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0 && config_.backoff_ms > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(config_.backoff_ms * attempt));
    }
    auto response = client.Post(config_.path, headers, body, "application/json");
    if (!response) continue;  // transport failure, retry
    if (response->status == 200) {
      try {
        Json reply = Json::parse(response->body);
        if (reply.is_object() && reply.contains("text") && reply["text"].is_string()) {
          return reply["text"].get<std::string>();
        }
      } catch (const Json::exception&) {
      }
      return std::nullopt;
    }
    if (!retryable(response->status)) return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace evsynth
