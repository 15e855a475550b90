#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "evsynth/util.hpp"

namespace evsynth {

/// Bumped whenever request framing changes; part of every request digest
/// so stale replay fixtures miss instead of answering the wrong question.
inline constexpr int kParserContractVersion = 1;

enum class ExpectedKind { boolean_yes_no, number, phrase_or_none, name_list };

std::string_view to_string(ExpectedKind kind);
ExpectedKind expected_kind_from(std::string_view text);

struct ExtractionRequest {
  std::string instruction;
  std::string attended_text;
  ExpectedKind expected_kind = ExpectedKind::phrase_or_none;
};

std::string request_digest(const ExtractionRequest& request);

/// nullopt is the none-marker.
using Phrase = std::optional<std::string>;
using ExtractedPayload = std::variant<bool, double, Phrase, std::vector<std::string>>;

struct Provenance {
  std::string parser_id;
  std::string request_digest;
  int attempts = 0;
  bool fallback = false;
};

struct ExtractedValue {
  ExpectedKind kind = ExpectedKind::phrase_or_none;
  ExtractedPayload value;
  Provenance provenance;

  [[nodiscard]] bool as_bool() const { return std::get<bool>(value); }
  [[nodiscard]] double as_number() const { return std::get<double>(value); }
  [[nodiscard]] const Phrase& as_phrase() const { return std::get<Phrase>(value); }
  [[nodiscard]] const std::vector<std::string>& as_names() const {
    return std::get<std::vector<std::string>>(value);
  }
};

enum class FailureReason { schema_violation, parser_unavailable, empty_input };

std::string_view to_string(FailureReason reason);

struct ExtractionFailure {
  FailureReason reason = FailureReason::schema_violation;
  std::string detail;
  Provenance provenance;
};

class ExtractionResult {
 public:
  ExtractionResult(ExtractedValue value) : state_(std::move(value)) {}  // NOLINT
  ExtractionResult(ExtractionFailure failure) : state_(std::move(failure)) {}  // NOLINT

  [[nodiscard]] bool ok() const { return std::holds_alternative<ExtractedValue>(state_); }
  [[nodiscard]] const ExtractedValue& value() const { return std::get<ExtractedValue>(state_); }
  [[nodiscard]] const ExtractionFailure& failure() const {
    return std::get<ExtractionFailure>(state_);
  }

 private:
  std::variant<ExtractedValue, ExtractionFailure> state_;
};

/// The accept grammar for raw parser text. Returns nullopt when the text
/// does not conform to the kind; never guesses.
std::optional<ExtractedPayload> validate_raw(ExpectedKind kind, std::string_view raw);

/// Canonical raw rendering of a payload, such that validate_raw() of the
/// rendering yields the same payload.
std::string render_payload(const ExtractedPayload& payload);

/// Anything that turns an extraction request into raw text. nullopt means
/// the backend could not answer at all.
class Parser {
 public:
  virtual ~Parser() = default;
  [[nodiscard]] virtual std::string id() const = 0;
  virtual std::optional<std::string> respond(const ExtractionRequest& request) = 0;
};

/// validate -> one retry -> reference fallback -> failure.
ExtractionResult extract(const ExtractionRequest& request, Parser& parser);

Json to_json(const ExtractedValue& value);
Json to_json(const ExtractionFailure& failure);
Json to_json(const ExtractionResult& result);

// --- reference parser ---------------------------------------------------------

/// Instruction fragment that asks for a structured eligibility tuple. The
/// reference parser recognises it and answers with a JSON object.
inline constexpr const char* kStructureCriterionInstruction =
    "Structure this eligibility criterion. Return a JSON object with the keys entity, "
    "attribute, value and condition, or 'None' if it cannot be structured. Do not explain "
    "your answer.";

/// Deterministic keyword and pattern heuristics; a pure function of the
/// request. Returns "None" when nothing matches.
std::string reference_parse(const ExtractionRequest& request);

class ReferenceParser final : public Parser {
 public:
  [[nodiscard]] std::string id() const override { return "reference"; }
  std::optional<std::string> respond(const ExtractionRequest& request) override {
    return reference_parse(request);
  }
};

// --- replay -------------------------------------------------------------------

inline constexpr int kReplayFormatVersion = 1;

struct ReplayFixture {
  std::map<std::string, std::string> responses;  // request digest -> raw text

  static ReplayFixture from_json(const Json& j);
  static ReplayFixture load(const std::string& path);
  [[nodiscard]] Json to_json() const;
  void save(const std::string& path) const;
};

class ReplayParser final : public Parser {
 public:
  explicit ReplayParser(ReplayFixture fixture) : fixture_(std::move(fixture)) {}

  [[nodiscard]] std::string id() const override { return "replay"; }
  std::optional<std::string> respond(const ExtractionRequest& request) override;

 private:
  ReplayFixture fixture_;
};

/// Passes requests through to another parser and records every answer.
class RecordingParser final : public Parser {
 public:
  explicit RecordingParser(Parser& inner) : inner_(inner) {}

  [[nodiscard]] std::string id() const override { return inner_.id(); }
  std::optional<std::string> respond(const ExtractionRequest& request) override;

  [[nodiscard]] ReplayFixture fixture() const;

 private:
  Parser& inner_;
  mutable std::mutex mutex_;
  ReplayFixture recorded_;
};

// --- remote -------------------------------------------------------------------

struct RemoteConfig {
  std::string base_url;  // scheme://host[:port]
  std::string path = "/v1/extract";
  std::string model_id;
  int max_output_length = 256;
  std::string api_key_env = "EVSYNTH_REMOTE_API_KEY";
  int timeout_seconds = 30;
  int max_retries = 2;
  int backoff_ms = 250;

  /// Reads a JSON config document then applies EVSYNTH_REMOTE_URL and
  /// EVSYNTH_REMOTE_MODEL environment overrides.
  static RemoteConfig load(const std::string& path);
  static RemoteConfig from_json(const Json& j);
};

/// Minimal client for the text-extraction service:
///   POST {model_id, instruction, input_text, max_output_length} -> {text}
/// 429 and 5xx are retried up to max_retries times.
class RemoteTextClient {
 public:
  explicit RemoteTextClient(RemoteConfig config);

  std::optional<std::string> complete(const std::string& instruction,
                                      const std::string& input_text) const;

  [[nodiscard]] const RemoteConfig& config() const { return config_; }

 private:
  RemoteConfig config_;
};

class RemoteParser final : public Parser {
 public:
  explicit RemoteParser(RemoteConfig config) : client_(std::move(config)) {}

  [[nodiscard]] std::string id() const override { return "remote:" + client_.config().model_id; }
  std::optional<std::string> respond(const ExtractionRequest& request) override {
    return client_.complete(request.instruction, request.attended_text);
  }

 private:
  RemoteTextClient client_;
};

/// Builds a parser from a CLI/config spec: "reference", "replay:PATH" or
/// "remote:CONFIG_PATH".
std::unique_ptr<Parser> make_parser(const std::string& spec);

}  // namespace evsynth
