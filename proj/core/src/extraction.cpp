#include "evsynth/extraction.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "evsynth/error.hpp"

namespace evsynth {

namespace {

constexpr char kUnitSeparator = '\x1f';

std::string strip_quotes(std::string text) {
  text = trim(text);
  while (text.size() >= 2) {
    char f = text.front();
    char b = text.back();
    bool paired = (f == '"' && b == '"') || (f == '\'' && b == '\'') || (f == '`' && b == '`') ||
                  (f == '`' && b == '\'');
    if (!paired) break;
    text = trim(text.substr(1, text.size() - 2));
  }
  return text;
}

std::string strip_terminal_period(std::string text) {
  if (!text.empty() && text.back() == '.') text.pop_back();
  return trim(text);
}

std::optional<std::vector<std::string>> parse_name_list(const std::string& raw) {
  std::vector<std::string> items;
  if (raw.size() >= 2 && raw.front() == '[' && raw.back() == ']') {
    try {
      Json list = Json::parse(raw);
      for (const auto& item : list) {
        if (!item.is_string()) return std::nullopt;
        items.push_back(item.get<std::string>());
      }
    } catch (const Json::exception&) {
      // Python-style list with single quotes.
      for (auto& part : split(std::string_view(raw).substr(1, raw.size() - 2), ',')) {
        items.push_back(part);
      }
    }
  } else if (iequals(strip_terminal_period(raw), "none")) {
    return std::vector<std::string>{};
  } else {
    for (auto& part : split(raw, ',')) items.push_back(part);
  }

  std::vector<std::string> names;
  std::set<std::string> seen;
  for (auto& item : items) {
    std::string name = strip_quotes(item);
    if (name.empty()) continue;
    if (!seen.insert(normalize_name(name)).second) continue;
    names.push_back(std::move(name));
  }
  return names;
}

}  // namespace

std::string_view to_string(ExpectedKind kind) {
  switch (kind) {
    case ExpectedKind::boolean_yes_no: return "boolean_yes_no";
    case ExpectedKind::number: return "number";
    case ExpectedKind::phrase_or_none: return "phrase_or_none";
    case ExpectedKind::name_list: return "name_list";
  }
  return "phrase_or_none";
}

ExpectedKind expected_kind_from(std::string_view text) {
  for (auto kind : {ExpectedKind::boolean_yes_no, ExpectedKind::number,
                    ExpectedKind::phrase_or_none, ExpectedKind::name_list}) {
    if (to_string(kind) == text) return kind;
  }
  throw InputError("unknown expected kind: " + std::string(text));
}

std::string_view to_string(FailureReason reason) {
  switch (reason) {
    case FailureReason::schema_violation: return "schema-violation";
    case FailureReason::parser_unavailable: return "parser-unavailable";
    case FailureReason::empty_input: return "empty-input";
  }
  return "schema-violation";
}

std::string request_digest(const ExtractionRequest& request) {
  std::string framed = "evsynth-extract-v" + std::to_string(kParserContractVersion);
  for (std::string_view part :
       {std::string_view(request.instruction), std::string_view(request.attended_text),
        to_string(request.expected_kind)}) {
    framed.push_back(kUnitSeparator);
    framed.append(part);
  }
  return sha256_hex(framed);
}

std::optional<ExtractedPayload> validate_raw(ExpectedKind kind, std::string_view raw) {
  std::string text = strip_quotes(std::string(raw));
  switch (kind) {
    case ExpectedKind::boolean_yes_no: {
      text = strip_terminal_period(text);
      if (iequals(text, "yes")) return ExtractedPayload{true};
      if (iequals(text, "no")) return ExtractedPayload{false};
      return std::nullopt;
    }
    case ExpectedKind::number: {
      auto value = parse_decimal(text);
      if (!value) return std::nullopt;
      return ExtractedPayload{*value};
    }
    case ExpectedKind::phrase_or_none: {
      if (text.empty()) return std::nullopt;
      if (iequals(strip_terminal_period(text), "none")) return ExtractedPayload{Phrase{}};
      return ExtractedPayload{Phrase{text}};
    }
    case ExpectedKind::name_list: {
      if (text.empty()) return std::nullopt;
      auto names = parse_name_list(text);
      if (!names) return std::nullopt;
      return ExtractedPayload{std::move(*names)};
    }
  }
  return std::nullopt;
}

std::string render_payload(const ExtractedPayload& payload) {
  struct Renderer {
    std::string operator()(bool b) const { return b ? "Yes" : "No"; }
    std::string operator()(double d) const { return Json(d).dump(); }
    std::string operator()(const Phrase& p) const { return p ? *p : "None"; }
    std::string operator()(const std::vector<std::string>& names) const {
      return Json(names).dump();
    }
  };
  return std::visit(Renderer{}, payload);
}

ExtractionResult extract(const ExtractionRequest& request, Parser& parser) {
  Provenance provenance{parser.id(), request_digest(request), 0, false};
  if (trim(request.attended_text).empty()) {
    return ExtractionFailure{FailureReason::empty_input, "no attended text", provenance};
  }

  std::string last_raw;
  for (int attempt = 1; attempt <= 2; ++attempt) {
    provenance.attempts = attempt;
    auto raw = parser.respond(request);
    if (!raw) {
      return ExtractionFailure{FailureReason::parser_unavailable,
                               "parser " + parser.id() + " returned no response", provenance};
    }
    if (auto payload = validate_raw(request.expected_kind, *raw)) {
      return ExtractedValue{request.expected_kind, std::move(*payload), provenance};
    }
    last_raw = *raw;
  }

  provenance.fallback = true;
  if (auto payload = validate_raw(request.expected_kind, reference_parse(request))) {
    provenance.parser_id = parser.id() + "+reference-fallback";
    return ExtractedValue{request.expected_kind, std::move(*payload), provenance};
  }
  return ExtractionFailure{FailureReason::schema_violation,
                           "response does not match " + std::string(to_string(request.expected_kind)) +
                               ": " + last_raw.substr(0, 120),
                           provenance};
}

namespace {

Json provenance_json(const Provenance& p) {
  return {{"parser_id", p.parser_id},
          {"request_digest", p.request_digest},
          {"attempts", p.attempts},
          {"fallback", p.fallback}};
}

Json payload_json(const ExtractedPayload& payload) {
  struct Converter {
    Json operator()(bool b) const { return b; }
    Json operator()(double d) const { return d; }
    Json operator()(const Phrase& p) const { return p ? Json(*p) : Json(nullptr); }
    Json operator()(const std::vector<std::string>& names) const { return names; }
  };
  return std::visit(Converter{}, payload);
}

}  // namespace

Json to_json(const ExtractedValue& value) {
  return {{"kind", to_string(value.kind)},
          {"value", payload_json(value.value)},
          {"provenance", provenance_json(value.provenance)}};
}

Json to_json(const ExtractionFailure& failure) {
  return {{"failure", to_string(failure.reason)},
          {"detail", failure.detail},
          {"provenance", provenance_json(failure.provenance)}};
}

Json to_json(const ExtractionResult& result) {
  return result.ok() ? to_json(result.value()) : to_json(result.failure());
}

// --- replay -------------------------------------------------------------------

ReplayFixture ReplayFixture::from_json(const Json& j) {
  if (!j.is_object() || !j.contains("responses") || !j["responses"].is_object()) {
    throw InputError("replay fixture needs a \"responses\" object");
  }
  int version = j.value("format_version", 0);
  if (version != kReplayFormatVersion) {
    throw InputError("unsupported replay fixture version " + std::to_string(version));
  }
  ReplayFixture fixture;
  for (const auto& [digest, text] : j["responses"].items()) {
    if (!text.is_string()) throw InputError("replay response for " + digest + " is not a string");
    fixture.responses.emplace(digest, text.get<std::string>());
  }
  return fixture;
}

ReplayFixture ReplayFixture::load(const std::string& path) {
  return from_json(parse_json(read_file(path)));
}

Json ReplayFixture::to_json() const {
  return {{"format_version", kReplayFormatVersion}, {"responses", responses}};
}

void ReplayFixture::save(const std::string& path) const { write_file(path, to_json().dump(2) + "\n"); }

std::optional<std::string> ReplayParser::respond(const ExtractionRequest& request) {
  auto it = fixture_.responses.find(request_digest(request));
  if (it == fixture_.responses.end()) return std::nullopt;
  return it->second;
}

std::optional<std::string> RecordingParser::respond(const ExtractionRequest& request) {
  auto raw = inner_.respond(request);
  if (raw) {
    std::lock_guard lock(mutex_);
    recorded_.responses[request_digest(request)] = *raw;
  }
  return raw;
}

ReplayFixture RecordingParser::fixture() const {
  std::lock_guard lock(mutex_);
  return recorded_;
}

std::unique_ptr<Parser> make_parser(const std::string& spec) {
  if (spec.empty() || spec == "reference") return std::make_unique<ReferenceParser>();
  if (spec.rfind("replay:", 0) == 0) {
    return std::make_unique<ReplayParser>(ReplayFixture::load(spec.substr(7)));
  }
  if (spec.rfind("remote:", 0) == 0) {
    return std::make_unique<RemoteParser>(RemoteConfig::load(spec.substr(7)));
  }
  throw ConfigError("unknown parser spec '" + spec + "' (expected reference, replay:PATH or remote:CONFIG)");
}

}  // namespace evsynth
