#include "evsynth/audit.hpp"

#include <array>

#include "evsynth/error.hpp"

namespace evsynth {

namespace {

constexpr std::array<std::pair<AuditKind, const char*>, 8> kKinds{{
    {AuditKind::rule_created, "rule-created"},
    {AuditKind::rule_edited, "rule-edited"},
    {AuditKind::plan_validated, "plan-validated"},
    {AuditKind::extraction, "extraction"},
    {AuditKind::verdict, "verdict"},
    {AuditKind::stage_summary, "stage-summary"},
    {AuditKind::weights, "weights"},
    {AuditKind::estimate, "estimate"},
}};

}  // namespace

std::string_view to_string(AuditKind kind) {
  for (const auto& [k, name] : kKinds) {
    if (k == kind) return name;
  }
  return "unknown";
}

AuditKind audit_kind_from(std::string_view text) {
  for (const auto& [k, name] : kKinds) {
    if (text == name) return k;
  }
  throw InputError("unknown audit event kind \"" + std::string(text) + "\"");
}

Json to_json(const AuditEvent& event) {
  return {{"run_id", event.run_id},
          {"sequence", event.sequence},
          {"kind", to_string(event.kind)},
          {"payload", event.payload},
          {"timestamp", event.timestamp}};
}

AuditEvent audit_event_from_json(const Json& j) {
  try {
    return {j.at("run_id").get<std::string>(), j.at("sequence").get<std::uint64_t>(),
            audit_kind_from(j.at("kind").get<std::string>()), j.at("payload"),
            j.value("timestamp", "")};
  } catch (const Json::exception& e) {
    throw InputError(std::string("audit event: ") + e.what());
  }
}

AuditLog::AuditLog(std::string run_id, Clock clock, std::uint64_t next_sequence)
    : run_id_(std::move(run_id)), clock_(std::move(clock)), next_(next_sequence) {}

AuditLog::AuditLog(std::string run_id, Clock clock, std::vector<AuditEvent> history)
    : run_id_(std::move(run_id)),
      clock_(std::move(clock)),
      next_(history.empty() ? 1 : history.back().sequence + 1),
      events_(std::move(history)) {}

const AuditEvent& AuditLog::append(AuditKind kind, Json payload) {
  std::lock_guard lock(mutex_);
  events_.push_back({run_id_, next_++, kind, std::move(payload), clock_()});
  return events_.back();
}

std::vector<AuditEvent> AuditLog::events() const {
  std::lock_guard lock(mutex_);
  return events_;
}

std::uint64_t AuditLog::next_sequence() const {
  std::lock_guard lock(mutex_);
  return next_;
}

std::string AuditLog::to_jsonl() const { return to_jsonl(0); }

std::string AuditLog::to_jsonl(std::uint64_t from_sequence) const {
  std::lock_guard lock(mutex_);
  std::string out;
  for (const auto& e : events_) {
    if (e.sequence < from_sequence) continue;
    out += to_json(e).dump();
    out += '\n';
  }
  return out;
}

std::string AuditLog::digest() const {
  Json all = Json::array();
  for (const auto& e : events()) all.push_back(to_json(e));
  return stable_digest(all);
}

std::vector<AuditEvent> parse_audit_jsonl(std::string_view text) {
  std::vector<AuditEvent> out;
  for (const auto& line : split(text, '\n')) {
    if (trim(line).empty()) continue;
    out.push_back(audit_event_from_json(parse_json(line)));
    if (out.size() > 1 && out.back().sequence <= out[out.size() - 2].sequence) {
      throw InputError("audit sequence numbers must be strictly increasing");
    }
  }
  return out;
}

}  // namespace evsynth
