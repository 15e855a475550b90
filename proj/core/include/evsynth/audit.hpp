#pragma once

#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "evsynth/util.hpp"

namespace evsynth {

enum class AuditKind {
  rule_created,
  rule_edited,
  plan_validated,
  extraction,
  verdict,
  stage_summary,
  weights,
  estimate,
};

std::string_view to_string(AuditKind kind);
AuditKind audit_kind_from(std::string_view text);

struct AuditEvent {
  std::string run_id;
  std::uint64_t sequence = 0;
  AuditKind kind = AuditKind::verdict;
  Json payload;
  std::string timestamp;
};

Json to_json(const AuditEvent& event);
AuditEvent audit_event_from_json(const Json& j);

/// Append-only event list for one run. Sequence numbers start at 1 and are
/// assigned under a lock, so callers that append in a fixed order get a
/// fixed log.
class AuditLog {
 public:
  explicit AuditLog(std::string run_id, Clock clock = system_clock(), std::uint64_t next_sequence = 1);
  /// Resumes a persisted log; new events continue after the last sequence.
  AuditLog(std::string run_id, Clock clock, std::vector<AuditEvent> history);

  const AuditEvent& append(AuditKind kind, Json payload);

  [[nodiscard]] std::vector<AuditEvent> events() const;
  [[nodiscard]] const std::string& run_id() const { return run_id_; }
  [[nodiscard]] std::uint64_t next_sequence() const;

  /// One compact JSON object per line, each terminated by '\n'.
  [[nodiscard]] std::string to_jsonl() const;
  /// Lines appended since `from_sequence` (inclusive), for incremental
  /// persistence.
  [[nodiscard]] std::string to_jsonl(std::uint64_t from_sequence) const;

  /// Digest over every event with timestamps removed.
  [[nodiscard]] std::string digest() const;

 private:
  std::string run_id_;
  Clock clock_;
  mutable std::mutex mutex_;
  std::uint64_t next_;
  std::vector<AuditEvent> events_;
};

/// Parses JSON lines; blank lines are skipped. Throws InputError when
/// sequence numbers are not strictly increasing.
std::vector<AuditEvent> parse_audit_jsonl(std::string_view text);

}  // namespace evsynth
