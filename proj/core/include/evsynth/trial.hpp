#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "evsynth/util.hpp"

namespace evsynth {

struct Intervention {
  std::string kind;  // DRUG, BIOLOGICAL, ...
  std::string name;

  friend bool operator==(const Intervention&, const Intervention&) = default;
};

struct Outcome {
  std::string measure;
  std::string description;
  std::string time_frame;

  friend bool operator==(const Outcome&, const Outcome&) = default;
};

/// One registry study.
struct TrialRecord {
  std::string nct_id;
  std::string title;
  std::string summary;
  std::string eligibility_text;
  std::vector<std::string> conditions;
  std::vector<Intervention> interventions;
  std::string study_type;
  std::string allocation;
  std::vector<std::string> phases;
  std::vector<Outcome> primary_outcomes;
  std::vector<Outcome> secondary_outcomes;
  std::string adverse_event_text;
  std::vector<std::string> publications;
  std::optional<std::int64_t> enrollment;
  std::string status;
  bool has_results = false;

  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

/// Trials in canonical order (ascending nct_id).
struct Corpus {
  std::vector<TrialRecord> trials;
  std::string source_tag;
  std::string ingested_at;

  [[nodiscard]] const TrialRecord* find(std::string_view nct_id) const;
};

struct RejectedStudy {
  std::size_t index = 0;  // position in the input array
  std::string reason;
};

struct IngestReport {
  std::size_t study_count = 0;
  std::size_t accepted = 0;
  std::vector<RejectedStudy> rejected;
};

struct IngestResult {
  Corpus corpus;
  IngestReport report;
};

/// Maps a registry v2 JSON dump (array of study objects, or a page object
/// with a "studies" array) onto TrialRecords.
/// The path table lives in registry_paths() and is documented in the README.
IngestResult ingest_registry_dump(std::string_view raw, const std::string& source_tag,
                                  const Clock& clock = system_clock());
IngestResult ingest_registry_dump(const Json& studies, const std::string& source_tag,
                                  const Clock& clock = system_clock());

/// (TrialRecord field, registry JSON pointer) pairs used by ingestion.
const std::vector<std::pair<std::string, std::string>>& registry_paths();

/// Commas and whitespace are stripped; anything non-numeric is absent.
std::optional<std::int64_t> parse_enrollment(const Json& value);

struct PrefilterConfig {
  std::vector<std::string> allowed_statuses{"COMPLETED", "ACTIVE_NOT_RECRUITING"};
};

/// Removal buckets in the order they are checked. A trial lands in the
/// first bucket it fails.
inline constexpr const char* kPrefilterBuckets[] = {
    "not-interventional", "status-not-allowed", "missing-phase", "phase-4",
    "no-results-or-publications"};

struct PrefilterReport {
  std::size_t input_count = 0;
  std::size_t retained_count = 0;
  std::vector<std::pair<std::string, std::size_t>> removed;  // kPrefilterBuckets order
  std::vector<std::pair<std::string, std::string>> decisions;  // nct_id -> bucket or "retained"
};

/// Empty string when the trial passes, otherwise the bucket name.
std::string prefilter_bucket(const TrialRecord& trial, const PrefilterConfig& config = {});

std::pair<Corpus, PrefilterReport> prefilter(const Corpus& corpus,
                                             const PrefilterConfig& config = {});

// --- serialization ------------------------------------------------------------

Json to_json(const TrialRecord& trial);
TrialRecord trial_from_json(const Json& j);
Json to_json(const Corpus& corpus);
Corpus corpus_from_json(const Json& j);
Json to_json(const IngestReport& report);
Json to_json(const PrefilterReport& report);

/// Accepts either a canonical corpus document or a raw registry dump.
Corpus load_corpus(const std::string& path, const Clock& clock = system_clock());

}  // namespace evsynth
