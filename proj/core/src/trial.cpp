#include "evsynth/trial.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "evsynth/error.hpp"

namespace evsynth {

namespace {

const Json* at_pointer(const Json& root, const std::string& pointer) {
  const Json* node = &root;
  for (const auto& token : split(std::string_view(pointer).substr(1), '/')) {
    if (!node->is_object()) return nullptr;
    auto it = node->find(token);
    if (it == node->end()) return nullptr;
    node = &*it;
  }
  return node;
}

std::string text_at(const Json& root, const std::string& pointer) {
  const Json* node = at_pointer(root, pointer);
  if (node == nullptr || !node->is_string()) return {};
  return node->get<std::string>();
}

std::vector<std::string> strings_at(const Json& root, const std::string& pointer) {
  std::vector<std::string> out;
  const Json* node = at_pointer(root, pointer);
  if (node == nullptr || !node->is_array()) return out;
  for (const auto& item : *node) {
    if (item.is_string()) out.push_back(item.get<std::string>());
  }
  return out;
}

std::vector<Outcome> outcomes_at(const Json& root, const std::string& pointer) {
  std::vector<Outcome> out;
  const Json* node = at_pointer(root, pointer);
  if (node == nullptr || !node->is_array()) return out;
  for (const auto& item : *node) {
    if (!item.is_object()) continue;
    out.push_back(Outcome{text_at(item, "/measure"), text_at(item, "/description"),
                          text_at(item, "/timeFrame")});
  }
  return out;
}

const std::vector<std::pair<std::string, std::string>> kRegistryPaths = {
    {"nct_id", "/protocolSection/identificationModule/nctId"},
    {"title", "/protocolSection/identificationModule/briefTitle"},
    {"summary", "/protocolSection/descriptionModule/briefSummary"},
    {"eligibility_text", "/protocolSection/eligibilityModule/eligibilityCriteria"},
    {"conditions", "/protocolSection/conditionsModule/conditions"},
    {"interventions", "/protocolSection/armsInterventionsModule/interventions"},
    {"study_type", "/protocolSection/designModule/studyType"},
    {"allocation", "/protocolSection/designModule/designInfo/allocation"},
    {"phases", "/protocolSection/designModule/phases"},
    {"enrollment", "/protocolSection/designModule/enrollmentInfo/count"},
    {"primary_outcomes", "/protocolSection/outcomesModule/primaryOutcomes"},
    {"secondary_outcomes", "/protocolSection/outcomesModule/secondaryOutcomes"},
    {"adverse_event_text", "/resultsSection/adverseEventsModule/description"},
    {"publications", "/protocolSection/referencesModule/references"},
    {"status", "/protocolSection/statusModule/overallStatus"},
    {"has_results", "/hasResults"},
};

std::string path_for(const std::string& field) {
  for (const auto& [name, pointer] : kRegistryPaths) {
    if (name == field) return pointer;
  }
  return {};
}

TrialRecord map_study(const Json& study) {
  TrialRecord t;
  t.nct_id = trim(text_at(study, path_for("nct_id")));
  t.title = text_at(study, path_for("title"));
  if (t.title.empty()) t.title = text_at(study, "/protocolSection/identificationModule/officialTitle");
  t.summary = text_at(study, path_for("summary"));
  t.eligibility_text = text_at(study, path_for("eligibility_text"));
  t.conditions = strings_at(study, path_for("conditions"));
  if (const Json* items = at_pointer(study, path_for("interventions"));
      items != nullptr && items->is_array()) {
    for (const auto& item : *items) {
      if (!item.is_object()) continue;
      t.interventions.push_back(Intervention{text_at(item, "/type"), text_at(item, "/name")});
    }
  }
  t.study_type = text_at(study, path_for("study_type"));
  t.allocation = text_at(study, path_for("allocation"));
  t.phases = strings_at(study, path_for("phases"));
  if (const Json* count = at_pointer(study, path_for("enrollment")); count != nullptr) {
    t.enrollment = parse_enrollment(*count);
  }
  t.primary_outcomes = outcomes_at(study, path_for("primary_outcomes"));
  t.secondary_outcomes = outcomes_at(study, path_for("secondary_outcomes"));
  t.adverse_event_text = text_at(study, path_for("adverse_event_text"));
  if (const Json* refs = at_pointer(study, path_for("publications"));
      refs != nullptr && refs->is_array()) {
    for (const auto& ref : *refs) {
      if (ref.is_string()) {
        t.publications.push_back(ref.get<std::string>());
      } else if (ref.is_object()) {
        auto citation = text_at(ref, "/citation");
        if (citation.empty()) citation = text_at(ref, "/pmid");
        if (!citation.empty()) t.publications.push_back(citation);
      }
    }
  }
  t.status = text_at(study, path_for("status"));
  if (const Json* flag = at_pointer(study, "/hasResults"); flag != nullptr && flag->is_boolean()) {
    t.has_results = flag->get<bool>();
  } else {
    t.has_results = at_pointer(study, "/resultsSection") != nullptr;
  }
  return t;
}

}  // namespace

const TrialRecord* Corpus::find(std::string_view nct_id) const {
  auto it = std::lower_bound(trials.begin(), trials.end(), nct_id,
                             [](const TrialRecord& t, std::string_view id) { return t.nct_id < id; });
  if (it != trials.end() && it->nct_id == nct_id) return &*it;
  return nullptr;
}

const std::vector<std::pair<std::string, std::string>>& registry_paths() { return kRegistryPaths; }

std::optional<std::int64_t> parse_enrollment(const Json& value) {
  if (value.is_number_integer()) {
    auto n = value.get<std::int64_t>();
    return n >= 0 ? std::optional(n) : std::nullopt;
  }
  if (value.is_number_float()) {
    double d = value.get<double>();
    if (d >= 0 && d == static_cast<double>(static_cast<std::int64_t>(d))) {
      return static_cast<std::int64_t>(d);
    }
    return std::nullopt;
  }
  if (!value.is_string()) return std::nullopt;
  std::string digits;
  for (char c : value.get<std::string>()) {
    if (c == ',' || std::isspace(static_cast<unsigned char>(c))) continue;
    if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
    digits.push_back(c);
  }
  if (digits.empty() || digits.size() > 18) return std::nullopt;
  return std::stoll(digits);
}

IngestResult ingest_registry_dump(std::string_view raw, const std::string& source_tag,
                                  const Clock& clock) {
  return ingest_registry_dump(parse_json(raw), source_tag, clock);
}

IngestResult ingest_registry_dump(const Json& document, const std::string& source_tag,
                                  const Clock& clock) {
  // Paged API responses wrap the array as {"studies": [...], "nextPageToken": ...}.
  const Json& studies =
      document.is_object() && document.contains("studies") ? document["studies"] : document;
  if (!studies.is_array()) throw InputError("registry dump must be a JSON array of studies");
  IngestResult result;
  result.report.study_count = studies.size();
  std::set<std::string> seen;
  for (std::size_t i = 0; i < studies.size(); ++i) {
    const Json& study = studies[i];
    if (!study.is_object()) {
      result.report.rejected.push_back({i, "study is not a JSON object"});
      continue;
    }
    TrialRecord trial = map_study(study);
    if (trial.nct_id.empty()) {
      result.report.rejected.push_back({i, "missing nct_id"});
      continue;
    }
    if (!seen.insert(trial.nct_id).second) {
      result.report.rejected.push_back({i, "duplicate nct_id " + trial.nct_id});
      continue;
    }
    result.corpus.trials.push_back(std::move(trial));
  }
  std::sort(result.corpus.trials.begin(), result.corpus.trials.end(),
            [](const TrialRecord& a, const TrialRecord& b) { return a.nct_id < b.nct_id; });
  result.report.accepted = result.corpus.trials.size();
  result.corpus.source_tag = source_tag;
  result.corpus.ingested_at = clock();
  return result;
}

std::string prefilter_bucket(const TrialRecord& trial, const PrefilterConfig& config) {
  if (!iequals(trial.study_type, "INTERVENTIONAL")) return kPrefilterBuckets[0];
  bool status_ok = std::any_of(config.allowed_statuses.begin(), config.allowed_statuses.end(),
                               [&](const std::string& s) { return iequals(s, trial.status); });
  if (!status_ok) return kPrefilterBuckets[1];
  // "NA" is how the registry marks trials without a phase (devices, behavioural).
  bool has_phase = std::any_of(trial.phases.begin(), trial.phases.end(), [](const std::string& p) {
    return !trim(p).empty() && !iequals(trim(p), "NA");
  });
  if (!has_phase) return kPrefilterBuckets[2];
  bool phase4 = std::any_of(trial.phases.begin(), trial.phases.end(),
                            [](const std::string& p) { return iequals(trim(p), "PHASE4"); });
  if (phase4) return kPrefilterBuckets[3];
  if (!trial.has_results && trial.publications.empty()) return kPrefilterBuckets[4];
  return {};
}

std::pair<Corpus, PrefilterReport> prefilter(const Corpus& corpus, const PrefilterConfig& config) {
  Corpus kept;
  kept.source_tag = corpus.source_tag;
  kept.ingested_at = corpus.ingested_at;
  PrefilterReport report;
  report.input_count = corpus.trials.size();
  for (const char* bucket : kPrefilterBuckets) report.removed.emplace_back(bucket, 0);
  for (const auto& trial : corpus.trials) {
    auto bucket = prefilter_bucket(trial, config);
    if (bucket.empty()) {
      kept.trials.push_back(trial);
      report.decisions.emplace_back(trial.nct_id, "retained");
      continue;
    }
    for (auto& [name, count] : report.removed) {
      if (name == bucket) ++count;
    }
    report.decisions.emplace_back(trial.nct_id, bucket);
  }
  report.retained_count = kept.trials.size();
  return {std::move(kept), std::move(report)};
}

// --- serialization ------------------------------------------------------------

namespace {

Json outcomes_json(const std::vector<Outcome>& outcomes) {
  Json out = Json::array();
  for (const auto& o : outcomes) {
    out.push_back({{"measure", o.measure}, {"description", o.description}, {"time_frame", o.time_frame}});
  }
  return out;
}

std::vector<Outcome> outcomes_from(const Json& j) {
  std::vector<Outcome> out;
  for (const auto& o : j) {
    out.push_back(Outcome{o.value("measure", ""), o.value("description", ""),
                          o.value("time_frame", "")});
  }
  return out;
}

}  // namespace

Json to_json(const TrialRecord& t) {
  Json interventions = Json::array();
  for (const auto& i : t.interventions) interventions.push_back({{"kind", i.kind}, {"name", i.name}});
  return {
      {"nct_id", t.nct_id},
      {"title", t.title},
      {"summary", t.summary},
      {"eligibility_text", t.eligibility_text},
      {"conditions", t.conditions},
      {"interventions", interventions},
      {"study_type", t.study_type},
      {"allocation", t.allocation},
      {"phases", t.phases},
      {"primary_outcomes", outcomes_json(t.primary_outcomes)},
      {"secondary_outcomes", outcomes_json(t.secondary_outcomes)},
      {"adverse_event_text", t.adverse_event_text},
      {"publications", t.publications},
      {"enrollment", t.enrollment ? Json(*t.enrollment) : Json(nullptr)},
      {"status", t.status},
      {"has_results", t.has_results},
  };
}

TrialRecord trial_from_json(const Json& j) {
  if (!j.is_object()) throw InputError("trial record must be a JSON object");
  TrialRecord t;
  t.nct_id = j.value("nct_id", "");
  if (t.nct_id.empty()) throw InputError("trial record without nct_id");
  t.title = j.value("title", "");
  t.summary = j.value("summary", "");
  t.eligibility_text = j.value("eligibility_text", "");
  t.conditions = j.value("conditions", std::vector<std::string>{});
  for (const auto& i : j.value("interventions", Json::array())) {
    t.interventions.push_back(Intervention{i.value("kind", ""), i.value("name", "")});
  }
  t.study_type = j.value("study_type", "");
  t.allocation = j.value("allocation", "");
  t.phases = j.value("phases", std::vector<std::string>{});
  t.primary_outcomes = outcomes_from(j.value("primary_outcomes", Json::array()));
  t.secondary_outcomes = outcomes_from(j.value("secondary_outcomes", Json::array()));
  t.adverse_event_text = j.value("adverse_event_text", "");
  t.publications = j.value("publications", std::vector<std::string>{});
  if (j.contains("enrollment") && !j["enrollment"].is_null()) {
    t.enrollment = parse_enrollment(j["enrollment"]);
  }
  t.status = j.value("status", "");
  t.has_results = j.value("has_results", false);
  return t;
}

Json to_json(const Corpus& corpus) {
  Json trials = Json::array();
  for (const auto& t : corpus.trials) trials.push_back(to_json(t));
  return {{"source_tag", corpus.source_tag}, {"ingested_at", corpus.ingested_at}, {"trials", trials}};
}

Corpus corpus_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("trials") || !j["trials"].is_array()) {
    throw InputError("corpus document needs a \"trials\" array");
  }
  Corpus corpus;
  corpus.source_tag = j.value("source_tag", "");
  corpus.ingested_at = j.value("ingested_at", "");
  std::set<std::string> seen;
  for (const auto& item : j["trials"]) {
    auto trial = trial_from_json(item);
    if (!seen.insert(trial.nct_id).second) throw InputError("duplicate nct_id " + trial.nct_id);
    corpus.trials.push_back(std::move(trial));
  }
  std::sort(corpus.trials.begin(), corpus.trials.end(),
            [](const TrialRecord& a, const TrialRecord& b) { return a.nct_id < b.nct_id; });
  return corpus;
}

Json to_json(const IngestReport& report) {
  Json rejected = Json::array();
  for (const auto& r : report.rejected) rejected.push_back({{"index", r.index}, {"reason", r.reason}});
  return {{"study_count", report.study_count}, {"accepted", report.accepted}, {"rejected", rejected}};
}

Json to_json(const PrefilterReport& report) {
  Json removed = Json::array();
  for (const auto& [bucket, count] : report.removed) {
    removed.push_back({{"bucket", bucket}, {"count", count}});
  }
  Json decisions = Json::array();
  for (const auto& [id, outcome] : report.decisions) {
    decisions.push_back({{"nct_id", id}, {"outcome", outcome}});
  }
  return {{"input_count", report.input_count},
          {"retained_count", report.retained_count},
          {"removed", removed},
          {"decisions", decisions}};
}

Corpus load_corpus(const std::string& path, const Clock& clock) {
  Json doc = parse_json(read_file(path));
  if (doc.is_array() || doc.contains("studies")) return ingest_registry_dump(doc, path, clock).corpus;
  return corpus_from_json(doc);
}

}  // namespace evsynth
