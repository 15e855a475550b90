#include "evsynth/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <regex>
#include <set>
#include <thread>

#include "evsynth/error.hpp"

namespace evsynth {

// --- rule sets ----------------------------------------------------------------

std::string_view to_string(RuleKind kind) { return kind == RuleKind::exclude ? "exclude" : "include"; }

std::string_view to_string(RuleSetStatus status) {
  return status == RuleSetStatus::approved ? "approved" : "draft";
}

namespace {

RuleKind infer_kind(std::string_view text) {
  const std::string lowered = to_lower(trim(text));
  return lowered.rfind("exclude", 0) == 0 ? RuleKind::exclude : RuleKind::include;
}

Json rules_json(const std::vector<Rule>& rules) {
  Json out = Json::array();
  for (const auto& r : rules) out.push_back(to_json(r));
  return out;
}

}  // namespace

Json to_json(const Rule& rule) {
  return {{"rule_id", rule.rule_id}, {"text", rule.text}, {"kind", to_string(rule.kind)}};
}

Json to_json(const RuleSet& set) {
  return {{"rules", rules_json(set.rules)},
          {"status", to_string(set.status)},
          {"revision", set.revision}};
}

RuleSet rule_set_from_json(const Json& j) {
  const Json* list = &j;
  RuleSet set;
  std::vector<SchemaViolation> violations;
  if (j.is_object()) {
    if (!j.contains("rules")) throw SchemaError(std::vector<SchemaViolation>{{"/rules", "required"}});
    list = &j["rules"];
    if (j.contains("status")) {
      const auto& s = j["status"];
      if (s == "approved") {
        set.status = RuleSetStatus::approved;
      } else if (s != "draft") {
        violations.push_back({"/status", "must be draft or approved"});
      }
    }
    if (j.contains("revision")) {
      if (!j["revision"].is_number_integer() || j["revision"].get<int>() < 1) {
        violations.push_back({"/revision", "must be a positive integer"});
      } else {
        set.revision = j["revision"].get<int>();
      }
    }
  }
  const std::string base = j.is_object() ? "/rules" : "";
  if (!list->is_array()) throw SchemaError(std::vector<SchemaViolation>{{base, "must be an array"}});
  std::set<std::string> ids;
  for (std::size_t i = 0; i < list->size(); ++i) {
    const Json& r = (*list)[i];
    const std::string at = pointer_append(base, i);
    Rule rule;
    if (r.is_string()) {
      rule.text = r.get<std::string>();
    } else if (r.is_object() && r.contains("text") && r["text"].is_string()) {
      rule.text = r["text"].get<std::string>();
      if (r.contains("rule_id")) {
        if (r["rule_id"].is_string() && !trim(r["rule_id"].get<std::string>()).empty()) {
          rule.rule_id = trim(r["rule_id"].get<std::string>());
        } else {
          violations.push_back({pointer_append(at, "rule_id"), "must be a non-empty string"});
        }
      }
      if (r.contains("kind")) {
        if (r["kind"] == "include") {
          rule.kind = RuleKind::include;
        } else if (r["kind"] == "exclude") {
          rule.kind = RuleKind::exclude;
        } else {
          violations.push_back({pointer_append(at, "kind"), "must be include or exclude"});
        }
      } else {
        rule.kind = infer_kind(rule.text);
      }
    } else {
      violations.push_back({at, "rule must be a string or an object with a text member"});
      continue;
    }
    if (r.is_string()) rule.kind = infer_kind(rule.text);
    rule.text = trim(rule.text);
    if (rule.text.empty()) violations.push_back({at, "rule text is empty"});
    if (rule.rule_id.empty()) rule.rule_id = "r" + std::to_string(i + 1);
    if (!ids.insert(rule.rule_id).second) {
      violations.push_back({pointer_append(at, "rule_id"), "duplicate rule_id " + rule.rule_id});
    }
    set.rules.push_back(std::move(rule));
  }
  if (!violations.empty()) throw SchemaError(std::move(violations));
  return set;
}

void edit_rules(RuleSet& set, std::vector<Rule> rules, AuditLog* audit) {
  if (set.status == RuleSetStatus::approved) {
    throw StateError("approved rule sets cannot be edited");
  }
  set.rules = std::move(rules);
  ++set.revision;
  if (audit) {
    audit->append(AuditKind::rule_edited,
                  {{"action", "edit"}, {"revision", set.revision}, {"rules", rules_json(set.rules)}});
  }
}

void approve_rules(RuleSet& set, AuditLog* audit) {
  if (set.status == RuleSetStatus::approved) throw StateError("rule set is already approved");
  if (set.rules.empty()) throw StateError("cannot approve an empty rule set");
  set.status = RuleSetStatus::approved;
  if (audit) {
    audit->append(AuditKind::rule_edited, {{"action", "approve"}, {"revision", set.revision}});
  }
}

// --- flow ---------------------------------------------------------------------

Json to_json(const PrismaFlow& flow) {
  Json stages = Json::array();
  for (const auto& s : flow.stages) {
    stages.push_back({{"label", s.label}, {"remaining", s.remaining}, {"excluded", s.excluded}});
  }
  return {{"initial_count", flow.initial_count}, {"stages", stages}, {"final_count", flow.final_count}};
}

PrismaFlow prisma_flow_from_json(const Json& j) {
  PrismaFlow flow;
  try {
    flow.initial_count = j.at("initial_count").get<std::size_t>();
    for (const auto& s : j.at("stages")) {
      flow.stages.push_back({s.at("label").get<std::string>(), s.at("remaining").get<std::size_t>(),
                             s.at("excluded").get<std::size_t>()});
    }
    flow.final_count = j.at("final_count").get<std::size_t>();
  } catch (const Json::exception& e) {
    throw InputError(std::string("prisma flow: ") + e.what());
  }
  return flow;
}

std::string render_prisma_table(const PrismaFlow& flow) {
  std::size_t width = 12;
  for (const auto& s : flow.stages) width = std::max(width, s.label.size());
  auto row = [&](const std::string& label, const std::string& remaining, const std::string& excluded) {
    char buffer[512];
    std::snprintf(buffer, sizeof buffer, "%-*s  %10s  %10s\n", static_cast<int>(width), label.c_str(),
                  remaining.c_str(), excluded.c_str());
    return std::string(buffer);
  };
  std::string out = row("stage", "remaining", "excluded");
  out += std::string(width + 24, '-') + "\n";
  out += row("initial", std::to_string(flow.initial_count), "");
  for (const auto& s : flow.stages) {
    out += row(s.label, std::to_string(s.remaining), std::to_string(s.excluded));
  }
  out += row("final", std::to_string(flow.final_count), "");
  return out;
}

// --- pipeline -------------------------------------------------------------------

namespace {

void check_configuration(const std::vector<FunctionPlan>& plans, const MembershipLibrary& lists,
                         const PipelineOptions& options) {
  if (options.rule_set && options.rule_set->status != RuleSetStatus::approved) {
    throw StateError("rule set must be approved before execution");
  }
  if (options.threads == 0) throw ConfigError("threads must be at least 1");
  std::set<std::string> names;
  for (const auto& plan : plans) {
    if (!names.insert(plan.filter_name).second) {
      throw ConfigError("duplicate filter_name " + plan.filter_name);
    }
    for (const auto& c : plan.conditions) {
      if (c.comparison == Comparison::in_list && !lists.find(c.membership_list_name)) {
        throw ConfigError("plan " + plan.filter_name + " needs membership list " +
                          c.membership_list_name + ", which is not loaded");
      }
    }
  }
}

std::vector<RuleVerdict> evaluate_stage(const FunctionPlan& plan, const std::vector<const TrialRecord*>& trials,
                                        Parser& parser, const MembershipLibrary& lists,
                                        const PipelineOptions& options) {
  std::vector<std::optional<RuleVerdict>> slots(trials.size());
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(options.threads, std::max<std::size_t>(trials.size(), 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < trials.size(); ++i) {
      slots[i] = evaluate_plan(plan, *trials[i], parser, lists, options.policy);
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < trials.size(); i = next++) {
          try {
            slots[i] = evaluate_plan(plan, *trials[i], parser, lists, options.policy);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }
  std::vector<RuleVerdict> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace

PipelineResult run_pipeline(const Corpus& corpus, const std::vector<FunctionPlan>& plans,
                            Parser& parser, const MembershipLibrary& lists, AuditLog& audit,
                            const PipelineOptions& options) {
  check_configuration(plans, lists, options);

  PipelineResult result;
  const std::size_t stage_count = plans.size() + 1;
  for (std::size_t i = 0; i < plans.size(); ++i) {
    audit.append(AuditKind::plan_validated,
                 {{"stage", i + 1}, {"filter_name", plans[i].filter_name}, {"plan", to_json(plans[i])}});
  }

  // Canonical order regardless of how the corpus was assembled.
  Corpus ordered = corpus;
  std::stable_sort(ordered.trials.begin(), ordered.trials.end(),
                   [](const TrialRecord& a, const TrialRecord& b) { return a.nct_id < b.nct_id; });

  auto [survivors, report] = prefilter(ordered, options.prefilter);
  result.prefilter_report = report;
  result.flow.initial_count = ordered.trials.size();
  for (const auto& [nct_id, bucket] : report.decisions) {
    Json payload{{"stage", 0},
                 {"stage_count", stage_count},
                 {"filter_name", "prefilter"},
                 {"nct_id", nct_id},
                 {"keep", bucket == "retained"}};
    if (bucket != "retained") payload["bucket"] = bucket;
    audit.append(AuditKind::verdict, std::move(payload));
  }
  auto summarize = [&](std::size_t stage, const std::string& label, std::size_t before, std::size_t after) {
    result.flow.stages.push_back({label, after, before - after});
    audit.append(AuditKind::stage_summary,
                 {{"stage", stage}, {"label", label}, {"remaining", after}, {"excluded", before - after}});
  };
  summarize(0, "prefilter", ordered.trials.size(), survivors.trials.size());

  std::vector<const TrialRecord*> current;
  for (const auto& t : survivors.trials) current.push_back(&t);

  for (std::size_t p = 0; p < plans.size(); ++p) {
    const auto& plan = plans[p];
    auto verdicts = evaluate_stage(plan, current, parser, lists, options);
    std::vector<const TrialRecord*> kept;
    for (std::size_t i = 0; i < verdicts.size(); ++i) {
      const auto& v = verdicts[i];
      for (const auto& entry : v.trace) {
        audit.append(AuditKind::extraction, {{"stage", p + 1},
                                             {"filter_name", plan.filter_name},
                                             {"nct_id", v.nct_id},
                                             {"condition_index", entry.index},
                                             {"outcome", to_string(entry.outcome)},
                                             {"result", to_json(entry.extraction)}});
      }
      Json payload{{"stage", p + 1},
                   {"stage_count", stage_count},
                   {"filter_name", plan.filter_name},
                   {"nct_id", v.nct_id},
                   {"keep", v.keep}};
      if (!v.flag.empty()) payload["flag"] = v.flag;
      audit.append(AuditKind::verdict, std::move(payload));
      if (v.keep) kept.push_back(current[i]);
    }
    summarize(p + 1, plan.filter_name, current.size(), kept.size());
    result.verdicts.push_back(std::move(verdicts));
    current = std::move(kept);
  }

  result.selected.source_tag = corpus.source_tag;
  result.selected.ingested_at = corpus.ingested_at;
  for (const auto* t : current) result.selected.trials.push_back(*t);
  result.flow.final_count = result.selected.trials.size();
  return result;
}

std::vector<std::string> replay_selection(const std::vector<AuditEvent>& events) {
  std::map<std::string, std::size_t> kept_stages;
  std::optional<std::size_t> stage_count;
  std::set<std::pair<std::string, std::size_t>> seen;
  for (const auto& e : events) {
    if (e.kind != AuditKind::verdict) continue;
    const auto& p = e.payload;
    const auto id = p.at("nct_id").get<std::string>();
    const auto stage = p.at("stage").get<std::size_t>();
    const auto count = p.at("stage_count").get<std::size_t>();
    if (stage_count && *stage_count != count) throw InputError("verdict events disagree on stage_count");
    stage_count = count;
    if (!seen.insert({id, stage}).second) {
      throw InputError("two verdicts for " + id + " at stage " + std::to_string(stage));
    }
    if (p.at("keep").get<bool>()) ++kept_stages[id];
  }
  std::vector<std::string> out;
  for (const auto& [id, n] : kept_stages) {
    if (n == stage_count) out.push_back(id);
  }
  return out;
}

// --- summaries ----------------------------------------------------------------

namespace {

std::string phrase_or_empty(const std::string& instruction, const std::string& text, Parser& parser) {
  if (trim(text).empty()) return "";
  auto result = extract({instruction, text, ExpectedKind::phrase_or_none}, parser);
  if (!result.ok() || !result.value().as_phrase()) return "";
  return *result.value().as_phrase();
}

}  // namespace

std::vector<TrialSummary> summarize_selected(const Corpus& selected, Parser& parser) {
  std::vector<TrialSummary> out;
  for (const auto& t : selected.trials) {
    TrialSummary s;
    s.nct_id = t.nct_id;
    std::vector<std::string> names;
    for (const auto& i : t.interventions) names.push_back(i.name);
    s.interventions = join(names, " vs ");
    s.condition = join(t.conditions, ", ");
    s.phase = join(t.phases, ", ");
    s.enrollment = t.enrollment;
    s.status = t.status;
    s.biomarker = phrase_or_empty(
        kBiomarkerInstruction, attended_text(t, {"Title", "Summary", "Eligibility", "Conditions"}), parser);
    const std::string outcomes = attended_text(t, {"Primary Outcome", "Secondary Outcome"});
    s.pfs = phrase_or_empty(kPfsInstruction, outcomes, parser);
    s.os = phrase_or_empty(kOsInstruction, outcomes, parser);
    out.push_back(std::move(s));
  }
  return out;
}

const std::vector<std::string>& summary_columns() {
  static const std::vector<std::string> columns{
      "NCT Number", "Intervention(s)", "Biomarker",     "Condition",    "Study Phase",
      "Enrollment Size", "Status",     "Endpoints: PFS", "Endpoints: OS"};
  return columns;
}

Json to_json(const TrialSummary& s) {
  return {{"nct_id", s.nct_id},
          {"interventions", s.interventions},
          {"biomarker", s.biomarker},
          {"condition", s.condition},
          {"phase", s.phase},
          {"enrollment", s.enrollment ? Json(*s.enrollment) : Json(nullptr)},
          {"status", s.status},
          {"pfs", s.pfs},
          {"os", s.os}};
}

Json to_json(const std::vector<TrialSummary>& summaries) {
  Json out = Json::array();
  for (const auto& s : summaries) out.push_back(to_json(s));
  return out;
}

std::string summaries_csv(const std::vector<TrialSummary>& summaries) {
  auto quote = [](const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string q = "\"";
    for (char c : field) {
      if (c == '"') q += '"';
      q += c;
    }
    return q + "\"";
  };
  std::vector<std::string> header;
  for (const auto& c : summary_columns()) header.push_back(quote(c));
  std::string out = join(header, ",") + "\n";
  for (const auto& s : summaries) {
    std::vector<std::string> row{s.nct_id, s.interventions, s.biomarker,
                                 s.condition, s.phase, s.enrollment ? std::to_string(*s.enrollment) : "",
                                 s.status, s.pfs, s.os};
    for (auto& f : row) f = quote(f);
    out += join(row, ",") + "\n";
  }
  return out;
}

// --- generation ---------------------------------------------------------------

std::string_view to_string(GenerationTask task) { return task == GenerationTask::plan ? "plan" : "rules"; }

std::string generation_digest(GenerationTask task, const std::string& input) {
  std::string framed = "evsynth-generate-v1";
  framed.push_back('\x1f');
  framed.append(to_string(task));
  framed.push_back('\x1f');
  framed.append(input);
  return sha256_hex(framed);
}

std::optional<std::string> ReplayGenerator::generate(GenerationTask task, const std::string& input) {
  auto it = fixture_.responses.find(generation_digest(task, input));
  if (it == fixture_.responses.end()) return std::nullopt;
  return it->second;
}

RemoteGenerator::RemoteGenerator(RemoteConfig config, std::string prompts_dir)
    : client_(std::move(config)), prompts_dir_(std::move(prompts_dir)) {}

std::optional<std::string> RemoteGenerator::generate(GenerationTask task, const std::string& input) {
  const std::string file = task == GenerationTask::plan ? "/plan_generation.txt" : "/rule_generation.txt";
  return client_.complete(read_file(prompts_dir_ + file), input);
}

std::unique_ptr<GenerationAdapter> make_generator(const std::string& spec) {
  if (spec.rfind("replay:", 0) == 0) {
    return std::make_unique<ReplayGenerator>(ReplayFixture::load(spec.substr(7)));
  }
  if (spec.rfind("remote:", 0) == 0) {
    std::string rest = spec.substr(7);
    std::string prompts;
    if (auto comma = rest.find(','); comma != std::string::npos) {
      prompts = rest.substr(comma + 1);
      rest = rest.substr(0, comma);
    } else if (const char* env = std::getenv("EVSYNTH_PROMPTS_DIR")) {
      prompts = env;
    } else {
      prompts = "data/prompts";
    }
    return std::make_unique<RemoteGenerator>(RemoteConfig::load(rest), prompts);
  }
  throw ConfigError("generator must be replay:PATH or remote:CONFIG[,PROMPTS_DIR], got \"" + spec + "\"");
}

namespace {

std::string strip_fences(const std::string& raw) {
  std::string text = trim(raw);
  if (text.rfind("```", 0) == 0) {
    auto first_newline = text.find('\n');
    auto last_fence = text.rfind("```");
    if (first_newline != std::string::npos && last_fence > first_newline) {
      text = trim(text.substr(first_newline + 1, last_fence - first_newline - 1));
    }
  }
  return text;
}

}  // namespace

RuleSet generate_rules(const std::string& query, GenerationAdapter& generator, AuditLog* audit) {
  if (trim(query).empty()) throw InputError("rule generation needs a non-empty query");
  auto raw = generator.generate(GenerationTask::rules, query);
  if (!raw) throw ConfigError("generator " + generator.id() + " returned no rules");

  RuleSet set;
  const std::string text = strip_fences(*raw);
  if (!text.empty() && (text.front() == '{' || text.front() == '[')) {
    set = rule_set_from_json(parse_json(text));
    set.status = RuleSetStatus::draft;
    set.revision = 1;
  } else {
    static const std::regex marker(R"(^\s*(\(?[ivxlcdm]+\)|\(?\d+[.)]|-|\*|•)\s*)",
                                   std::regex::icase);
    std::size_t n = 0;
    for (const auto& line : split(text, '\n')) {
      std::string body = trim(std::regex_replace(line, marker, "", std::regex_constants::format_first_only));
      const std::string lowered = to_lower(body);
      if (lowered.rfind("include", 0) != 0 && lowered.rfind("exclude", 0) != 0) continue;
      set.rules.push_back({"r" + std::to_string(++n), body, infer_kind(body)});
    }
  }
  if (set.rules.empty()) throw InputError("generator response contained no rules");
  if (audit) {
    for (const auto& r : set.rules) {
      audit->append(AuditKind::rule_created, {{"revision", set.revision}, {"rule", to_json(r)}});
    }
  }
  return set;
}

Json generate_plan(const std::string& rule_text, GenerationAdapter& generator) {
  if (trim(rule_text).empty()) throw InputError("plan generation needs a rule");
  auto raw = generator.generate(GenerationTask::plan, rule_text);
  if (!raw) throw ConfigError("generator " + generator.id() + " returned no plan");
  std::string text = strip_fences(*raw);
  auto open = text.find('{');
  auto close = text.rfind('}');
  if (open == std::string::npos || close == std::string::npos || close < open) {
    throw InputError("generator response contains no JSON object");
  }
  return parse_json(std::string_view(text).substr(open, close - open + 1));
}

}  // namespace evsynth
