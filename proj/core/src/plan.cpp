#include "evsynth/plan.hpp"

#include <algorithm>
#include <regex>
#include <set>

#include "evsynth/error.hpp"

namespace evsynth {

namespace {

std::string render_outcomes(const std::vector<Outcome>& outcomes) {
  std::vector<std::string> lines;
  for (const auto& o : outcomes) {
    std::string line = o.measure;
    if (!o.description.empty()) line += (line.empty() ? "" : "; ") + o.description;
    if (!o.time_frame.empty()) line += (line.empty() ? "" : "; ") + ("time frame: " + o.time_frame);
    if (!line.empty()) lines.push_back(line);
  }
  return join(lines, "\n");
}

std::string field_value(const TrialRecord& t, const std::string& field) {
  if (field == "Title") return t.title;
  if (field == "Summary") return t.summary;
  if (field == "Eligibility") return t.eligibility_text;
  if (field == "Conditions") return join(t.conditions, ", ");
  if (field == "Interventions") {
    std::vector<std::string> parts;
    for (const auto& i : t.interventions) {
      parts.push_back(i.kind.empty() ? i.name : i.kind + ": " + i.name);
    }
    return join(parts, "; ");
  }
  if (field == "Study Type") return t.study_type;
  if (field == "Allocation") return t.allocation;
  if (field == "Phase") return join(t.phases, ", ");
  if (field == "Primary Outcome") return render_outcomes(t.primary_outcomes);
  if (field == "Secondary Outcome") return render_outcomes(t.secondary_outcomes);
  if (field == "Adverse Event") return t.adverse_event_text;
  if (field == "Publications") return join(t.publications, "\n");
  if (field == "Enrollment") return t.enrollment ? std::to_string(*t.enrollment) : "";
  return "";
}

std::optional<std::string> canonical_field(std::string_view name) {
  for (const auto& f : attendable_fields()) {
    if (iequals(f, trim(name))) return f;
  }
  return std::nullopt;
}

std::optional<bool> boolean_like(const Json& target) {
  if (target.is_boolean()) return target.get<bool>();
  if (target.is_string()) {
    std::string text = trim(target.get<std::string>());
    if (iequals(text, "yes") || iequals(text, "true")) return true;
    if (iequals(text, "no") || iequals(text, "false")) return false;
  }
  return std::nullopt;
}

std::optional<double> numeric(const Json& target) {
  if (target.is_number()) return target.get<double>();
  if (target.is_string()) return parse_decimal(trim(target.get<std::string>()));
  return std::nullopt;
}

std::string target_text(const Json& target) {
  if (target.is_string()) return trim(target.get<std::string>());
  if (target.is_null()) return "";
  return target.dump();
}

const std::map<std::string_view, Comparison>& comparison_names() {
  static const std::map<std::string_view, Comparison> names{
      {"greater_than", Comparison::greater_than}, {"less_than", Comparison::less_than},
      {"equal_to", Comparison::equal_to},         {"not_equal", Comparison::not_equal},
      {"presence_match", Comparison::presence_match}, {"in_list", Comparison::in_list}};
  return names;
}

class Violations {
 public:
  void add(std::string pointer, std::string message) {
    list_.push_back({std::move(pointer), std::move(message)});
  }
  void throw_if_any() const {
    if (!list_.empty()) throw SchemaError(list_);
  }

 private:
  std::vector<SchemaViolation> list_;
};

void reject_unknown_keys(const Json& object, const std::set<std::string>& allowed,
                         const std::string& base, Violations& out) {
  for (const auto& [key, value] : object.items()) {
    if (!allowed.contains(key)) out.add(pointer_append(base, key), "unknown field \"" + key + "\"");
  }
}

Condition validate_condition(const Json& raw, const std::string& base, Violations& out) {
  Condition c;
  if (!raw.is_object()) {
    out.add(base, "condition must be an object");
    return c;
  }
  reject_unknown_keys(raw,
                      {"fields_to_attend", "llm_instruction", "comparison", "target_value",
                       "membership_list_name"},
                      base, out);

  const auto fields_ptr = pointer_append(base, "fields_to_attend");
  if (!raw.contains("fields_to_attend") || !raw["fields_to_attend"].is_array() ||
      raw["fields_to_attend"].empty()) {
    out.add(fields_ptr, "must be a non-empty array of field names");
  } else {
    std::size_t i = 0;
    for (const auto& f : raw["fields_to_attend"]) {
      auto field = f.is_string() ? canonical_field(f.get<std::string>()) : std::nullopt;
      if (!field) {
        out.add(pointer_append(fields_ptr, i), "not an attendable field: " + f.dump());
      } else if (std::find(c.fields_to_attend.begin(), c.fields_to_attend.end(), *field) ==
                 c.fields_to_attend.end()) {
        c.fields_to_attend.push_back(*field);
      }
      ++i;
    }
  }

  if (!raw.contains("llm_instruction") || !raw["llm_instruction"].is_string() ||
      trim(raw["llm_instruction"].get<std::string>()).empty()) {
    out.add(pointer_append(base, "llm_instruction"), "must be a non-empty string");
  } else {
    c.llm_instruction = raw["llm_instruction"].get<std::string>();
  }

  bool comparison_ok = false;
  if (!raw.contains("comparison") || !raw["comparison"].is_string()) {
    out.add(pointer_append(base, "comparison"), "must be a string");
  } else {
    auto name = raw["comparison"].get<std::string>();
    auto it = comparison_names().find(name);
    if (it == comparison_names().end()) {
      out.add(pointer_append(base, "comparison"), "unknown comparison \"" + name + "\"");
    } else {
      c.comparison = it->second;
      comparison_ok = true;
    }
  }

  const auto target_ptr = pointer_append(base, "target_value");
  if (raw.contains("target_value")) {
    const auto& t = raw["target_value"];
    if (t.is_string() || t.is_number() || t.is_boolean()) {
      c.target_value = t;
    } else if (!t.is_null()) {
      out.add(target_ptr, "must be a string, number or boolean");
    }
  }

  const auto list_ptr = pointer_append(base, "membership_list_name");
  if (raw.contains("membership_list_name")) {
    const auto& m = raw["membership_list_name"];
    if (!m.is_string() || trim(m.get<std::string>()).empty()) {
      out.add(list_ptr, "must be a non-empty string");
    } else {
      c.membership_list_name = trim(m.get<std::string>());
    }
  }

  if (!comparison_ok) return c;
  switch (c.comparison) {
    case Comparison::in_list:
      if (!raw.contains("membership_list_name")) {
        out.add(list_ptr, "required when comparison is in_list");
      }
      break;
    case Comparison::greater_than:
    case Comparison::less_than:
      if (auto n = numeric(c.target_value)) {
        if (c.target_value.is_string()) c.target_value = *n;
      } else {
        out.add(target_ptr, "numeric target required for " + std::string(to_string(c.comparison)));
      }
      [[fallthrough]];
    default:
      if (raw.contains("membership_list_name")) {
        out.add(list_ptr, "only allowed when comparison is in_list");
      }
      if (!raw.contains("target_value") && (c.comparison == Comparison::equal_to ||
                                            c.comparison == Comparison::not_equal)) {
        out.add(target_ptr, "required");
      }
      break;
  }
  return c;
}

FunctionPlan validate_plan_into(const Json& raw, const std::string& base, Violations& out) {
  FunctionPlan plan;
  if (!raw.is_object()) {
    out.add(base, "plan must be an object");
    return plan;
  }
  reject_unknown_keys(raw, {"filter_name", "logical_operator", "conditions"}, base, out);

  static const std::regex snake(R"([a-z][a-z0-9_]*)");
  const auto name_ptr = pointer_append(base, "filter_name");
  if (!raw.contains("filter_name") || !raw["filter_name"].is_string()) {
    out.add(name_ptr, "must be a string");
  } else {
    plan.filter_name = raw["filter_name"].get<std::string>();
    if (!std::regex_match(plan.filter_name, snake)) out.add(name_ptr, "must be snake_case");
  }

  const auto op_ptr = pointer_append(base, "logical_operator");
  bool op_ok = false;
  if (!raw.contains("logical_operator") || !raw["logical_operator"].is_string()) {
    out.add(op_ptr, "must be \"default\" or \"sequential\"");
  } else {
    auto op = raw["logical_operator"].get<std::string>();
    if (op == "default" || op == "and") {
      plan.logical_operator = LogicalOperator::default_op;
      op_ok = true;
    } else if (op == "sequential") {
      plan.logical_operator = LogicalOperator::sequential;
      op_ok = true;
    } else {
      out.add(op_ptr, "unknown logical operator \"" + op + "\"");
    }
  }

  const auto cond_ptr = pointer_append(base, "conditions");
  if (!raw.contains("conditions") || !raw["conditions"].is_array() || raw["conditions"].empty()) {
    out.add(cond_ptr, "must be a non-empty array");
    return plan;
  }
  for (std::size_t i = 0; i < raw["conditions"].size(); ++i) {
    plan.conditions.push_back(validate_condition(raw["conditions"][i], pointer_append(cond_ptr, i), out));
  }
  if (op_ok && plan.logical_operator == LogicalOperator::default_op && plan.conditions.size() != 1) {
    out.add(cond_ptr, "default operator takes exactly one condition, got " +
                          std::to_string(plan.conditions.size()));
  }
  return plan;
}

bool is_comparator(const std::string& name, const EvaluationPolicy& policy) {
  const std::string n = normalize_name(name);
  return std::any_of(policy.comparator_terms.begin(), policy.comparator_terms.end(),
                     [&](const std::string& term) { return normalize_name(term) == n; });
}

ConditionOutcome of(bool satisfied) {
  return satisfied ? ConditionOutcome::satisfied : ConditionOutcome::unsatisfied;
}

}  // namespace

const std::vector<std::string>& attendable_fields() {
  static const std::vector<std::string> fields{
      "Title",         "Summary",          "Eligibility",       "Conditions",
      "Interventions", "Study Type",       "Allocation",        "Phase",
      "Primary Outcome", "Secondary Outcome", "Adverse Event", "Publications",
      "Enrollment"};
  return fields;
}

std::string attended_text(const TrialRecord& trial, const std::vector<std::string>& fields) {
  std::vector<std::string> sections;
  for (const auto& f : attendable_fields()) {
    bool wanted = std::any_of(fields.begin(), fields.end(),
                              [&](const std::string& w) { return iequals(w, f); });
    if (!wanted) continue;
    std::string value = trim(field_value(trial, f));
    if (!value.empty()) sections.push_back(f + ": " + value);
  }
  return join(sections, "\n\n");
}

std::string_view to_string(LogicalOperator op) {
  return op == LogicalOperator::sequential ? "sequential" : "default";
}

std::string_view to_string(Comparison comparison) {
  for (const auto& [name, value] : comparison_names()) {
    if (value == comparison) return name;
  }
  return "equal_to";
}

std::optional<Comparison> comparison_from(std::string_view name) {
  auto it = comparison_names().find(name);
  if (it == comparison_names().end()) return std::nullopt;
  return it->second;
}

std::string_view to_string(ConditionOutcome outcome) {
  switch (outcome) {
    case ConditionOutcome::satisfied: return "satisfied";
    case ConditionOutcome::unsatisfied: return "unsatisfied";
    case ConditionOutcome::unknown: return "unknown";
  }
  return "unknown";
}

FunctionPlan validate_plan(const Json& raw, const std::string& base) {
  Violations out;
  FunctionPlan plan = validate_plan_into(raw, base, out);
  out.throw_if_any();
  return plan;
}

Json to_json(const Condition& c) {
  Json j{{"fields_to_attend", c.fields_to_attend},
         {"llm_instruction", c.llm_instruction},
         {"comparison", to_string(c.comparison)}};
  if (!c.target_value.is_null()) j["target_value"] = c.target_value;
  if (!c.membership_list_name.empty()) j["membership_list_name"] = c.membership_list_name;
  return j;
}

Json to_json(const FunctionPlan& plan) {
  Json conditions = Json::array();
  for (const auto& c : plan.conditions) conditions.push_back(to_json(c));
  return {{"filter_name", plan.filter_name},
          {"logical_operator", to_string(plan.logical_operator)},
          {"conditions", conditions}};
}

PlanSet validate_plan_set(const Json& raw) {
  PlanSet set;
  Violations out;
  Json plans;
  std::string plans_base;
  if (raw.is_array()) {
    plans = raw;
  } else if (raw.is_object() && raw.contains("filter_name")) {
    plans = Json::array({raw});
  } else if (raw.is_object()) {
    reject_unknown_keys(raw, {"condition", "treatment", "membership_lists", "plans"}, "", out);
    for (const char* key : {"condition", "treatment"}) {
      if (!raw.contains(key)) continue;
      if (raw[key].is_string()) {
        (std::string_view(key) == "condition" ? set.condition : set.treatment) =
            raw[key].get<std::string>();
      } else {
        out.add(pointer_append("", key), "must be a string");
      }
    }
    if (raw.contains("membership_lists")) {
      const auto& m = raw["membership_lists"];
      if (!m.is_object()) {
        out.add("/membership_lists", "must be an object mapping list names to disease keys");
      } else {
        for (const auto& [name, key] : m.items()) {
          if (key.is_string()) {
            set.membership_lists[name] = key.get<std::string>();
          } else {
            out.add(pointer_append("/membership_lists", name), "must be a string");
          }
        }
      }
    }
    if (!raw.contains("plans") || !raw["plans"].is_array()) {
      out.add("/plans", "must be an array of plans");
      out.throw_if_any();
    }
    plans = raw["plans"];
    plans_base = "/plans";
  } else {
    throw SchemaError(std::vector<SchemaViolation>{
        {"", "plan set must be an object or an array of plans"}});
  }

  std::set<std::string> names;
  for (std::size_t i = 0; i < plans.size(); ++i) {
    const auto base = pointer_append(plans_base, i);
    FunctionPlan plan = validate_plan_into(plans[i], base, out);
    if (!plan.filter_name.empty() && !names.insert(plan.filter_name).second) {
      out.add(pointer_append(base, "filter_name"), "duplicate filter_name \"" + plan.filter_name + "\"");
    }
    set.plans.push_back(std::move(plan));
  }
  out.throw_if_any();
  return set;
}

PlanSet load_plan_set(const std::string& path) { return validate_plan_set(parse_json(read_file(path))); }

Json to_json(const PlanSet& set) {
  Json plans = Json::array();
  for (const auto& p : set.plans) plans.push_back(to_json(p));
  return {{"condition", set.condition},
          {"treatment", set.treatment},
          {"membership_lists", set.membership_lists},
          {"plans", plans}};
}

ExpectedKind expected_kind(const Condition& condition) {
  switch (condition.comparison) {
    case Comparison::greater_than:
    case Comparison::less_than:
      return ExpectedKind::number;
    case Comparison::equal_to:
    case Comparison::not_equal:
      return boolean_like(condition.target_value) ? ExpectedKind::boolean_yes_no
                                                  : ExpectedKind::phrase_or_none;
    case Comparison::presence_match:
      return ExpectedKind::phrase_or_none;
    case Comparison::in_list:
      return ExpectedKind::name_list;
  }
  return ExpectedKind::phrase_or_none;
}

ConditionOutcome compare(const Condition& condition, const ExtractedValue& value,
                         const MembershipLibrary& lists, const EvaluationPolicy& policy) {
  switch (condition.comparison) {
    case Comparison::greater_than:
    case Comparison::less_than: {
      auto target = numeric(condition.target_value);
      if (!target || value.kind != ExpectedKind::number) return ConditionOutcome::unknown;
      double x = value.as_number();
      return of(condition.comparison == Comparison::greater_than ? x > *target : x < *target);
    }
    case Comparison::equal_to:
    case Comparison::not_equal: {
      bool equal = false;
      if (value.kind == ExpectedKind::boolean_yes_no) {
        auto target = boolean_like(condition.target_value);
        if (!target) return ConditionOutcome::unknown;
        equal = value.as_bool() == *target;
      } else if (value.kind == ExpectedKind::phrase_or_none) {
        const auto& phrase = value.as_phrase();
        std::string extracted = phrase ? trim(*phrase) : "None";
        std::string target = target_text(condition.target_value);
        auto x = parse_decimal(extracted);
        auto y = parse_decimal(target);
        equal = (x && y) ? *x == *y : iequals(extracted, target);
      } else {
        return ConditionOutcome::unknown;
      }
      return of(condition.comparison == Comparison::equal_to ? equal : !equal);
    }
    case Comparison::presence_match: {
      if (value.kind != ExpectedKind::phrase_or_none) return ConditionOutcome::unknown;
      const auto& phrase = value.as_phrase();
      // A yes/no target asks about presence itself rather than naming a
      // substring to look for.
      if (auto wanted = boolean_like(condition.target_value)) return of(phrase.has_value() == *wanted);
      if (!phrase) return ConditionOutcome::unsatisfied;
      std::string target = target_text(condition.target_value);
      return of(target.empty() || icontains(*phrase, target));
    }
    case Comparison::in_list: {
      const DrugList* list = lists.find(condition.membership_list_name);
      if (list == nullptr) {
        throw ConfigError("membership list \"" + condition.membership_list_name + "\" is not loaded");
      }
      if (value.kind != ExpectedKind::name_list) return ConditionOutcome::unknown;
      std::vector<std::string> names;
      for (const auto& n : value.as_names()) {
        if (policy.membership == MembershipMode::any || !is_comparator(n, policy)) names.push_back(n);
      }
      if (names.empty()) return ConditionOutcome::unsatisfied;
      auto member = [&](const std::string& n) { return contains(*list, n); };
      bool ok = policy.membership == MembershipMode::all
                    ? std::all_of(names.begin(), names.end(), member)
                    : std::any_of(names.begin(), names.end(), member);
      return of(ok);
    }
  }
  return ConditionOutcome::unknown;
}

ConditionResult evaluate_condition(const Condition& condition, const TrialRecord& trial,
                                   Parser& parser, const MembershipLibrary& lists,
                                   const EvaluationPolicy& policy) {
  if (condition.comparison == Comparison::in_list &&
      lists.find(condition.membership_list_name) == nullptr) {
    throw ConfigError("membership list \"" + condition.membership_list_name + "\" is not loaded");
  }
  ExtractionRequest request{condition.llm_instruction,
                            attended_text(trial, condition.fields_to_attend),
                            expected_kind(condition)};
  ExtractionResult extraction = extract(request, parser);
  if (!extraction.ok()) return {ConditionOutcome::unknown, std::move(extraction)};
  auto outcome = compare(condition, extraction.value(), lists, policy);
  return {outcome, std::move(extraction)};
}

RuleVerdict evaluate_plan(const FunctionPlan& plan, const TrialRecord& trial, Parser& parser,
                          const MembershipLibrary& lists, const EvaluationPolicy& policy) {
  RuleVerdict verdict{plan.filter_name, trial.nct_id, false, "", {}};
  const std::size_t last = plan.conditions.size() - 1;

  for (std::size_t i = 0; i <= last; ++i) {
    auto result = evaluate_condition(plan.conditions[i], trial, parser, lists, policy);
    const auto outcome = result.outcome;
    verdict.trace.push_back({i, std::move(result.extraction), outcome, false});

    if (plan.logical_operator == LogicalOperator::default_op || i == last) {
      if (outcome == ConditionOutcome::unknown) {
        bool is_default = plan.logical_operator == LogicalOperator::default_op;
        verdict.keep = is_default ? policy.keep_on_unknown_default : policy.keep_on_unknown_final;
        verdict.flag = is_default ? "unknown-condition" : "unknown-final";
      } else {
        verdict.keep = outcome == ConditionOutcome::satisfied;
      }
      return verdict;
    }

    if (outcome == ConditionOutcome::unsatisfied) {
      verdict.keep = true;
      verdict.trace.back().short_circuited = true;
      return verdict;
    }
    if (outcome == ConditionOutcome::unknown) {
      verdict.keep = policy.keep_on_unknown_guard;
      verdict.flag = "unknown-guard";
      verdict.trace.back().short_circuited = true;
      return verdict;
    }
  }
  return verdict;
}

Json to_json(const TraceEntry& entry) {
  return {{"condition_index", entry.index},
          {"extraction", to_json(entry.extraction)},
          {"outcome", to_string(entry.outcome)},
          {"short_circuited", entry.short_circuited}};
}

Json to_json(const RuleVerdict& verdict) {
  Json trace = Json::array();
  for (const auto& e : verdict.trace) trace.push_back(to_json(e));
  Json j{{"filter_name", verdict.filter_name},
         {"nct_id", verdict.nct_id},
         {"keep", verdict.keep},
         {"trace", trace}};
  if (!verdict.flag.empty()) j["flag"] = verdict.flag;
  return j;
}

}  // namespace evsynth
