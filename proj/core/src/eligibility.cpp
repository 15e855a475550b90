#include "evsynth/eligibility.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <regex>
#include <set>

#include "evsynth/error.hpp"

namespace evsynth {

namespace {

constexpr auto kIcase = std::regex::ECMAScript | std::regex::icase;

const std::set<std::string>& criterion_fields() {
  static const std::set<std::string> fields{"kind", "entity", "attribute", "value", "condition",
                                            "sentence"};
  return fields;
}

std::string field_of(const StructuredCriterion& c, const std::string& field) {
  if (field == "kind") return std::string(to_string(c.kind));
  if (field == "entity") return c.entity;
  if (field == "attribute") return c.attribute;
  if (field == "value") return c.value;
  if (field == "condition") return c.condition;
  if (field == "sentence") return c.sentence;
  throw ConfigError("penalty matcher references unknown criterion field \"" + field + "\"");
}

bool is_abbreviation(std::string_view before) {
  static const std::set<std::string> abbreviations{"e.g", "i.e", "etc", "vs", "approx", "dr",
                                                   "no", "fig", "al", "incl", "max", "min"};
  std::size_t start = before.size();
  while (start > 0 && (std::isalpha(static_cast<unsigned char>(before[start - 1])) ||
                       before[start - 1] == '.')) {
    --start;
  }
  return abbreviations.contains(to_lower(before.substr(start)));
}

void split_sentences(const std::string& item, CriterionKind kind, std::vector<Clause>& out) {
  std::string current;
  int depth = 0;
  for (std::size_t i = 0; i < item.size(); ++i) {
    char ch = item[i];
    current.push_back(ch);
    if (ch == '(' || ch == '[') ++depth;
    if ((ch == ')' || ch == ']') && depth > 0) --depth;
    if (depth != 0 || (ch != '.' && ch != '?' && ch != '!')) continue;
    std::size_t next = i + 1;
    if (next >= item.size() || !std::isspace(static_cast<unsigned char>(item[next]))) continue;
    while (next < item.size() && std::isspace(static_cast<unsigned char>(item[next]))) ++next;
    if (next >= item.size() || !std::isupper(static_cast<unsigned char>(item[next]))) continue;
    if (ch == '.' && is_abbreviation(std::string_view(current).substr(0, current.size() - 1))) {
      continue;
    }
    if (auto s = trim(current); !s.empty()) out.push_back({kind, s});
    current.clear();
  }
  if (auto s = trim(current); !s.empty()) out.push_back({kind, s});
}

std::string optional_string(const Json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return "";
  if (!j[key].is_string()) return j[key].dump();
  return trim(j[key].get<std::string>());
}

std::optional<double> first_number(const std::string& text) {
  static const std::regex number(R"(-?\d+(?:\.\d+)?)");
  std::smatch m;
  if (!std::regex_search(text, m, number)) return std::nullopt;
  return parse_decimal(m.str());
}

std::vector<std::string> string_targets(const Json& target) {
  std::vector<std::string> out;
  if (target.is_string()) out.push_back(trim(target.get<std::string>()));
  if (target.is_array()) {
    for (const auto& t : target) {
      if (t.is_string()) out.push_back(trim(t.get<std::string>()));
    }
  }
  return out;
}

Predicate predicate_from_json(const Json& j, const std::string& base,
                              std::vector<SchemaViolation>& violations) {
  Predicate p;
  if (!j.is_object()) {
    violations.push_back({base, "predicate must be an object"});
    return p;
  }
  for (const auto& [key, value] : j.items()) {
    if (key != "field" && key != "comparison" && key != "target_value") {
      violations.push_back({pointer_append(base, key), "unknown field \"" + key + "\""});
    }
  }
  if (!j.contains("field") || !j["field"].is_string()) {
    violations.push_back({pointer_append(base, "field"), "must be a string"});
  } else {
    p.field = j["field"].get<std::string>();
    if (!criterion_fields().contains(p.field)) {
      throw ConfigError("penalty matcher at " + pointer_append(base, "field") +
                        " references unknown criterion field \"" + p.field + "\"");
    }
  }
  auto comparison = comparison_from(j.value("comparison", ""));
  if (!comparison) {
    violations.push_back({pointer_append(base, "comparison"), "unknown comparison"});
    return p;
  }
  p.comparison = *comparison;

  const auto target_ptr = pointer_append(base, "target_value");
  p.target_value = j.value("target_value", Json());
  const auto& t = p.target_value;
  switch (p.comparison) {
    case Comparison::greater_than:
    case Comparison::less_than:
      if (!t.is_number()) violations.push_back({target_ptr, "numeric target required"});
      break;
    case Comparison::equal_to:
    case Comparison::not_equal:
      if (!t.is_string()) violations.push_back({target_ptr, "string target required"});
      break;
    case Comparison::in_list:
      if (!t.is_array() || t.empty() || string_targets(t).size() != t.size()) {
        violations.push_back({target_ptr, "non-empty array of strings required"});
      }
      break;
    case Comparison::presence_match:
      if (!t.is_null() && !t.is_string() &&
          !(t.is_array() && string_targets(t).size() == t.size())) {
        violations.push_back({target_ptr, "must be a string or an array of strings"});
      }
      break;
  }
  return p;
}

PenaltyRule rule_from_json(const Json& j, const std::string& base,
                           std::vector<SchemaViolation>& violations) {
  PenaltyRule rule;
  if (!j.is_object()) {
    violations.push_back({base, "rule must be an object"});
    return rule;
  }
  for (const auto& [key, value] : j.items()) {
    static const std::set<std::string> allowed{"rule_id", "description", "severity", "matcher",
                                               "target_relative"};
    if (!allowed.contains(key)) {
      violations.push_back({pointer_append(base, key), "unknown field \"" + key + "\""});
    }
  }
  if (!j.contains("rule_id") || !j["rule_id"].is_string() || j["rule_id"].get<std::string>().empty()) {
    violations.push_back({pointer_append(base, "rule_id"), "must be a non-empty string"});
  } else {
    rule.rule_id = j["rule_id"].get<std::string>();
  }
  rule.description = j.value("description", "");
  if (!j.contains("severity") || !j["severity"].is_number()) {
    violations.push_back({pointer_append(base, "severity"), "must be a number in [0, 1]"});
  } else {
    try {
      rule.severity = Severity::from_double(j["severity"].get<double>());
    } catch (const InputError& e) {
      violations.push_back({pointer_append(base, "severity"), e.what()});
    }
  }
  if (j.contains("target_relative")) {
    if (j["target_relative"].is_boolean()) {
      rule.target_relative = j["target_relative"].get<bool>();
    } else {
      violations.push_back({pointer_append(base, "target_relative"), "must be a boolean"});
    }
  }
  const auto matcher_ptr = pointer_append(base, "matcher");
  if (!j.contains("matcher") || !j["matcher"].is_array() || j["matcher"].empty()) {
    violations.push_back({matcher_ptr, "must be a non-empty array of predicates"});
  } else {
    for (std::size_t i = 0; i < j["matcher"].size(); ++i) {
      rule.matcher.push_back(predicate_from_json(j["matcher"][i], pointer_append(matcher_ptr, i),
                                                 violations));
    }
  }
  return rule;
}

}  // namespace

std::string_view to_string(CriterionKind kind) {
  return kind == CriterionKind::exclusion ? "exclusion" : "inclusion";
}

CriterionKind criterion_kind_from(std::string_view text) {
  if (iequals(trim(text), "inclusion")) return CriterionKind::inclusion;
  if (iequals(trim(text), "exclusion")) return CriterionKind::exclusion;
  throw InputError("criterion type must be inclusion or exclusion, got \"" + std::string(text) + "\"");
}

const std::vector<std::string>& recommended_entities() {
  static const std::vector<std::string> entities{"demographics",     "disease",
                                                 "biomarker",        "prior-treatment",
                                                 "response-status", "timing",
                                                 "comorbidity"};
  return entities;
}

std::vector<Clause> split_criteria(std::string_view eligibility_text) {
  static const std::regex heading(
      R"(^(?:key|major|main|principal)?\s*(inclusion|exclusion)\s+criteria\s*:?\s*$)", kIcase);
  static const std::regex bullet(R"(^(?:[*\-•]|\d{1,2}[.)])\s+)");

  std::vector<Clause> clauses;
  CriterionKind kind = CriterionKind::inclusion;
  std::string item;
  auto flush = [&] {
    if (!trim(item).empty()) split_sentences(trim(item), kind, clauses);
    item.clear();
  };

  for (const auto& raw_line : split(eligibility_text, '\n')) {
    std::string line = trim(raw_line);
    std::smatch m;
    if (line.empty()) {
      flush();
      continue;
    }
    if (std::regex_match(line, m, heading)) {
      flush();
      kind = iequals(m[1].str(), "exclusion") ? CriterionKind::exclusion : CriterionKind::inclusion;
      continue;
    }
    if (std::regex_search(line, m, bullet)) {
      flush();
      item = line.substr(static_cast<std::size_t>(m.length(0)));
      continue;
    }
    item += item.empty() ? line : " " + line;
  }
  flush();
  return clauses;
}

StructuringResult structure_criteria(const TrialRecord& trial, Parser& parser) {
  StructuringResult result;
  if (trim(trial.eligibility_text).empty()) {
    result.flags.push_back("empty-eligibility-text");
    return result;
  }
  const auto clauses = split_criteria(trial.eligibility_text);
  for (std::size_t i = 0; i < clauses.size(); ++i) {
    StructuredCriterion c{clauses[i].kind, "", "", "", "", clauses[i].sentence};
    auto extraction = extract({kStructureCriterionInstruction, clauses[i].sentence,
                               ExpectedKind::phrase_or_none},
                              parser);
    std::string flag;
    if (!extraction.ok()) {
      flag = std::string(to_string(extraction.failure().reason));
    } else if (const auto& phrase = extraction.value().as_phrase(); !phrase) {
      flag = "unmapped";
    } else {
      try {
        Json object = Json::parse(*phrase);
        if (!object.is_object()) throw InputError("not an object");
        c.entity = to_lower(optional_string(object, "entity"));
        c.attribute = optional_string(object, "attribute");
        c.value = optional_string(object, "value");
        c.condition = optional_string(object, "condition");
        if (c.needs_review()) flag = "unmapped";
      } catch (const std::exception&) {
        flag = "unparseable";
      }
    }
    if (!flag.empty()) {
      c.entity.clear();
      result.flags.push_back(flag + ":" + std::to_string(i));
    }
    result.criteria.push_back(std::move(c));
  }
  return result;
}

Json to_json(const StructuredCriterion& c) {
  return {{"type", to_string(c.kind)},     {"entity", c.entity},
          {"attribute", c.attribute},      {"value", c.value},
          {"condition", c.condition},      {"sentence", c.sentence}};
}

StructuredCriterion structured_criterion_from_json(const Json& j) {
  if (!j.is_object()) throw InputError("structured criterion must be an object");
  StructuredCriterion c;
  c.kind = criterion_kind_from(j.value("type", ""));
  c.entity = j.value("entity", "");
  c.attribute = j.value("attribute", "");
  c.value = j.value("value", "");
  c.condition = j.value("condition", "");
  c.sentence = j.value("sentence", "");
  if (trim(c.sentence).empty()) throw InputError("structured criterion without sentence");
  return c;
}

std::vector<TrialCriteria> criteria_set_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("trials") || !j["trials"].is_array()) {
    throw InputError("criteria document needs a \"trials\" array");
  }
  std::vector<TrialCriteria> set;
  for (const auto& t : j["trials"]) {
    TrialCriteria tc{t.value("trial_id", ""), t.value("label", ""), {}};
    if (tc.trial_id.empty()) throw InputError("criteria entry without trial_id");
    for (const auto& c : t.value("criteria", Json::array())) {
      tc.criteria.push_back(structured_criterion_from_json(c));
    }
    set.push_back(std::move(tc));
  }
  return set;
}

Json to_json(const std::vector<TrialCriteria>& set) {
  Json trials = Json::array();
  for (const auto& t : set) {
    Json criteria = Json::array();
    for (const auto& c : t.criteria) criteria.push_back(to_json(c));
    trials.push_back({{"trial_id", t.trial_id}, {"label", t.label}, {"criteria", criteria}});
  }
  return {{"trials", trials}};
}

Severity Severity::from_double(double value) {
  if (!std::isfinite(value) || value < 0.0 || value > 1.0) {
    throw InputError("severity must lie in [0, 1]");
  }
  double scaled = value * 1000.0;
  double rounded = std::round(scaled);
  if (std::abs(scaled - rounded) > 1e-6) {
    throw InputError("severity must be a multiple of 0.001");
  }
  return Severity{static_cast<std::int64_t>(rounded)};
}

std::vector<PenaltyRule> penalty_rules_from_json(const Json& j) {
  const Json* rules = &j;
  std::string base;
  if (j.is_object()) {
    if (!j.contains("rules")) throw SchemaError(std::vector<SchemaViolation>{{"/rules", "missing"}});
    rules = &j["rules"];
    base = "/rules";
  }
  if (!rules->is_array()) throw SchemaError(std::vector<SchemaViolation>{{base, "must be an array of rules"}});
  std::vector<SchemaViolation> violations;
  std::vector<PenaltyRule> out;
  std::set<std::string> ids;
  for (std::size_t i = 0; i < rules->size(); ++i) {
    auto ptr = pointer_append(base, i);
    out.push_back(rule_from_json((*rules)[i], ptr, violations));
    if (!out.back().rule_id.empty() && !ids.insert(out.back().rule_id).second) {
      violations.push_back({pointer_append(ptr, "rule_id"), "duplicate rule_id"});
    }
  }
  if (!violations.empty()) throw SchemaError(violations);
  return out;
}

Json to_json(const PenaltyRule& rule) {
  Json matcher = Json::array();
  for (const auto& p : rule.matcher) {
    Json pj{{"field", p.field}, {"comparison", to_string(p.comparison)}};
    if (!p.target_value.is_null()) pj["target_value"] = p.target_value;
    matcher.push_back(pj);
  }
  return {{"rule_id", rule.rule_id},
          {"description", rule.description},
          {"severity", rule.severity.value()},
          {"target_relative", rule.target_relative},
          {"matcher", matcher}};
}

Json to_json(const std::vector<PenaltyRule>& rules) {
  Json out = Json::array();
  for (const auto& r : rules) out.push_back(to_json(r));
  return {{"rules", out}};
}

bool matches(const Predicate& p, const StructuredCriterion& criterion) {
  const std::string field = trim(field_of(criterion, p.field));
  switch (p.comparison) {
    case Comparison::equal_to:
      return iequals(field, trim(p.target_value.get<std::string>()));
    case Comparison::not_equal:
      return !iequals(field, trim(p.target_value.get<std::string>()));
    case Comparison::in_list: {
      auto targets = string_targets(p.target_value);
      return std::any_of(targets.begin(), targets.end(),
                         [&](const std::string& t) { return iequals(field, t); });
    }
    case Comparison::presence_match: {
      if (field.empty()) return false;
      auto targets = string_targets(p.target_value);
      if (targets.empty()) return true;
      return std::any_of(targets.begin(), targets.end(),
                         [&](const std::string& t) { return icontains(field, t); });
    }
    case Comparison::greater_than:
    case Comparison::less_than: {
      auto x = first_number(field);
      if (!x) return false;
      double target = p.target_value.get<double>();
      return p.comparison == Comparison::greater_than ? *x > target : *x < target;
    }
  }
  return false;
}

bool matches(const PenaltyRule& rule, const StructuredCriterion& criterion) {
  return std::all_of(rule.matcher.begin(), rule.matcher.end(),
                     [&](const Predicate& p) { return matches(p, criterion); });
}

PenaltyScore evaluate_penalties(const std::string& trial_id, const std::vector<PenaltyRule>& rules,
                                const std::vector<StructuredCriterion>& criteria,
                                const std::vector<StructuredCriterion>& target_criteria) {
  PenaltyScore score{trial_id, {}, {}};
  for (const auto& rule : rules) {
    // Validate predicate fields up front so a bad rule fails even when
    // there is nothing to match.
    for (const auto& p : rule.matcher) {
      if (!criterion_fields().contains(p.field)) field_of(StructuredCriterion{}, p.field);
    }
    if (rule.target_relative &&
        std::any_of(target_criteria.begin(), target_criteria.end(),
                    [&](const StructuredCriterion& c) { return matches(rule, c); })) {
      continue;
    }
    TriggeredRule hit{rule.rule_id, rule.severity, {}};
    for (std::size_t i = 0; i < criteria.size(); ++i) {
      if (matches(rule, criteria[i])) hit.criteria.push_back(i);
    }
    if (hit.criteria.empty()) continue;
    score.total.thousandths += rule.severity.thousandths;
    score.triggered.push_back(std::move(hit));
  }
  return score;
}

Severity attainable_penalty(const std::vector<PenaltyRule>& rules) {
  Severity total;
  for (const auto& r : rules) total.thousandths += r.severity.thousandths;
  return total;
}

Json to_json(const PenaltyScore& score) {
  Json triggered = Json::array();
  for (const auto& t : score.triggered) {
    triggered.push_back(
        {{"rule_id", t.rule_id}, {"severity", t.severity.value()}, {"criteria", t.criteria}});
  }
  return {{"trial_id", score.trial_id}, {"triggered", triggered}, {"total", score.total.value()}};
}

}  // namespace evsynth
