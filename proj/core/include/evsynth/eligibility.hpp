#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "evsynth/extraction.hpp"
#include "evsynth/plan.hpp"
#include "evsynth/trial.hpp"
#include "evsynth/util.hpp"

namespace evsynth {

enum class CriterionKind { inclusion, exclusion };

std::string_view to_string(CriterionKind kind);
CriterionKind criterion_kind_from(std::string_view text);

/// One eligibility clause as (kind, entity, attribute, value, condition,
/// sentence). An empty entity means the clause could not be structured.
struct StructuredCriterion {
  CriterionKind kind = CriterionKind::inclusion;
  std::string entity;
  std::string attribute;
  std::string value;
  std::string condition;
  std::string sentence;

  [[nodiscard]] bool needs_review() const { return entity.empty() || attribute.empty(); }

  friend bool operator==(const StructuredCriterion&, const StructuredCriterion&) = default;
};

/// Controlled entity vocabulary. Entities outside it are accepted.
const std::vector<std::string>& recommended_entities();

struct Clause {
  CriterionKind kind = CriterionKind::inclusion;
  std::string sentence;
};

/// Splits registry eligibility text into sentence-level clauses.
/// "Inclusion Criteria" / "Exclusion Criteria" headings switch the kind
/// (text before any heading counts as inclusion); bullet markers start a
/// new item; items are split at sentence ends outside parentheses, except
/// after abbreviations such as "e.g." or "etc.".
std::vector<Clause> split_criteria(std::string_view eligibility_text);

struct StructuringResult {
  std::vector<StructuredCriterion> criteria;
  std::vector<std::string> flags;  // "empty-eligibility-text", "unmapped:<index>", ...
};

/// Asks the parser for one {entity, attribute, value, condition} object per
/// clause. Clauses the parser cannot structure keep their sentence with an
/// empty entity and are flagged.
StructuringResult structure_criteria(const TrialRecord& trial, Parser& parser);

Json to_json(const StructuredCriterion& c);
StructuredCriterion structured_criterion_from_json(const Json& j);

/// Criteria for several trials: {"trials": [{"trial_id", "label", "criteria"}]}.
struct TrialCriteria {
  std::string trial_id;
  std::string label;
  std::vector<StructuredCriterion> criteria;
};

std::vector<TrialCriteria> criteria_set_from_json(const Json& j);
Json to_json(const std::vector<TrialCriteria>& set);

// --- penalties -----------------------------------------------------------------

/// Severity in exact thousandths so that totals such as 0.9 + 0.7 + 0.6 +
/// 0.6 come out as 2.8 on the nose.
struct Severity {
  std::int64_t thousandths = 0;

  static Severity from_double(double value);  // throws unless a multiple of 0.001 in [0, 1]
  [[nodiscard]] double value() const { return static_cast<double>(thousandths) / 1000.0; }

  friend auto operator<=>(const Severity&, const Severity&) = default;
};

/// One test on a criterion field, using the plan comparison vocabulary:
///   equal_to / not_equal  case-insensitive trimmed equality
///   presence_match        field non-empty; a string target must occur in it
///                         and an array target means any of its strings
///   in_list               field equals one of the target strings
///   greater_than / less_than  first number in the field vs a numeric target
struct Predicate {
  std::string field;  // kind, entity, attribute, value, condition or sentence
  Comparison comparison = Comparison::equal_to;
  Json target_value;
};

struct PenaltyRule {
  std::string rule_id;
  std::string description;
  Severity severity;
  std::vector<Predicate> matcher;  // all must hold
  /// Only triggers when no target criterion satisfies the matcher, so the
  /// target trial scores zero against itself.
  bool target_relative = false;
};

/// Throws ConfigError for unknown predicate fields and SchemaError for
/// malformed documents. Accepts {"rules": [...]} or a bare array.
std::vector<PenaltyRule> penalty_rules_from_json(const Json& j);
Json to_json(const PenaltyRule& rule);
Json to_json(const std::vector<PenaltyRule>& rules);

bool matches(const Predicate& predicate, const StructuredCriterion& criterion);
bool matches(const PenaltyRule& rule, const StructuredCriterion& criterion);

struct TriggeredRule {
  std::string rule_id;
  Severity severity;
  std::vector<std::size_t> criteria;  // indices of the matching criteria
};

struct PenaltyScore {
  std::string trial_id;
  std::vector<TriggeredRule> triggered;
  Severity total;
};

/// A rule triggers at most once per trial, when at least one criterion
/// matches it (and, for target-relative rules, no target criterion does).
PenaltyScore evaluate_penalties(const std::string& trial_id, const std::vector<PenaltyRule>& rules,
                                const std::vector<StructuredCriterion>& criteria,
                                const std::vector<StructuredCriterion>& target_criteria);

/// Sum of all rule severities, the largest total any trial can reach.
Severity attainable_penalty(const std::vector<PenaltyRule>& rules);

Json to_json(const PenaltyScore& score);

}  // namespace evsynth
