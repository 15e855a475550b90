#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "evsynth/drug_library.hpp"
#include "evsynth/extraction.hpp"
#include "evsynth/trial.hpp"
#include "evsynth/util.hpp"

namespace evsynth {

/// Trial fields a condition may attend to, in rendering order.
const std::vector<std::string>& attendable_fields();

/// Labeled sections ("Phase: PHASE3") for the requested fields, rendered in
/// vocabulary order and separated by blank lines. Empty fields are skipped,
/// so a trial missing every requested field yields "".
std::string attended_text(const TrialRecord& trial, const std::vector<std::string>& fields);

enum class LogicalOperator { default_op, sequential };
enum class Comparison { greater_than, less_than, equal_to, not_equal, presence_match, in_list };

std::string_view to_string(LogicalOperator op);
std::string_view to_string(Comparison comparison);
std::optional<Comparison> comparison_from(std::string_view name);

struct Condition {
  std::vector<std::string> fields_to_attend;
  std::string llm_instruction;
  Comparison comparison = Comparison::equal_to;
  Json target_value;  // null when absent
  std::string membership_list_name;
};

struct FunctionPlan {
  std::string filter_name;
  LogicalOperator logical_operator = LogicalOperator::default_op;
  std::vector<Condition> conditions;
};

/// Checks every schema rule and collects all violations into one
/// SchemaError, each located by JSON pointer relative to `base`.
FunctionPlan validate_plan(const Json& raw, const std::string& base = "");

Json to_json(const Condition& condition);
Json to_json(const FunctionPlan& plan);

/// Ordered plans plus the query context they were generated for.
struct PlanSet {
  std::string condition;  // disease or indication
  std::string treatment;
  std::map<std::string, std::string> membership_lists;  // list name -> drug library key
  std::vector<FunctionPlan> plans;
};

/// Accepts a plan-set object {condition, treatment, membership_lists,
/// plans}, a bare array of plans, or a single plan. filter_name must be
/// unique across the set.
PlanSet validate_plan_set(const Json& raw);
PlanSet load_plan_set(const std::string& path);
Json to_json(const PlanSet& set);

/// greater/less -> number; equal/not_equal -> yes/no when the target is
/// boolean-like, phrase otherwise; presence_match -> phrase; in_list -> names.
ExpectedKind expected_kind(const Condition& condition);

enum class ConditionOutcome { satisfied, unsatisfied, unknown };
std::string_view to_string(ConditionOutcome outcome);

enum class MembershipMode { all, any };

struct EvaluationPolicy {
  MembershipMode membership = MembershipMode::all;
  /// Comparator arms skipped by ALL-membership so "drug vs placebo" can
  /// pass an approved-drug check.
  std::vector<std::string> comparator_terms{"placebo"};
  bool keep_on_unknown_default = false;
  bool keep_on_unknown_guard = true;
  bool keep_on_unknown_final = false;
};

struct ConditionResult {
  ConditionOutcome outcome = ConditionOutcome::unknown;
  ExtractionResult extraction;
};

/// Throws ConfigError when an in_list condition names a missing list.
ConditionResult evaluate_condition(const Condition& condition, const TrialRecord& trial,
                                   Parser& parser, const MembershipLibrary& lists,
                                   const EvaluationPolicy& policy = {});

/// Pure comparison step, exposed for penalty matchers and tests.
ConditionOutcome compare(const Condition& condition, const ExtractedValue& value,
                         const MembershipLibrary& lists, const EvaluationPolicy& policy = {});

struct TraceEntry {
  std::size_t index = 0;
  ExtractionResult extraction;
  ConditionOutcome outcome = ConditionOutcome::unknown;
  bool short_circuited = false;  // evaluation stopped after this entry
};

struct RuleVerdict {
  std::string filter_name;
  std::string nct_id;
  bool keep = false;
  std::string flag;  // empty, "unknown-condition", "unknown-guard" or "unknown-final"
  std::vector<TraceEntry> trace;
};

/// default: keep iff the single condition is satisfied.
/// sequential: every condition but the last is a guard; an unsatisfied guard
/// keeps the trial at once, otherwise keep iff the last one is satisfied.
RuleVerdict evaluate_plan(const FunctionPlan& plan, const TrialRecord& trial, Parser& parser,
                          const MembershipLibrary& lists, const EvaluationPolicy& policy = {});

Json to_json(const TraceEntry& entry);
Json to_json(const RuleVerdict& verdict);

}  // namespace evsynth
