#include <gtest/gtest.h>

#include <algorithm>

#include "evsynth/error.hpp"
#include "evsynth/plan.hpp"

using namespace evsynth;

namespace {

/// Answers by instruction; unknown instructions get no answer.
class ScriptedParser final : public Parser {
 public:
  std::map<std::string, std::optional<std::string>> answers;
  [[nodiscard]] std::string id() const override { return "scripted"; }
  std::optional<std::string> respond(const ExtractionRequest& request) override {
    ++calls;
    auto it = answers.find(request.instruction);
    return it == answers.end() ? std::nullopt : it->second;
  }
  int calls = 0;
};

Json yes_no_condition(const std::string& instruction) {
  return {{"fields_to_attend", {"Title"}},
          {"llm_instruction", instruction},
          {"comparison", "equal_to"},
          {"target_value", "Yes"}};
}

std::vector<std::string> pointers(const SchemaError& e) {
  std::vector<std::string> out;
  for (const auto& v : e.violations()) out.push_back(v.pointer);
  return out;
}

DrugList approved(std::initializer_list<const char*> names) {
  DrugList list;
  list.disease_key = "gastric cancer";
  for (const char* n : names) list.entries.push_back({n, n, {}});
  return list;
}

ExtractedValue names_value(std::vector<std::string> names) {
  return {ExpectedKind::name_list, std::move(names), {}};
}

TrialRecord titled(const std::string& title) {
  TrialRecord t;
  t.nct_id = "NCT1";
  t.title = title;
  return t;
}

}  // namespace

TEST(PlanSchema, AcceptsMinimalPlan) {
  const auto plan = validate_plan({{"filter_name", "phase_three"},
                                   {"logical_operator", "default"},
                                   {"conditions", {yes_no_condition("Phase 3?")}}});
  EXPECT_EQ(plan.filter_name, "phase_three");
  ASSERT_EQ(plan.conditions.size(), 1u);
  EXPECT_EQ(plan.conditions[0].comparison, Comparison::equal_to);
  EXPECT_EQ(validate_plan(to_json(plan)).filter_name, plan.filter_name);
}

TEST(PlanSchema, CollectsEveryViolationWithPointers) {
  Json bad{{"filter_name", "Not Snake"},
           {"logical_operator", "or"},
           {"extra", 1},
           {"conditions",
            {{{"fields_to_attend", {"Title", "Favourite colour"}},
              {"llm_instruction", " "},
              {"comparison", "in_list"}},
             {{"fields_to_attend", {"Phase"}},
              {"llm_instruction", "Enrolled?"},
              {"comparison", "greater_than"},
              {"target_value", "many"},
              {"membership_list_name", "x"}}}}};
  try {
    validate_plan(bad, "/plans/2");
    FAIL() << "expected SchemaError";
  } catch (const SchemaError& e) {
    const auto p = pointers(e);
    for (const char* want :
         {"/plans/2/filter_name", "/plans/2/logical_operator", "/plans/2/extra",
          "/plans/2/conditions/0/fields_to_attend/1", "/plans/2/conditions/0/llm_instruction",
          "/plans/2/conditions/0/membership_list_name", "/plans/2/conditions/1/target_value",
          "/plans/2/conditions/1/membership_list_name"}) {
      EXPECT_NE(std::find(p.begin(), p.end(), want), p.end()) << want;
    }
  }
}

TEST(PlanSchema, DefaultOperatorTakesOneCondition) {
  Json plan{{"filter_name", "two"},
            {"logical_operator", "default"},
            {"conditions", {yes_no_condition("a?"), yes_no_condition("b?")}}};
  EXPECT_THROW(validate_plan(plan), SchemaError);
  plan["logical_operator"] = "sequential";
  EXPECT_EQ(validate_plan(plan).conditions.size(), 2u);
  plan["conditions"] = Json::array();
  EXPECT_THROW(validate_plan(plan), SchemaError);
}

TEST(PlanSchema, EqualityNeedsTarget) {
  Json c = yes_no_condition("a?");
  c.erase("target_value");
  EXPECT_THROW(validate_plan({{"filter_name", "f"}, {"logical_operator", "default"}, {"conditions", {c}}}),
               SchemaError);
}

TEST(PlanSchema, NumericStringTargetsAreCoerced) {
  Json c{{"fields_to_attend", {"Enrollment"}},
         {"llm_instruction", "How many?"},
         {"comparison", "greater_than"},
         {"target_value", "100"}};
  const auto plan = validate_plan({{"filter_name", "size"}, {"logical_operator", "default"}, {"conditions", {c}}});
  EXPECT_TRUE(plan.conditions[0].target_value.is_number());
}

TEST(PlanSet, WrapperFormsAndDuplicateNames) {
  const Json plan{{"filter_name", "f"}, {"logical_operator", "default"}, {"conditions", {yes_no_condition("a?")}}};
  EXPECT_EQ(validate_plan_set(plan).plans.size(), 1u);
  EXPECT_EQ(validate_plan_set(Json::array({plan})).plans.size(), 1u);
  const auto set = validate_plan_set({{"condition", "gastric cancer"},
                                      {"membership_lists", {{"approved", "gastric cancer"}}},
                                      {"plans", {plan}}});
  EXPECT_EQ(set.membership_lists.at("approved"), "gastric cancer");
  try {
    validate_plan_set(Json::array({plan, plan}));
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_EQ(pointers(e), std::vector<std::string>{"/1/filter_name"});
  }
  EXPECT_THROW(validate_plan_set(Json(3)), SchemaError);
}

TEST(PlanSet, FixturesValidate) {
  const std::string root = std::string(EVSYNTH_SOURCE_DIR);
  EXPECT_GE(load_plan_set(root + "/data/olaparib/plans.json").plans.size(), 1u);
  EXPECT_GE(load_plan_set(root + "/data/gastric/plans.json").plans.size(), 1u);
}

TEST(ExpectedKind, FollowsComparison) {
  Condition c;
  c.comparison = Comparison::greater_than;
  EXPECT_EQ(expected_kind(c), ExpectedKind::number);
  c.comparison = Comparison::equal_to;
  c.target_value = "Yes";
  EXPECT_EQ(expected_kind(c), ExpectedKind::boolean_yes_no);
  c.target_value = true;
  EXPECT_EQ(expected_kind(c), ExpectedKind::boolean_yes_no);
  c.target_value = "PHASE3";
  EXPECT_EQ(expected_kind(c), ExpectedKind::phrase_or_none);
  c.comparison = Comparison::presence_match;
  EXPECT_EQ(expected_kind(c), ExpectedKind::phrase_or_none);
  c.comparison = Comparison::in_list;
  EXPECT_EQ(expected_kind(c), ExpectedKind::name_list);
}

TEST(Compare, NumbersAndPhrases) {
  const MembershipLibrary none;
  Condition c;
  c.comparison = Comparison::greater_than;
  c.target_value = 100;
  EXPECT_EQ(compare(c, {ExpectedKind::number, 150.0, {}}, none), ConditionOutcome::satisfied);
  EXPECT_EQ(compare(c, {ExpectedKind::number, 100.0, {}}, none), ConditionOutcome::unsatisfied);
  c.comparison = Comparison::less_than;
  EXPECT_EQ(compare(c, {ExpectedKind::number, 99.0, {}}, none), ConditionOutcome::satisfied);

  c.comparison = Comparison::equal_to;
  c.target_value = "phase3";
  EXPECT_EQ(compare(c, {ExpectedKind::phrase_or_none, Phrase{"PHASE3"}, {}}, none), ConditionOutcome::satisfied);
  c.target_value = "3.0";
  EXPECT_EQ(compare(c, {ExpectedKind::phrase_or_none, Phrase{"3"}, {}}, none), ConditionOutcome::satisfied);
  c.comparison = Comparison::not_equal;
  EXPECT_EQ(compare(c, {ExpectedKind::phrase_or_none, Phrase{"3"}, {}}, none), ConditionOutcome::unsatisfied);

  c.comparison = Comparison::presence_match;
  c.target_value = "HER2";
  EXPECT_EQ(compare(c, {ExpectedKind::phrase_or_none, Phrase{"HER2-negative"}, {}}, none),
            ConditionOutcome::satisfied);
  EXPECT_EQ(compare(c, {ExpectedKind::phrase_or_none, Phrase{}, {}}, none), ConditionOutcome::unsatisfied);
  c.target_value = "No";
  EXPECT_EQ(compare(c, {ExpectedKind::phrase_or_none, Phrase{}, {}}, none), ConditionOutcome::satisfied);
}

TEST(Compare, InListAllSkipsPlaceboAnyDoesNot) {
  MembershipLibrary lists;
  lists.add("approved", approved({"Trastuzumab", "Ramucirumab"}));
  Condition c;
  c.comparison = Comparison::in_list;
  c.membership_list_name = "approved";

  EXPECT_EQ(compare(c, names_value({"trastuzumab", "Placebo"}), lists), ConditionOutcome::satisfied);
  EXPECT_EQ(compare(c, names_value({"Trastuzumab", "Zolbetuximab"}), lists), ConditionOutcome::unsatisfied);
  EXPECT_EQ(compare(c, names_value({"Placebo"}), lists), ConditionOutcome::unsatisfied);
  EXPECT_EQ(compare(c, names_value({}), lists), ConditionOutcome::unsatisfied);

  EvaluationPolicy any;
  any.membership = MembershipMode::any;
  EXPECT_EQ(compare(c, names_value({"Trastuzumab", "Zolbetuximab"}), lists, any), ConditionOutcome::satisfied);
  EXPECT_EQ(compare(c, names_value({"Placebo"}), lists, any), ConditionOutcome::unsatisfied);

  c.membership_list_name = "missing";
  EXPECT_THROW(compare(c, names_value({"x"}), lists), ConfigError);
}

TEST(Compare, KindMismatchIsUnknown) {
  const MembershipLibrary none;
  Condition c;
  c.comparison = Comparison::greater_than;
  c.target_value = 1;
  EXPECT_EQ(compare(c, {ExpectedKind::boolean_yes_no, true, {}}, none), ConditionOutcome::unknown);
}

TEST(Attended, RendersInVocabularyOrderAndSkipsEmpty) {
  TrialRecord t = titled("A trial");
  t.phases = {"PHASE3"};
  EXPECT_EQ(attended_text(t, {"Phase", "title", "Summary"}), "Title: A trial\n\nPhase: PHASE3");
  EXPECT_EQ(attended_text(TrialRecord{}, {"Title"}), "");
}

TEST(Evaluate, DefaultPlanAndUnknownPolicy) {
  const auto plan = validate_plan({{"filter_name", "f"}, {"logical_operator", "default"}, {"conditions", {yes_no_condition("q?")}}});
  const MembershipLibrary none;
  ScriptedParser parser;
  parser.answers["q?"] = "Yes";
  EXPECT_TRUE(evaluate_plan(plan, titled("x"), parser, none).keep);
  parser.answers["q?"] = "No";
  EXPECT_FALSE(evaluate_plan(plan, titled("x"), parser, none).keep);
  parser.answers.clear();
  auto verdict = evaluate_plan(plan, titled("x"), parser, none);
  EXPECT_FALSE(verdict.keep);
  EXPECT_EQ(verdict.flag, "unknown-condition");
  EvaluationPolicy lenient;
  lenient.keep_on_unknown_default = true;
  EXPECT_TRUE(evaluate_plan(plan, titled("x"), parser, none, lenient).keep);
}

TEST(Evaluate, SequentialGuardShortCircuits) {
  const auto plan = validate_plan({{"filter_name", "s"},
                                   {"logical_operator", "sequential"},
                                   {"conditions", {yes_no_condition("guard?"), yes_no_condition("final?")}}});
  const MembershipLibrary none;
  ScriptedParser parser;
  parser.answers["guard?"] = "No";
  parser.answers["final?"] = "No";
  auto verdict = evaluate_plan(plan, titled("x"), parser, none);
  EXPECT_TRUE(verdict.keep);
  ASSERT_EQ(verdict.trace.size(), 1u);
  EXPECT_TRUE(verdict.trace[0].short_circuited);
  EXPECT_EQ(parser.calls, 1);

  parser.answers["guard?"] = "Yes";
  verdict = evaluate_plan(plan, titled("x"), parser, none);
  EXPECT_FALSE(verdict.keep);
  EXPECT_EQ(verdict.trace.size(), 2u);

  parser.answers.erase("guard?");
  verdict = evaluate_plan(plan, titled("x"), parser, none);
  EXPECT_TRUE(verdict.keep);
  EXPECT_EQ(verdict.flag, "unknown-guard");

  parser.answers["guard?"] = "Yes";
  parser.answers.erase("final?");
  verdict = evaluate_plan(plan, titled("x"), parser, none);
  EXPECT_FALSE(verdict.keep);
  EXPECT_EQ(verdict.flag, "unknown-final");
  const Json j = to_json(verdict);
  EXPECT_EQ(j["flag"], "unknown-final");
  EXPECT_EQ(j["trace"].size(), 2u);
}

TEST(Evaluate, MissingListIsConfigErrorBeforeParsing) {
  const auto plan = validate_plan({{"filter_name", "drugs"},
                                   {"logical_operator", "default"},
                                   {"conditions",
                                    {{{"fields_to_attend", {"Interventions"}},
                                      {"llm_instruction", "List drugs."},
                                      {"comparison", "in_list"},
                                      {"membership_list_name", "approved"}}}}});
  ScriptedParser parser;
  EXPECT_THROW(evaluate_plan(plan, titled("x"), parser, MembershipLibrary{}), ConfigError);
  EXPECT_EQ(parser.calls, 0);
}
