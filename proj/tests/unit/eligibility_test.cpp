#include <gtest/gtest.h>

#include "evsynth/eligibility.hpp"
#include "evsynth/error.hpp"

using namespace evsynth;

namespace {

const std::string kData = std::string(EVSYNTH_SOURCE_DIR) + "/data/olaparib/";

StructuredCriterion criterion(CriterionKind kind, std::string entity, std::string attribute,
                              std::string value = "", std::string condition = "") {
  return {kind, std::move(entity), std::move(attribute), std::move(value), std::move(condition), "s"};
}

Predicate predicate(std::string field, Comparison comparison, Json target) {
  return {std::move(field), comparison, std::move(target)};
}

}  // namespace

TEST(Split, HeadingsBulletsAndSentences) {
  const std::string text =
      "Adults only.\n\n"
      "Inclusion Criteria:\n"
      "* Age 18 or older. ECOG 0-1 (e.g. fully active).\n"
      "* Measurable disease per RECIST\n  version 1.1\n\n"
      "Exclusion Criteria:\n"
      "1. Prior PARP inhibitor, etc. in any setting\n"
      "2) Pregnancy";
  const auto clauses = split_criteria(text);
  ASSERT_EQ(clauses.size(), 6u);
  EXPECT_EQ(clauses[0].sentence, "Adults only.");
  EXPECT_EQ(clauses[0].kind, CriterionKind::inclusion);
  EXPECT_EQ(clauses[1].sentence, "Age 18 or older.");
  EXPECT_EQ(clauses[2].sentence, "ECOG 0-1 (e.g. fully active).");
  EXPECT_EQ(clauses[3].sentence, "Measurable disease per RECIST version 1.1");
  EXPECT_EQ(clauses[4].kind, CriterionKind::exclusion);
  EXPECT_EQ(clauses[4].sentence, "Prior PARP inhibitor, etc. in any setting");
  EXPECT_EQ(clauses[5].sentence, "Pregnancy");
  EXPECT_TRUE(split_criteria("  \n ").empty());
}

TEST(Structure, ReferenceParserAndFlags) {
  TrialRecord t;
  t.nct_id = "NCT1";
  t.eligibility_text = "Inclusion Criteria:\n* Documented germline BRCA1 or BRCA2 mutation\n* Able to swallow tablets";
  ReferenceParser parser;
  const auto result = structure_criteria(t, parser);
  ASSERT_EQ(result.criteria.size(), 2u);
  EXPECT_EQ(result.criteria[0].entity, "biomarker");
  EXPECT_FALSE(result.criteria[0].needs_review());
  EXPECT_TRUE(result.criteria[1].needs_review());
  EXPECT_EQ(result.criteria[1].sentence, "Able to swallow tablets");
  EXPECT_EQ(result.flags, std::vector<std::string>{"unmapped:1"});

  t.eligibility_text = "";
  EXPECT_EQ(structure_criteria(t, parser).flags, std::vector<std::string>{"empty-eligibility-text"});
}

TEST(Structure, CriteriaJsonRoundTrip) {
  const auto set = criteria_set_from_json(parse_json(read_file(kData + "structured_criteria.json")));
  ASSERT_EQ(set.size(), 5u);
  const auto back = criteria_set_from_json(to_json(set));
  ASSERT_EQ(back.size(), set.size());
  for (std::size_t i = 0; i < set.size(); ++i) {
    EXPECT_EQ(back[i].trial_id, set[i].trial_id);
    EXPECT_EQ(back[i].criteria, set[i].criteria);
  }
  EXPECT_THROW(criteria_set_from_json(Json::object()), InputError);
  EXPECT_THROW(structured_criterion_from_json({{"type", "maybe"}, {"sentence", "x"}}), InputError);
}

TEST(Severity, ExactThousandths) {
  EXPECT_EQ(Severity::from_double(0.9).thousandths, 900);
  EXPECT_EQ(Severity::from_double(0.001).thousandths, 1);
  EXPECT_THROW(Severity::from_double(1.5), InputError);
  EXPECT_THROW(Severity::from_double(-0.1), InputError);
  EXPECT_THROW(Severity::from_double(0.0005), InputError);
  const std::int64_t sum = Severity::from_double(0.9).thousandths + Severity::from_double(0.7).thousandths +
                           Severity::from_double(0.6).thousandths + Severity::from_double(0.6).thousandths;
  EXPECT_EQ(sum, 2800);
}

TEST(Predicates, ComparisonVocabulary) {
  const auto c = criterion(CriterionKind::inclusion, "prior-treatment", "platinum-lines", "at least 2 lines",
                           "platinum sensitive");
  EXPECT_TRUE(matches(predicate("kind", Comparison::equal_to, "Inclusion"), c));
  EXPECT_TRUE(matches(predicate("entity", Comparison::not_equal, "disease"), c));
  EXPECT_TRUE(matches(predicate("value", Comparison::presence_match, "2 lines"), c));
  EXPECT_TRUE(matches(predicate("condition", Comparison::presence_match, Json::array({"x", "sensitive"})), c));
  EXPECT_FALSE(matches(predicate("condition", Comparison::presence_match, Json::array({"x", "y"})), c));
  EXPECT_TRUE(matches(predicate("entity", Comparison::in_list, Json::array({"disease", "prior-treatment"})), c));
  EXPECT_TRUE(matches(predicate("value", Comparison::greater_than, 1), c));
  EXPECT_FALSE(matches(predicate("value", Comparison::less_than, 2), c));
  EXPECT_FALSE(matches(predicate("attribute", Comparison::greater_than, 1), c));
}

TEST(Rules, ParsingErrors) {
  EXPECT_THROW(penalty_rules_from_json(Json::object()), SchemaError);
  EXPECT_THROW(penalty_rules_from_json(Json{{"rules", 3}}), SchemaError);
  const Json unknown_field = Json::array({{{"rule_id", "R1"},
                                           {"severity", 0.5},
                                           {"matcher", {{{"field", "colour"}, {"comparison", "equal_to"},
                                                         {"target_value", "x"}}}}}});
  EXPECT_THROW(penalty_rules_from_json(unknown_field), ConfigError);
  const auto rules = penalty_rules_from_json(parse_json(read_file(kData + "penalty_rules.json")));
  EXPECT_EQ(rules.size(), 5u);
  EXPECT_EQ(penalty_rules_from_json(to_json(rules)).size(), rules.size());
  EXPECT_EQ(attainable_penalty(rules).thousandths, 3300);
}

TEST(Rules, TargetRelativeAndTriggerOnce) {
  PenaltyRule rule{"R1", "", Severity::from_double(0.9),
                   {predicate("entity", Comparison::equal_to, "prior-treatment")}, true};
  const std::vector<StructuredCriterion> trial{criterion(CriterionKind::inclusion, "prior-treatment", "a"),
                                               criterion(CriterionKind::inclusion, "prior-treatment", "b")};
  auto score = evaluate_penalties("T", {rule}, trial, {});
  ASSERT_EQ(score.triggered.size(), 1u);
  EXPECT_EQ(score.triggered[0].criteria, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(score.total.thousandths, 900);
  score = evaluate_penalties("T", {rule}, trial, {trial[0]});
  EXPECT_TRUE(score.triggered.empty());
  rule.target_relative = false;
  EXPECT_EQ(evaluate_penalties("T", {rule}, trial, {trial[0]}).total.thousandths, 900);
}

TEST(Rules, OlaparibFixtureTotals) {
  const auto rules = penalty_rules_from_json(parse_json(read_file(kData + "penalty_rules.json")));
  const auto set = criteria_set_from_json(parse_json(read_file(kData + "structured_criteria.json")));
  const TrialCriteria* target = nullptr;
  for (const auto& tc : set) {
    if (tc.trial_id == "NCT02184195") target = &tc;
  }
  ASSERT_NE(target, nullptr);
  const std::map<std::string, std::int64_t> expected{{"NCT00753545", 1800}, {"NCT01844986", 2800},
                                                     {"NCT01874353", 2800}, {"NCT02184195", 0},
                                                     {"NCT02282020", 1600}};
  for (const auto& tc : set) {
    const auto score = evaluate_penalties(tc.trial_id, rules, tc.criteria, target->criteria);
    EXPECT_EQ(score.total.thousandths, expected.at(tc.trial_id)) << tc.trial_id;
  }
}
