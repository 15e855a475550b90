#include <gtest/gtest.h>

#include "evsynth/error.hpp"
#include "evsynth/extraction.hpp"

using namespace evsynth;

namespace {

/// Returns queued answers in order, then nothing.
class QueueParser final : public Parser {
 public:
  explicit QueueParser(std::vector<std::optional<std::string>> answers) : answers_(std::move(answers)) {}
  [[nodiscard]] std::string id() const override { return "queue"; }
  std::optional<std::string> respond(const ExtractionRequest&) override {
    ++calls;
    if (next_ >= answers_.size()) return std::nullopt;
    return answers_[next_++];
  }
  int calls = 0;

 private:
  std::vector<std::optional<std::string>> answers_;
  std::size_t next_ = 0;
};

ExtractionRequest yes_no(const std::string& text = "Randomized, placebo-controlled") {
  return {"Is the trial randomized? Return 'Yes' or 'No'.", text, ExpectedKind::boolean_yes_no};
}

}  // namespace

TEST(Grammar, YesNo) {
  for (const char* yes : {"Yes", "yes", " YES ", "\"Yes\"", "'yes.'", "Yes."}) {
    auto v = validate_raw(ExpectedKind::boolean_yes_no, yes);
    ASSERT_TRUE(v) << yes;
    EXPECT_TRUE(std::get<bool>(*v));
  }
  EXPECT_FALSE(std::get<bool>(*validate_raw(ExpectedKind::boolean_yes_no, "No")));
  for (const char* bad : {"Yes, it is", "Y", "", "maybe", "Yes.."}) {
    EXPECT_FALSE(validate_raw(ExpectedKind::boolean_yes_no, bad)) << bad;
  }
}

TEST(Grammar, Number) {
  EXPECT_DOUBLE_EQ(std::get<double>(*validate_raw(ExpectedKind::number, "84")), 84.0);
  EXPECT_DOUBLE_EQ(std::get<double>(*validate_raw(ExpectedKind::number, "'3.5'")), 3.5);
  EXPECT_FALSE(validate_raw(ExpectedKind::number, "about 84"));
  EXPECT_FALSE(validate_raw(ExpectedKind::number, "None"));
}

TEST(Grammar, PhraseOrNone) {
  EXPECT_FALSE(std::get<Phrase>(*validate_raw(ExpectedKind::phrase_or_none, "None")).has_value());
  EXPECT_FALSE(std::get<Phrase>(*validate_raw(ExpectedKind::phrase_or_none, "none.")).has_value());
  EXPECT_EQ(*std::get<Phrase>(*validate_raw(ExpectedKind::phrase_or_none, "\"HER2\"")), "HER2");
  EXPECT_FALSE(validate_raw(ExpectedKind::phrase_or_none, "  "));
}

TEST(Grammar, NameList) {
  auto names = std::get<std::vector<std::string>>(
      *validate_raw(ExpectedKind::name_list, "['Trastuzumab', 'Pembrolizumab', 'trastuzumab']"));
  EXPECT_EQ(names, (std::vector<std::string>{"Trastuzumab", "Pembrolizumab"}));
  names = std::get<std::vector<std::string>>(*validate_raw(ExpectedKind::name_list, "[\"A\", \"B\"]"));
  EXPECT_EQ(names.size(), 2u);
  names = std::get<std::vector<std::string>>(*validate_raw(ExpectedKind::name_list, "Nivolumab, Ipilimumab"));
  EXPECT_EQ(names.size(), 2u);
  names = std::get<std::vector<std::string>>(*validate_raw(ExpectedKind::name_list, "None"));
  EXPECT_TRUE(names.empty());
  EXPECT_FALSE(validate_raw(ExpectedKind::name_list, "[1, 2]"));
}

TEST(Grammar, RenderRoundTrips) {
  const std::vector<std::pair<ExpectedKind, ExtractedPayload>> cases{
      {ExpectedKind::boolean_yes_no, true},
      {ExpectedKind::boolean_yes_no, false},
      {ExpectedKind::number, 12.5},
      {ExpectedKind::phrase_or_none, Phrase{}},
      {ExpectedKind::phrase_or_none, Phrase{"PD-L1 CPS >= 1"}},
      {ExpectedKind::name_list, std::vector<std::string>{"A", "B c"}},
  };
  for (const auto& [kind, payload] : cases) {
    auto back = validate_raw(kind, render_payload(payload));
    ASSERT_TRUE(back);
    EXPECT_EQ(*back, payload);
  }
}

TEST(Digest, FramingSeparatesFields) {
  ExtractionRequest a{"ab", "c", ExpectedKind::number};
  ExtractionRequest b{"a", "bc", ExpectedKind::number};
  EXPECT_NE(request_digest(a), request_digest(b));
  ExtractionRequest c = a;
  c.expected_kind = ExpectedKind::phrase_or_none;
  EXPECT_NE(request_digest(a), request_digest(c));
  EXPECT_EQ(request_digest(a), request_digest(ExtractionRequest{"ab", "c", ExpectedKind::number}));
  EXPECT_EQ(request_digest(a).size(), 64u);
}

TEST(Extract, ValidFirstAnswer) {
  QueueParser parser({"Yes"});
  auto result = extract(yes_no(), parser);
  ASSERT_TRUE(result.ok());
  EXPECT_TRUE(result.value().as_bool());
  EXPECT_EQ(result.value().provenance.attempts, 1);
  EXPECT_FALSE(result.value().provenance.fallback);
  EXPECT_EQ(result.value().provenance.parser_id, "queue");
}

TEST(Extract, RetriesOnceThenSucceeds) {
  QueueParser parser({"I think so", "Yes"});
  auto result = extract(yes_no(), parser);
  ASSERT_TRUE(result.ok());
  EXPECT_EQ(result.value().provenance.attempts, 2);
  EXPECT_EQ(parser.calls, 2);
}

TEST(Extract, FallsBackToReferenceAfterTwoBadAnswers) {
  QueueParser parser({"perhaps", "unclear"});
  auto result = extract(yes_no(), parser);
  ASSERT_TRUE(result.ok());
  EXPECT_TRUE(result.value().provenance.fallback);
  EXPECT_EQ(result.value().provenance.parser_id, "queue+reference-fallback");
  EXPECT_TRUE(result.value().as_bool());  // reference sees "Randomized"
}

TEST(Extract, UnavailableParserFailsWithoutFallback) {
  QueueParser parser({});
  auto result = extract(yes_no(), parser);
  ASSERT_FALSE(result.ok());
  EXPECT_EQ(result.failure().reason, FailureReason::parser_unavailable);
  EXPECT_EQ(parser.calls, 1);
}

TEST(Extract, EmptyInputNeverCallsParser) {
  QueueParser parser({"Yes"});
  auto result = extract(yes_no("   "), parser);
  ASSERT_FALSE(result.ok());
  EXPECT_EQ(result.failure().reason, FailureReason::empty_input);
  EXPECT_EQ(parser.calls, 0);
}

TEST(Extract, SchemaViolationWhenFallbackAlsoFails) {
  QueueParser parser({"12 patients", "twelve"});
  ExtractionRequest request{"How many?", "no digits here", ExpectedKind::number};
  auto result = extract(request, parser);
  ASSERT_FALSE(result.ok());
  EXPECT_EQ(result.failure().reason, FailureReason::schema_violation);
  EXPECT_TRUE(result.failure().provenance.fallback);
  const Json j = to_json(result);
  EXPECT_EQ(j["failure"], "schema-violation");
}

TEST(Reference, Numbers) {
  ExtractionRequest r{"How many patients were enrolled? Return a number.", "", ExpectedKind::number};
  r.attended_text = "Phase 3 study, n = 1,234 patients";
  EXPECT_EQ(reference_parse(r), "1234");
  r.attended_text = "Enrollment: 85";
  EXPECT_EQ(reference_parse(r), "85");
  r.attended_text = "no numbers";
  EXPECT_EQ(reference_parse(r), "None");
}

TEST(Reference, NamesKeepOnlyDrugLikeInterventions) {
  ExtractionRequest r{"List the drugs.", "DRUG: Olaparib; DRUG: Placebo; PROCEDURE: Surgery",
                      ExpectedKind::name_list};
  EXPECT_EQ(reference_parse(r), "[\"Olaparib\",\"Placebo\"]");
  r.attended_text = "PROCEDURE: Surgery";
  EXPECT_EQ(reference_parse(r), "None");
}

TEST(Reference, TopicsAndQuotedTerms) {
  ExtractionRequest r{"Is this a phase III trial? Return 'Yes' or 'No'.", "Phase 3", ExpectedKind::boolean_yes_no};
  EXPECT_EQ(reference_parse(r), "Yes");
  r.attended_text = "Phase 2";
  EXPECT_EQ(reference_parse(r), "No");
  ExtractionRequest q{"Does the comparator mention 'sham'?", "Sham procedure arm", ExpectedKind::phrase_or_none};
  EXPECT_EQ(reference_parse(q), "Sham");
}

TEST(Reference, StructuresClauses) {
  ExtractionRequest r{kStructureCriterionInstruction, "Documented germline BRCA1 or BRCA2 mutation",
                      ExpectedKind::phrase_or_none};
  const Json j = parse_json(reference_parse(r));
  EXPECT_EQ(j["entity"], "biomarker");
  r.attended_text = "Able to swallow tablets";
  EXPECT_EQ(reference_parse(r), "None");
}

TEST(Replay, AnswersByDigestOnly) {
  ReplayFixture fixture;
  fixture.responses[request_digest(yes_no())] = "No";
  ReplayParser parser(fixture);
  EXPECT_EQ(parser.respond(yes_no()), "No");
  EXPECT_FALSE(parser.respond(yes_no("other text")));
}

TEST(Replay, SaveLoadAndVersionCheck) {
  ReplayFixture fixture;
  fixture.responses["abc"] = "Yes";
  const std::string path = ::testing::TempDir() + "evsynth_replay.json";
  fixture.save(path);
  EXPECT_EQ(ReplayFixture::load(path).responses, fixture.responses);
  EXPECT_THROW(ReplayFixture::from_json(Json{{"format_version", 2}, {"responses", Json::object()}}), InputError);
  EXPECT_THROW(ReplayFixture::from_json(Json::array()), InputError);
}

TEST(Replay, RecordingThenReplayIsIdentical) {
  ReferenceParser reference;
  RecordingParser recorder(reference);
  const auto first = extract(yes_no(), recorder);
  ReplayParser replay(recorder.fixture());
  const auto second = extract(yes_no(), replay);
  ASSERT_TRUE(first.ok() && second.ok());
  EXPECT_EQ(first.value().value, second.value().value);
}

TEST(Factory, ParserSpecs) {
  EXPECT_EQ(make_parser("reference")->id(), "reference");
  EXPECT_EQ(make_parser("")->id(), "reference");
  EXPECT_THROW(make_parser("oracle:xyz"), ConfigError);
  EXPECT_THROW(make_parser("replay:/nonexistent/fixture.json"), InputError);
}
