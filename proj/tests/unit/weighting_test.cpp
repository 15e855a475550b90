#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "evsynth/error.hpp"
#include "evsynth/weighting.hpp"
#include "oracle.hpp"

using namespace evsynth;

namespace {

std::vector<StudyPenalty> penalties(std::initializer_list<double> values) {
  std::vector<StudyPenalty> out;
  int i = 0;
  for (double v : values) out.push_back({"S" + std::to_string(++i), v});
  return out;
}

std::vector<double> weights_of(const WeightVector& w) {
  std::vector<double> out;
  for (const auto& s : w.studies) out.push_back(s.weight);
  return out;
}

}  // namespace

TEST(Weights, AttainableModeMatchesOracle) {
  const WeightParams params;  // gamma 0.5, floor 20, attainable
  const auto w = compute_weights(penalties({0.0, 2.8, 1.8, 2.8}), params, 3.3);
  EXPECT_EQ(w.pmax_source, "attainable");
  EXPECT_DOUBLE_EQ(w.pmax, 3.3);
  const auto expected = oracle::eligibility_weights({0.0, 2.8, 1.8, 2.8}, 0.5, 20.0, 3.3);
  const auto got = weights_of(w);
  for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], expected[i], 1e-12);
  EXPECT_DOUBLE_EQ(w.studies[0].compatibility, 1.0);
  EXPECT_DOUBLE_EQ(w.studies[0].score, 100.0);
}

TEST(Weights, ObservedAndExplicitModes) {
  WeightParams params;
  params.pmax_mode = PmaxMode::observed;
  auto w = compute_weights(penalties({0.0, 2.8, 1.8}), params);
  EXPECT_DOUBLE_EQ(w.pmax, 2.8);
  EXPECT_EQ(w.pmax_source, "observed");
  EXPECT_DOUBLE_EQ(w.studies[1].compatibility, 0.0);
  EXPECT_DOUBLE_EQ(w.studies[1].score, 20.0);

  params.explicit_pmax = 5.0;
  w = compute_weights(penalties({0.0, 2.8}), params);
  EXPECT_EQ(w.pmax_source, "explicit");
  EXPECT_DOUBLE_EQ(w.pmax, 5.0);
}

TEST(Weights, ZeroPmaxMeansUniformOrError) {
  WeightParams params;
  params.pmax_mode = PmaxMode::observed;
  const auto w = compute_weights(penalties({0.0, 0.0, 0.0}), params);
  for (double x : weights_of(w)) EXPECT_DOUBLE_EQ(x, 1.0 / 3.0);
  EXPECT_THROW(compute_weights(penalties({0.0, 1.0}), WeightParams{}, 0.0), ConfigError);
}

TEST(Weights, ClampAboveMaxWarns) {
  const auto w = compute_weights(penalties({0.0, 4.0}), WeightParams{}, 3.3);
  EXPECT_DOUBLE_EQ(w.studies[1].compatibility, 0.0);
  ASSERT_EQ(w.warnings.size(), 1u);
  EXPECT_NE(w.warnings[0].find("S2"), std::string::npos);
}

TEST(Weights, ParameterAndInputErrors) {
  WeightParams bad;
  bad.gamma = 0.0;
  EXPECT_THROW(validate(bad), ConfigError);
  bad = {};
  bad.floor = 0.0;
  EXPECT_THROW(validate(bad), ConfigError);
  bad.floor = 100.5;
  EXPECT_THROW(validate(bad), ConfigError);
  bad = {};
  bad.explicit_pmax = -1.0;
  EXPECT_THROW(validate(bad), ConfigError);

  EXPECT_THROW(compute_weights(penalties({0.0}), WeightParams{}), ConfigError);  // attainable missing
  EXPECT_THROW(compute_weights({}, WeightParams{}, 1.0), InputError);
  EXPECT_THROW(compute_weights(penalties({-0.1}), WeightParams{}, 1.0), InputError);
  EXPECT_THROW(compute_weights(penalties({std::numeric_limits<double>::quiet_NaN()}), WeightParams{}, 1.0),
               InputError);
  EXPECT_THROW(compute_weights({{"A", 0.0}, {"A", 1.0}}, WeightParams{}, 1.0), InputError);
  EXPECT_THROW(pmax_mode_from("largest"), ConfigError);
}

TEST(Weights, FloorOfHundredIsUniform) {
  WeightParams params;
  params.floor = 100.0;
  for (double x : weights_of(compute_weights(penalties({0.0, 3.0, 1.0, 2.0}), params, 3.3))) {
    EXPECT_NEAR(x, 0.25, 1e-15);
  }
}

TEST(Weights, UniformHelper) {
  const auto w = uniform_weights({"a", "b", "c", "d"});
  for (const auto& s : w.studies) {
    EXPECT_DOUBLE_EQ(s.weight, 0.25);
    EXPECT_DOUBLE_EQ(s.score, 100.0);
  }
  EXPECT_THROW(uniform_weights({}), InputError);
}

TEST(Weights, JsonRoundTrip) {
  const auto w = compute_weights(penalties({0.0, 2.8, 1.8, 2.8}), WeightParams{}, 3.3);
  const auto back = weight_vector_from_json(to_json(w));
  EXPECT_EQ(weights_of(back), weights_of(w));
  EXPECT_EQ(back.pmax_source, w.pmax_source);
  const auto params = weight_params_from_json({{"gamma", 1.0}, {"floor", 50}, {"pmax_mode", "observed"}});
  EXPECT_DOUBLE_EQ(params.gamma, 1.0);
  EXPECT_EQ(params.pmax_mode, PmaxMode::observed);
  EXPECT_THROW(weight_params_from_json(Json::array()), InputError);
}
