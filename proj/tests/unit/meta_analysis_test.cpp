#include <gtest/gtest.h>

#include <cmath>

#include "evsynth/error.hpp"
#include "evsynth/meta_analysis.hpp"
#include "oracle.hpp"

using namespace evsynth;

namespace {

const std::string kData = std::string(EVSYNTH_SOURCE_DIR) + "/data/olaparib/";

std::vector<ContingencyTable> olaparib() { return load_tables(kData + "tables.csv"); }

std::vector<oracle::Table> oracle_tables(const std::vector<ContingencyTable>& tables) {
  std::vector<oracle::Table> out;
  for (const auto& t : tables) {
    out.push_back({static_cast<double>(t.a), static_cast<double>(t.b), static_cast<double>(t.c),
                   static_cast<double>(t.d)});
  }
  return out;
}

std::vector<std::string> ids(const std::vector<ContingencyTable>& tables) {
  std::vector<std::string> out;
  for (const auto& t : tables) out.push_back(t.study_id);
  return out;
}

WeightVector eligibility(const std::vector<ContingencyTable>& tables) {
  std::vector<StudyPenalty> p;
  for (const auto& [id, penalty] : penalties_from_csv(read_file(kData + "tables.csv"))) p.push_back({id, penalty});
  return compute_weights(p, WeightParams{}, 3.3);
}

}  // namespace

TEST(Tables, CsvAndJsonAgree) {
  const auto tables = olaparib();
  ASSERT_EQ(tables.size(), 4u);
  EXPECT_EQ(tables[0].study_id, "Golan 2019");
  EXPECT_EQ(tables[0].a, 18);
  EXPECT_EQ(tables[0].b, 73);
  EXPECT_EQ(tables[0].n0(), 60);
  EXPECT_EQ(tables_from_json(to_json(tables)), tables);
  EXPECT_EQ(tables_from_json(to_json(tables)["tables"]), tables);
}

TEST(Tables, RejectsBadCounts) {
  EXPECT_THROW(ContingencyTable::from_counts("x", 5, 4, 1, 10), InputError);
  EXPECT_THROW(ContingencyTable::from_counts("x", -1, 4, 1, 10), InputError);
  EXPECT_THROW(ContingencyTable::from_counts("x", 0, 0, 1, 10), InputError);
  EXPECT_THROW(tables_from_csv("study_id,events_trt\nA,1\n"), InputError);
  EXPECT_THROW(tables_from_csv("study_id,events_trt,total_trt,events_ctl,total_ctl\nA,1,x,1,2\n"), InputError);
  EXPECT_THROW(tables_from_json(Json(1)), InputError);
  EXPECT_THROW(tables_from_json(Json::object()), InputError);
}

TEST(Tables, PenaltyColumn) {
  const auto p = penalties_from_csv(read_file(kData + "tables.csv"));
  ASSERT_EQ(p.size(), 4u);
  EXPECT_EQ(p[1].first, "Moore 2018");
  EXPECT_DOUBLE_EQ(p[1].second, 2.8);
  EXPECT_THROW(penalties_from_csv("study_id,x\nA,1\n"), InputError);
}

TEST(RiskRatio, MatchesOracleAndMarksZeroCells) {
  const auto tables = olaparib();
  const auto ot = oracle_tables(tables);
  for (std::size_t i = 0; i < tables.size(); ++i) {
    const auto rr = per_study_rr(tables[i]);
    const auto want = oracle::risk_ratio(ot[i]);
    EXPECT_NEAR(*rr.rr, want.rr, 1e-12);
    EXPECT_NEAR(*rr.ci_low, want.low, 1e-12);
    EXPECT_NEAR(*rr.ci_high, want.high, 1e-12);
    EXPECT_TRUE(rr.marker.empty());
  }
  auto rr = per_study_rr(ContingencyTable::from_counts("z", 0, 10, 3, 10));
  EXPECT_EQ(rr.marker, "zero-treatment-events");
  EXPECT_DOUBLE_EQ(*rr.rr, 0.0);
  EXPECT_FALSE(rr.ci_high);
  rr = per_study_rr(ContingencyTable::from_counts("z", 3, 10, 0, 10));
  EXPECT_EQ(rr.marker, "zero-control-events");
  EXPECT_FALSE(rr.rr);
  rr = per_study_rr(ContingencyTable::from_counts("z", 0, 10, 0, 10));
  EXPECT_EQ(rr.marker, "no-events");
}

TEST(Quantile, LevelHandling) {
  EXPECT_EQ(z_for_level(0.95), 1.96);
  EXPECT_NEAR(z_for_level(0.90), 1.6448536269514722, 1e-9);
  EXPECT_NEAR(z_for_level(0.99), 2.5758293035489004, 1e-9);
  EXPECT_THROW(z_for_level(1.0), ConfigError);
  EXPECT_THROW(z_for_level(0.0), ConfigError);
}

TEST(Pool, UniformAndEligibilityAgainstOracle) {
  const auto tables = olaparib();
  const auto ot = oracle_tables(tables);
  const auto uniform = pool_ew_mh(tables, uniform_weights(ids(tables)));
  const auto u = oracle::mantel_haenszel(ot, {0.25, 0.25, 0.25, 0.25});
  EXPECT_NEAR(uniform.theta_hat, u.theta, 1e-12);
  EXPECT_NEAR(uniform.variance, u.var, 1e-12);
  EXPECT_DOUBLE_EQ(oracle::round_to(uniform.theta_hat, 2), 2.18);

  const auto w = eligibility(tables);
  const auto weighted = pool_ew_mh(tables, w);
  std::vector<double> wv;
  for (const auto& s : w.studies) wv.push_back(s.weight);
  const auto e = oracle::mantel_haenszel(ot, wv);
  EXPECT_NEAR(weighted.theta_hat, e.theta, 1e-12);
  EXPECT_NEAR(weighted.ci_low, e.low, 1e-12);
  EXPECT_NEAR(weighted.ci_high, e.high, 1e-12);
  EXPECT_DOUBLE_EQ(oracle::round_to(weighted.theta_hat, 2), 1.97);
  EXPECT_DOUBLE_EQ(oracle::round_to(weighted.ci_low, 2), 1.76);
  EXPECT_DOUBLE_EQ(oracle::round_to(weighted.ci_high, 2), 2.20);

  const auto display = display_weights(tables, w);
  const auto want = oracle::display_percent(ot, wv);
  double total = 0.0;
  for (std::size_t i = 0; i < display.size(); ++i) {
    EXPECT_NEAR(display[i], want[i], 1e-9);
    EXPECT_NEAR(weighted.studies[i].display_weight_percent, want[i], 1e-9);
    total += display[i];
  }
  EXPECT_NEAR(total, 100.0, 1e-9);
}

TEST(Pool, WeightMatchingByStudyId) {
  auto tables = olaparib();
  auto w = uniform_weights(ids(tables));
  std::reverse(w.studies.begin(), w.studies.end());
  const auto est = pool_ew_mh(tables, w);
  EXPECT_EQ(est.studies[0].study_id, "Golan 2019");
  w.studies.pop_back();
  EXPECT_THROW(pool_ew_mh(tables, w), InputError);
  tables.push_back(tables[0]);
  EXPECT_THROW(pool_ew_mh(tables, uniform_weights({"Golan 2019", "Moore 2018", "Ledermann 2014",
                                                   "Pujade-Lauraine 2017"})),
               InputError);
}

TEST(Pool, ZeroSidesAndContinuityCorrection) {
  const std::vector<ContingencyTable> zeros{ContingencyTable::from_counts("A", 0, 10, 2, 10),
                                            ContingencyTable::from_counts("B", 0, 20, 3, 20)};
  EXPECT_THROW(pool_ew_mh(zeros, uniform_weights({"A", "B"})), EstimationError);
  PoolingOptions cc;
  cc.continuity_correction = true;
  const auto est = pool_ew_mh(zeros, uniform_weights({"A", "B"}), cc);
  EXPECT_EQ(est.corrected_studies, (std::vector<std::string>{"A", "B"}));
  const auto o = oracle::mantel_haenszel({{0.5, 10.5, 2.5, 8.5}, {0.5, 20.5, 3.5, 17.5}}, {0.5, 0.5});
  EXPECT_NEAR(est.theta_hat, o.theta, 1e-12);
}

TEST(Pool, LevelChangesOnlyTheInterval) {
  const auto tables = olaparib();
  PoolingOptions ninety;
  ninety.level = 0.90;
  const auto a = pool_ew_mh(tables, uniform_weights(ids(tables)));
  const auto b = pool_ew_mh(tables, uniform_weights(ids(tables)), ninety);
  EXPECT_DOUBLE_EQ(a.theta_hat, b.theta_hat);
  EXPECT_GT(b.ci_low, a.ci_low);
  EXPECT_LT(b.ci_high, a.ci_high);
  EXPECT_EQ(to_json(b)["level"], 0.90);
}

TEST(Sweep, GridOrderAndKnownPoints) {
  const auto tables = olaparib();
  std::vector<StudyPenalty> p;
  for (const auto& [id, penalty] : penalties_from_csv(read_file(kData + "tables.csv"))) p.push_back({id, penalty});
  const auto grid = sweep_grid_from_json(parse_json(read_file(kData + "sweep_grid.json")));
  const auto rows = sensitivity_sweep(tables, p, grid, 3.3);
  ASSERT_EQ(rows.size(), 4u * 4u * 2u);
  EXPECT_DOUBLE_EQ(rows[0].params.gamma, 0.25);
  EXPECT_DOUBLE_EQ(rows[1].params.gamma, 0.25);
  EXPECT_EQ(rows[1].params.pmax_mode, PmaxMode::observed);

  const auto uniform = pool_ew_mh(tables, uniform_weights(ids(tables)));
  bool saw_reference = false;
  for (const auto& row : rows) {
    if (row.params.floor == 100.0) EXPECT_NEAR(row.estimate.theta_hat, uniform.theta_hat, 1e-12);
    if (row.params.gamma == 0.5 && row.params.floor == 20.0 && row.params.pmax_mode == PmaxMode::attainable) {
      EXPECT_DOUBLE_EQ(oracle::round_to(row.estimate.theta_hat, 2), 1.97);
      saw_reference = true;
    }
  }
  EXPECT_TRUE(saw_reference);

  const std::string csv = sweep_csv(rows);
  EXPECT_EQ(csv.rfind("gamma,floor,pmax_mode,pmax,theta_hat,ci_low,ci_high,w_Golan 2019", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 33);
  EXPECT_THROW(sweep_grid_from_json({{"gamma", Json::array()}, {"floor", {20}}, {"pmax_mode", {"attainable"}}}),
               InputError);
}

TEST(Forest, DataAndSvg) {
  const auto tables = olaparib();
  const auto classical = pool_ew_mh(tables, uniform_weights(ids(tables)));
  const auto weighted = pool_ew_mh(tables, eligibility(tables));
  const Json forest = forest_data(classical, weighted);
  ASSERT_EQ(forest["panels"].size(), 2u);
  EXPECT_EQ(forest["panels"][1]["rows"].size(), 4u);
  const std::string svg = render_forest_svg(forest);
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("Golan 2019"), std::string::npos);
  EXPECT_EQ(render_forest_svg(parse_json(forest.dump())), svg);
}

TEST(Simulation, ErrorShrinksWithArmSize) {
  SimulationConfig config;
  config.replicates = 200;
  const auto points = simulate_consistency(config);
  ASSERT_EQ(points.size(), 3u);
  EXPECT_GT(points[0].mean_abs_error, points[2].mean_abs_error);
  EXPECT_EQ(simulate_consistency(config)[1].mean_abs_error, points[1].mean_abs_error);
  config.replicates = 0;
  EXPECT_THROW(simulate_consistency(config), ConfigError);
}
