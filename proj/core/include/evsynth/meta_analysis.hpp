#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "evsynth/util.hpp"
#include "evsynth/weighting.hpp"

namespace evsynth {

/// 2x2 counts for one study: a/b treatment events/non-events, c/d control.
struct ContingencyTable {
  std::string study_id;
  std::int64_t a = 0;
  std::int64_t b = 0;
  std::int64_t c = 0;
  std::int64_t d = 0;

  [[nodiscard]] std::int64_t n1() const { return a + b; }
  [[nodiscard]] std::int64_t n0() const { return c + d; }
  [[nodiscard]] std::int64_t n() const { return n1() + n0(); }
  [[nodiscard]] std::int64_t m() const { return a + c; }

  /// Throws InputError for negative counts, events above totals or an
  /// empty arm.
  static ContingencyTable from_counts(std::string study_id, std::int64_t events_trt,
                                      std::int64_t total_trt, std::int64_t events_ctl,
                                      std::int64_t total_ctl);

  friend bool operator==(const ContingencyTable&, const ContingencyTable&) = default;
};

/// CSV with header study_id,events_trt,total_trt,events_ctl,total_ctl.
/// Extra columns (for example "penalty") are ignored here.
std::vector<ContingencyTable> tables_from_csv(std::string_view text);
/// {"tables": [{study_id, events_trt, total_trt, events_ctl, total_ctl}]}
/// or the bare array.
std::vector<ContingencyTable> tables_from_json(const Json& j);
/// Dispatches on the file extension (.csv, otherwise JSON).
std::vector<ContingencyTable> load_tables(const std::string& path);
Json to_json(const std::vector<ContingencyTable>& tables);

/// Optional "penalty" column of a table CSV, keyed by study id.
std::vector<std::pair<std::string, double>> penalties_from_csv(std::string_view text);

/// Per-study risk ratio (a/n1)/(c/n0) with log-scale interval,
/// SE = sqrt(1/a - 1/n1 + 1/c - 1/n0).
struct StudyRiskRatio {
  std::optional<double> rr;  // absent only when c = 0 (infinite) or a = c = 0
  std::optional<double> ci_low;
  std::optional<double> ci_high;
  /// "", "zero-treatment-events" (rr 0, upper bound open),
  /// "zero-control-events" (rr infinite, lower bound open) or "no-events".
  std::string marker;
};

/// Normal quantile for a two-sided level; exactly 1.96 at 0.95.
double z_for_level(double level);

StudyRiskRatio per_study_rr(const ContingencyTable& table, double level = 0.95);

struct PoolingOptions {
  double level = 0.95;
  /// Adds 0.5 to every cell of tables that contain a zero cell.
  bool continuity_correction = false;
};

struct StudyContribution {
  std::string study_id;
  double weight = 0.0;
  StudyRiskRatio rr;
  double display_weight_percent = 0.0;
};

struct PooledEstimate {
  double theta_hat = 0.0;
  double log_theta = 0.0;
  double variance = 0.0;  // of log_theta
  double ci_low = 0.0;
  double ci_high = 0.0;
  double level = 0.95;
  double z = 1.96;
  double a_w = 0.0;
  double c_w = 0.0;
  std::vector<StudyContribution> studies;
  std::vector<std::string> corrected_studies;  // continuity-corrected tables
};

/// Eligibility-weighted Mantel-Haenszel risk ratio:
///   A_w = sum w a n0/n,  C_w = sum w c n1/n,  theta = A_w / C_w,
///   Var(ln theta) = sum w^2 (a+d) b c / n^2 / (2 A_w C_w),
///   CI = exp(ln theta +- z sqrt(Var)).
/// Weights are matched to tables by study id; output keeps table order.
/// Throws EstimationError when A_w or C_w is zero.
PooledEstimate pool_ew_mh(const std::vector<ContingencyTable>& tables, const WeightVector& weights,
                          const PoolingOptions& options = {});

/// Percent contributions proportional to w c n1 / n, summing to 100.
std::vector<double> display_weights(const std::vector<ContingencyTable>& tables,
                                    const WeightVector& weights);

Json to_json(const StudyRiskRatio& rr);
Json to_json(const PooledEstimate& estimate);

// --- sensitivity -----------------------------------------------------------------

struct SweepGrid {
  std::vector<double> gammas;
  std::vector<double> floors;
  std::vector<PmaxMode> modes;
};

SweepGrid sweep_grid_from_json(const Json& j);
Json to_json(const SweepGrid& grid);

struct SweepRow {
  WeightParams params;
  WeightVector weights;
  PooledEstimate estimate;
};

/// Evaluates every (gamma, floor, mode) point, gamma outermost, in grid order.
std::vector<SweepRow> sensitivity_sweep(const std::vector<ContingencyTable>& tables,
                                        const std::vector<StudyPenalty>& penalties,
                                        const SweepGrid& grid,
                                        std::optional<double> attainable_pmax,
                                        const PoolingOptions& options = {});

/// gamma,floor,pmax_mode,pmax,theta_hat,ci_low,ci_high,w_<study>...
std::string sweep_csv(const std::vector<SweepRow>& rows);
Json to_json(const std::vector<SweepRow>& rows);

// --- forest plots --------------------------------------------------------------

/// Side-by-side classical and eligibility-weighted panels in table order.
Json forest_data(const PooledEstimate& classical, const PooledEstimate& weighted);
std::string render_forest_svg(const Json& forest);

// --- simulation ----------------------------------------------------------------

struct SimulationConfig {
  double theta = 2.0;
  std::vector<double> control_risks{0.10, 0.15, 0.20, 0.25};  // one per study
  std::vector<std::int64_t> arm_sizes{100, 1000, 10000};
  int replicates = 500;
  std::uint64_t seed = 20240101;
};

struct SimulationPoint {
  std::int64_t arm_size = 0;
  double mean_abs_error = 0.0;
  int skipped = 0;  // replicates with a vanishing pooled side
};

/// Draws binomial tables with true risk ratio theta and reports the mean
/// |theta_hat - theta| under uniform weights for each arm size.
std::vector<SimulationPoint> simulate_consistency(const SimulationConfig& config);

}  // namespace evsynth
