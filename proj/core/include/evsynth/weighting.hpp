#pragma once

#include <optional>
#include <string>
#include <vector>

#include "evsynth/util.hpp"

namespace evsynth {

/// Where P_max comes from when no explicit value is given.
///   attainable  sum of every rule severity (the worst possible total)
///   observed    largest penalty among the studies being weighted
enum class PmaxMode { attainable, observed };

std::string_view to_string(PmaxMode mode);
PmaxMode pmax_mode_from(std::string_view text);

struct WeightParams {
  double gamma = 0.5;  // steepness, > 0
  double floor = 20.0;  // B in (0, 100]
  PmaxMode pmax_mode = PmaxMode::attainable;
  std::optional<double> explicit_pmax;  // overrides the mode when set
};

/// Throws ConfigError unless gamma > 0, 0 < floor <= 100 and any explicit
/// P_max is positive and finite.
void validate(const WeightParams& params);

struct StudyPenalty {
  std::string study_id;
  double penalty = 0.0;
};

struct StudyWeight {
  std::string study_id;
  double penalty = 0.0;
  double compatibility = 0.0;  // f
  double score = 0.0;          // S
  double weight = 0.0;         // w
};

struct WeightVector {
  WeightParams params;
  double pmax = 0.0;
  std::string pmax_source;  // "explicit", "attainable" or "observed"
  std::vector<StudyWeight> studies;
  std::vector<std::string> warnings;
};

/// f = (e^{-g p} - e^{-g P}) / (1 - e^{-g P}),  S = B + (100 - B) f,
/// w = S / sum S, evaluated in input order. `attainable_pmax` is required in
/// attainable mode unless params carry an explicit P_max.
///
/// P_max = 0 with every penalty 0 gives f = 1 (uniform weights); P_max = 0
/// with a positive penalty is a ConfigError. Penalties above P_max clamp to
/// f = 0 with a warning. Negative or non-finite penalties are InputErrors.
WeightVector compute_weights(const std::vector<StudyPenalty>& penalties, const WeightParams& params,
                             std::optional<double> attainable_pmax = std::nullopt);

/// Equal weights 1/k with f = 1 and S = 100, used for classical pooling.
WeightVector uniform_weights(const std::vector<std::string>& study_ids);

Json to_json(const WeightParams& params);
WeightParams weight_params_from_json(const Json& j);
Json to_json(const WeightVector& weights);
WeightVector weight_vector_from_json(const Json& j);

}  // namespace evsynth
