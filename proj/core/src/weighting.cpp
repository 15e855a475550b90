#include "evsynth/weighting.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "evsynth/error.hpp"

namespace evsynth {

std::string_view to_string(PmaxMode mode) {
  return mode == PmaxMode::observed ? "observed" : "attainable";
}

PmaxMode pmax_mode_from(std::string_view text) {
  if (iequals(text, "attainable")) return PmaxMode::attainable;
  if (iequals(text, "observed")) return PmaxMode::observed;
  throw ConfigError("pmax mode must be attainable or observed, got \"" + std::string(text) + "\"");
}

void validate(const WeightParams& params) {
  if (!std::isfinite(params.gamma) || params.gamma <= 0.0) {
    throw ConfigError("gamma must be a positive number");
  }
  if (!std::isfinite(params.floor) || params.floor <= 0.0 || params.floor > 100.0) {
    throw ConfigError("floor B must lie in (0, 100]");
  }
  if (params.explicit_pmax && (!std::isfinite(*params.explicit_pmax) || *params.explicit_pmax <= 0.0)) {
    throw ConfigError("explicit P_max must be a positive number");
  }
}

WeightVector compute_weights(const std::vector<StudyPenalty>& penalties, const WeightParams& params,
                             std::optional<double> attainable_pmax) {
  validate(params);
  if (penalties.empty()) throw InputError("at least one study is required for weighting");
  std::set<std::string> ids;
  for (const auto& p : penalties) {
    if (!std::isfinite(p.penalty) || p.penalty < 0.0) {
      throw InputError("penalty for " + p.study_id + " must be a finite non-negative number");
    }
    if (!ids.insert(p.study_id).second) throw InputError("duplicate study id " + p.study_id);
  }

  WeightVector out;
  out.params = params;
  double observed = 0.0;
  for (const auto& p : penalties) observed = std::max(observed, p.penalty);
  if (params.explicit_pmax) {
    out.pmax = *params.explicit_pmax;
    out.pmax_source = "explicit";
  } else if (params.pmax_mode == PmaxMode::observed) {
    out.pmax = observed;
    out.pmax_source = "observed";
  } else {
    if (!attainable_pmax) {
      throw ConfigError("attainable P_max needs the rule severities (or an explicit P_max)");
    }
    if (!std::isfinite(*attainable_pmax) || *attainable_pmax < 0.0) {
      throw ConfigError("attainable P_max must be a finite non-negative number");
    }
    out.pmax = *attainable_pmax;
    out.pmax_source = "attainable";
  }
  if (out.pmax == 0.0 && observed > 0.0) {
    throw ConfigError("P_max resolved to 0 while some penalties are positive");
  }

  const double tail = std::exp(-params.gamma * out.pmax);
  const double span = 1.0 - tail;
  double total = 0.0;
  for (const auto& p : penalties) {
    StudyWeight w{p.study_id, p.penalty, 1.0, 0.0, 0.0};
    if (out.pmax > 0.0) {
      if (p.penalty > out.pmax) {
        w.compatibility = 0.0;
        out.warnings.push_back("penalty of " + p.study_id + " exceeds P_max; f clamped to 0");
      } else {
        w.compatibility = std::clamp((std::exp(-params.gamma * p.penalty) - tail) / span, 0.0, 1.0);
      }
    }
    w.score = params.floor + (100.0 - params.floor) * w.compatibility;
    total += w.score;
    out.studies.push_back(std::move(w));
  }
  for (auto& w : out.studies) w.weight = w.score / total;
  return out;
}

WeightVector uniform_weights(const std::vector<std::string>& study_ids) {
  if (study_ids.empty()) throw InputError("at least one study is required for weighting");
  WeightVector out;
  out.params.floor = 100.0;
  out.pmax_source = "uniform";
  const double w = 1.0 / static_cast<double>(study_ids.size());
  for (const auto& id : study_ids) out.studies.push_back({id, 0.0, 1.0, 100.0, w});
  return out;
}

Json to_json(const WeightParams& params) {
  Json j{{"gamma", params.gamma}, {"floor", params.floor}, {"pmax_mode", to_string(params.pmax_mode)}};
  if (params.explicit_pmax) j["explicit_pmax"] = *params.explicit_pmax;
  return j;
}

WeightParams weight_params_from_json(const Json& j) {
  if (!j.is_object()) throw InputError("weight parameters must be an object");
  WeightParams p;
  try {
    p.gamma = j.value("gamma", p.gamma);
    p.floor = j.value("floor", p.floor);
    if (j.contains("pmax_mode")) p.pmax_mode = pmax_mode_from(j["pmax_mode"].get<std::string>());
    if (j.contains("explicit_pmax") && !j["explicit_pmax"].is_null()) {
      p.explicit_pmax = j["explicit_pmax"].get<double>();
    }
  } catch (const Json::exception& e) {
    throw InputError(std::string("weight parameters: ") + e.what());
  }
  validate(p);
  return p;
}

Json to_json(const WeightVector& weights) {
  Json studies = Json::array();
  for (const auto& s : weights.studies) {
    studies.push_back({{"study_id", s.study_id},
                       {"p", s.penalty},
                       {"f", s.compatibility},
                       {"S", s.score},
                       {"w", s.weight}});
  }
  return {{"params", to_json(weights.params)},
          {"pmax", weights.pmax},
          {"pmax_source", weights.pmax_source},
          {"studies", studies},
          {"warnings", weights.warnings}};
}

WeightVector weight_vector_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("studies") || !j["studies"].is_array()) {
    throw InputError("weight vector needs a \"studies\" array");
  }
  WeightVector w;
  if (j.contains("params")) w.params = weight_params_from_json(j["params"]);
  w.pmax = j.value("pmax", 0.0);
  w.pmax_source = j.value("pmax_source", "");
  w.warnings = j.value("warnings", std::vector<std::string>{});
  for (const auto& s : j["studies"]) {
    w.studies.push_back({s.value("study_id", ""), s.value("p", 0.0), s.value("f", 0.0),
                         s.value("S", 0.0), s.at("w").get<double>()});
  }
  return w;
}

}  // namespace evsynth
