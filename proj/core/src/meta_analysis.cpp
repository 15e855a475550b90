#include "evsynth/meta_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <set>

#include <boost/math/distributions/normal.hpp>

#include "evsynth/error.hpp"

namespace evsynth {

namespace {

struct Cells {
  double a, b, c, d;
  [[nodiscard]] double n1() const { return a + b; }
  [[nodiscard]] double n0() const { return c + d; }
  [[nodiscard]] double n() const { return a + b + c + d; }
};

Cells cells_of(const ContingencyTable& t) {
  return {static_cast<double>(t.a), static_cast<double>(t.b), static_cast<double>(t.c),
          static_cast<double>(t.d)};
}

bool has_zero_cell(const ContingencyTable& t) { return t.a == 0 || t.b == 0 || t.c == 0 || t.d == 0; }

/// Weights in table order; ids must match one to one.
std::vector<double> aligned_weights(const std::vector<ContingencyTable>& tables,
                                    const WeightVector& weights) {
  std::map<std::string, double> by_id;
  for (const auto& s : weights.studies) {
    if (!by_id.emplace(s.study_id, s.weight).second) {
      throw InputError("duplicate weight for study " + s.study_id);
    }
  }
  std::vector<double> out;
  std::set<std::string> seen;
  for (const auto& t : tables) {
    if (!seen.insert(t.study_id).second) throw InputError("duplicate table for study " + t.study_id);
    auto it = by_id.find(t.study_id);
    if (it == by_id.end()) throw InputError("no weight for study " + t.study_id);
    if (!std::isfinite(it->second) || it->second < 0.0) {
      throw InputError("weight for study " + t.study_id + " must be finite and non-negative");
    }
    out.push_back(it->second);
  }
  if (by_id.size() != tables.size()) {
    for (const auto& [id, w] : by_id) {
      if (!seen.contains(id)) throw InputError("weight given for unknown study " + id);
    }
  }
  return out;
}

std::vector<std::string> parse_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        current.push_back('"');
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        current.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(trim(current));
      current.clear();
    } else {
      current.push_back(ch);
    }
  }
  fields.push_back(trim(current));
  return fields;
}

struct CsvDocument {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  [[nodiscard]] std::optional<std::size_t> column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (iequals(header[i], name)) return i;
    }
    return std::nullopt;
  }
};

CsvDocument parse_csv(std::string_view text) {
  CsvDocument doc;
  for (auto line : split(text, '\n')) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || trim(line).front() == '#') continue;
    auto fields = parse_csv_line(line);
    if (doc.header.empty()) {
      doc.header = std::move(fields);
    } else {
      doc.rows.push_back(std::move(fields));
    }
  }
  if (doc.header.empty()) throw InputError("CSV input has no header");
  return doc;
}

std::int64_t parse_count(const std::string& text, const std::string& what) {
  auto value = parse_decimal(text);
  if (!value || *value != std::floor(*value) || std::abs(*value) > 1e15) {
    throw InputError(what + " must be an integer, got \"" + text + "\"");
  }
  return static_cast<std::int64_t>(*value);
}

std::string fixed(double value, int digits) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.*f", digits, value);
  return buffer;
}

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

ContingencyTable ContingencyTable::from_counts(std::string study_id, std::int64_t events_trt,
                                               std::int64_t total_trt, std::int64_t events_ctl,
                                               std::int64_t total_ctl) {
  if (trim(study_id).empty()) throw InputError("table without study_id");
  if (events_trt < 0 || events_ctl < 0 || total_trt < 1 || total_ctl < 1) {
    throw InputError(study_id + ": counts must be non-negative and each arm needs at least one patient");
  }
  if (events_trt > total_trt || events_ctl > total_ctl) {
    throw InputError(study_id + ": events exceed arm total");
  }
  return {std::move(study_id), events_trt, total_trt - events_trt, events_ctl, total_ctl - events_ctl};
}

std::vector<ContingencyTable> tables_from_csv(std::string_view text) {
  const auto doc = parse_csv(text);
  std::vector<std::size_t> cols;
  for (const char* name : {"study_id", "events_trt", "total_trt", "events_ctl", "total_ctl"}) {
    auto col = doc.column(name);
    if (!col) throw InputError(std::string("table CSV is missing column ") + name);
    cols.push_back(*col);
  }
  std::vector<ContingencyTable> tables;
  std::size_t line = 1;
  for (const auto& row : doc.rows) {
    ++line;
    if (row.size() < doc.header.size()) {
      throw InputError("table CSV row " + std::to_string(line) + " has too few columns");
    }
    tables.push_back(ContingencyTable::from_counts(
        row[cols[0]], parse_count(row[cols[1]], "events_trt"), parse_count(row[cols[2]], "total_trt"),
        parse_count(row[cols[3]], "events_ctl"), parse_count(row[cols[4]], "total_ctl")));
  }
  return tables;
}

std::vector<std::pair<std::string, double>> penalties_from_csv(std::string_view text) {
  const auto doc = parse_csv(text);
  auto id = doc.column("study_id");
  auto penalty = doc.column("penalty");
  if (!id || !penalty) throw InputError("CSV needs study_id and penalty columns");
  std::vector<std::pair<std::string, double>> out;
  for (const auto& row : doc.rows) {
    auto value = parse_decimal(row.at(*penalty));
    if (!value) throw InputError("penalty for " + row.at(*id) + " is not a number");
    out.emplace_back(row.at(*id), *value);
  }
  return out;
}

std::vector<ContingencyTable> tables_from_json(const Json& j) {
  if (j.is_object() && !j.contains("tables")) throw InputError("tables document needs a \"tables\" array");
  const Json& list = j.is_object() ? j["tables"] : j;
  if (!list.is_array()) throw InputError("tables must be an array");
  std::vector<ContingencyTable> tables;
  try {
    for (const auto& t : list) {
      tables.push_back(ContingencyTable::from_counts(
          t.at("study_id").get<std::string>(), t.at("events_trt").get<std::int64_t>(),
          t.at("total_trt").get<std::int64_t>(), t.at("events_ctl").get<std::int64_t>(),
          t.at("total_ctl").get<std::int64_t>()));
    }
  } catch (const Json::exception& e) {
    throw InputError(std::string("tables: ") + e.what());
  }
  return tables;
}

std::vector<ContingencyTable> load_tables(const std::string& path) {
  const std::string text = read_file(path);
  if (path.size() >= 4 && iequals(path.substr(path.size() - 4), ".csv")) return tables_from_csv(text);
  return tables_from_json(parse_json(text));
}

Json to_json(const std::vector<ContingencyTable>& tables) {
  Json out = Json::array();
  for (const auto& t : tables) {
    out.push_back({{"study_id", t.study_id},
                   {"events_trt", t.a},
                   {"total_trt", t.n1()},
                   {"events_ctl", t.c},
                   {"total_ctl", t.n0()}});
  }
  return {{"tables", out}};
}

double z_for_level(double level) {
  if (!(level > 0.0 && level < 1.0)) throw ConfigError("confidence level must lie in (0, 1)");
  if (level == 0.95) return 1.96;
  return boost::math::quantile(boost::math::normal_distribution<double>(), 0.5 + level / 2.0);
}

StudyRiskRatio per_study_rr(const ContingencyTable& t, double level) {
  const double z = z_for_level(level);
  StudyRiskRatio out;
  const Cells x = cells_of(t);
  if (t.a == 0 && t.c == 0) {
    out.marker = "no-events";
    return out;
  }
  if (t.c == 0) {
    out.marker = "zero-control-events";
    return out;
  }
  const double rr = (x.a / x.n1()) / (x.c / x.n0());
  if (t.a == 0) {
    out.marker = "zero-treatment-events";
    out.rr = 0.0;
    out.ci_low = 0.0;
    return out;
  }
  const double se = std::sqrt(1.0 / x.a - 1.0 / x.n1() + 1.0 / x.c - 1.0 / x.n0());
  out.rr = rr;
  out.ci_low = std::exp(std::log(rr) - z * se);
  out.ci_high = std::exp(std::log(rr) + z * se);
  return out;
}

PooledEstimate pool_ew_mh(const std::vector<ContingencyTable>& tables, const WeightVector& weights,
                          const PoolingOptions& options) {
  if (tables.empty()) throw InputError("at least one study table is required");
  const auto w = aligned_weights(tables, weights);
  PooledEstimate out;
  out.level = options.level;
  out.z = z_for_level(options.level);

  std::vector<Cells> cells;
  for (const auto& t : tables) {
    Cells x = cells_of(t);
    if (options.continuity_correction && has_zero_cell(t)) {
      x = {x.a + 0.5, x.b + 0.5, x.c + 0.5, x.d + 0.5};
      out.corrected_studies.push_back(t.study_id);
    }
    cells.push_back(x);
  }

  double numerator = 0.0;
  std::vector<double> u(tables.size());
  for (std::size_t i = 0; i < tables.size(); ++i) {
    const Cells& x = cells[i];
    const double n = x.n();
    out.a_w += w[i] * x.a * x.n0() / n;
    u[i] = w[i] * x.c * x.n1() / n;
    out.c_w += u[i];
    numerator += w[i] * w[i] * (x.a + x.d) * x.b * x.c / (n * n);
  }
  if (out.a_w == 0.0 || out.c_w == 0.0) {
    std::string side = out.c_w == 0.0 ? "C_w (control events)" : "A_w (treatment events)";
    throw EstimationError("weighted pooled side " + side +
                          " is zero; consider the continuity correction option");
  }

  out.theta_hat = out.a_w / out.c_w;
  out.log_theta = std::log(out.theta_hat);
  out.variance = numerator / (2.0 * out.a_w * out.c_w);
  const double half = out.z * std::sqrt(out.variance);
  out.ci_low = std::exp(out.log_theta - half);
  out.ci_high = std::exp(out.log_theta + half);

  for (std::size_t i = 0; i < tables.size(); ++i) {
    out.studies.push_back(
        {tables[i].study_id, w[i], per_study_rr(tables[i], options.level), 100.0 * u[i] / out.c_w});
  }
  return out;
}

std::vector<double> display_weights(const std::vector<ContingencyTable>& tables,
                                    const WeightVector& weights) {
  const auto w = aligned_weights(tables, weights);
  std::vector<double> u;
  double total = 0.0;
  for (std::size_t i = 0; i < tables.size(); ++i) {
    const Cells x = cells_of(tables[i]);
    u.push_back(w[i] * x.c * x.n1() / x.n());
    total += u.back();
  }
  if (total == 0.0) throw EstimationError("display weights undefined: every weighted control term is zero");
  for (auto& v : u) v = 100.0 * v / total;
  return u;
}

Json to_json(const StudyRiskRatio& rr) {
  Json j{{"rr", optional_number(rr.rr)},
         {"ci_low", optional_number(rr.ci_low)},
         {"ci_high", optional_number(rr.ci_high)}};
  if (!rr.marker.empty()) j["marker"] = rr.marker;
  return j;
}

Json to_json(const PooledEstimate& e) {
  Json studies = Json::array();
  for (const auto& s : e.studies) {
    Json row = to_json(s.rr);
    row["study_id"] = s.study_id;
    row["weight"] = s.weight;
    row["display_weight_percent"] = s.display_weight_percent;
    studies.push_back(std::move(row));
  }
  return {{"theta_hat", e.theta_hat},
          {"log_theta", e.log_theta},
          {"variance", e.variance},
          {"ci_low", e.ci_low},
          {"ci_high", e.ci_high},
          {"level", e.level},
          {"z", e.z},
          {"A_w", e.a_w},
          {"C_w", e.c_w},
          {"studies", studies},
          {"continuity_corrected", e.corrected_studies}};
}

// --- sensitivity -----------------------------------------------------------------

SweepGrid sweep_grid_from_json(const Json& j) {
  SweepGrid grid;
  try {
    grid.gammas = j.at("gamma").get<std::vector<double>>();
    grid.floors = j.at("floor").get<std::vector<double>>();
    for (const auto& m : j.value("pmax_mode", std::vector<std::string>{"attainable"})) {
      grid.modes.push_back(pmax_mode_from(m));
    }
  } catch (const Json::exception& e) {
    throw InputError(std::string("sweep grid: ") + e.what());
  }
  if (grid.gammas.empty() || grid.floors.empty() || grid.modes.empty()) {
    throw InputError("sweep grid needs at least one value per axis");
  }
  return grid;
}

Json to_json(const SweepGrid& grid) {
  std::vector<std::string> modes;
  for (auto m : grid.modes) modes.emplace_back(to_string(m));
  return {{"gamma", grid.gammas}, {"floor", grid.floors}, {"pmax_mode", modes}};
}

std::vector<SweepRow> sensitivity_sweep(const std::vector<ContingencyTable>& tables,
                                        const std::vector<StudyPenalty>& penalties,
                                        const SweepGrid& grid,
                                        std::optional<double> attainable_pmax,
                                        const PoolingOptions& options) {
  std::vector<SweepRow> rows;
  for (double gamma : grid.gammas) {
    for (double floor : grid.floors) {
      for (PmaxMode mode : grid.modes) {
        WeightParams params{gamma, floor, mode, std::nullopt};
        auto weights = compute_weights(penalties, params, attainable_pmax);
        auto estimate = pool_ew_mh(tables, weights, options);
        rows.push_back({params, std::move(weights), std::move(estimate)});
      }
    }
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "gamma,floor,pmax_mode,pmax,theta_hat,ci_low,ci_high";
  if (!rows.empty()) {
    for (const auto& s : rows.front().weights.studies) out += ",w_" + s.study_id;
  }
  out += "\n";
  auto num = [](double v) { return Json(v).dump(); };
  for (const auto& r : rows) {
    out += num(r.params.gamma) + "," + num(r.params.floor) + "," +
           std::string(to_string(r.params.pmax_mode)) + "," + num(r.weights.pmax) + "," +
           num(r.estimate.theta_hat) + "," + num(r.estimate.ci_low) + "," + num(r.estimate.ci_high);
    for (const auto& s : r.weights.studies) out += "," + num(s.weight);
    out += "\n";
  }
  return out;
}

Json to_json(const std::vector<SweepRow>& rows) {
  Json out = Json::array();
  for (const auto& r : rows) {
    out.push_back({{"params", to_json(r.params)},
                   {"weights", to_json(r.weights)},
                   {"estimate", to_json(r.estimate)}});
  }
  return {{"rows", out}};
}

// --- forest plots --------------------------------------------------------------

namespace {

Json forest_panel(const std::string& label, const PooledEstimate& e) {
  Json rows = Json::array();
  for (const auto& s : e.studies) {
    Json row = to_json(s.rr);
    row["study_id"] = s.study_id;
    row["weight_percent"] = s.display_weight_percent;
    rows.push_back(std::move(row));
  }
  return {{"label", label},
          {"rows", rows},
          {"pooled", {{"theta_hat", e.theta_hat}, {"ci_low", e.ci_low}, {"ci_high", e.ci_high}}}};
}

}  // namespace

Json forest_data(const PooledEstimate& classical, const PooledEstimate& weighted) {
  return {{"scale", "log"},
          {"level", weighted.level},
          {"panels", {forest_panel("classical", classical), forest_panel("eligibility-weighted", weighted)}}};
}

std::string render_forest_svg(const Json& forest) {
  constexpr double kPanelWidth = 480.0;
  constexpr double kLabelWidth = 170.0;
  constexpr double kPlotWidth = 220.0;
  constexpr double kRowHeight = 24.0;
  constexpr double kTop = 40.0;

  const auto& panels = forest.at("panels");
  double lo = 1.0;
  double hi = 1.0;
  std::size_t max_rows = 0;
  auto widen = [&](const Json& v) {
    if (v.is_number() && v.get<double>() > 0.0) {
      lo = std::min(lo, v.get<double>());
      hi = std::max(hi, v.get<double>());
    }
  };
  for (const auto& p : panels) {
    max_rows = std::max(max_rows, p.at("rows").size());
    for (const auto& r : p.at("rows")) {
      widen(r.value("ci_low", Json()));
      widen(r.value("ci_high", Json()));
      widen(r.value("rr", Json()));
    }
    widen(p.at("pooled").at("ci_low"));
    widen(p.at("pooled").at("ci_high"));
  }
  const double log_lo = std::log(lo) - 0.1;
  const double log_hi = std::log(hi) + 0.1;
  const double height = kTop + kRowHeight * static_cast<double>(max_rows + 2) + 30.0;
  const double width = kPanelWidth * static_cast<double>(panels.size());

  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fixed(width, 0) +
                    "\" height=\"" + fixed(height, 0) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  for (std::size_t pi = 0; pi < panels.size(); ++pi) {
    const auto& panel = panels[pi];
    const double x0 = kPanelWidth * static_cast<double>(pi);
    const double plot_x = x0 + kLabelWidth;
    auto xpos = [&](double v) {
      double clamped = std::clamp(std::log(v), log_lo, log_hi);
      return plot_x + kPlotWidth * (clamped - log_lo) / (log_hi - log_lo);
    };
    const double bottom = kTop + kRowHeight * static_cast<double>(max_rows + 1);
    svg += "  <text x=\"" + fixed(x0 + 10, 1) + "\" y=\"20\" font-weight=\"bold\">" +
           panel.at("label").get<std::string>() + "</text>\n";
    svg += "  <line x1=\"" + fixed(xpos(1.0), 1) + "\" y1=\"" + fixed(kTop - 10, 1) + "\" x2=\"" +
           fixed(xpos(1.0), 1) + "\" y2=\"" + fixed(bottom, 1) + "\" stroke=\"#888\"/>\n";

    std::size_t i = 0;
    for (const auto& row : panel.at("rows")) {
      const double y = kTop + kRowHeight * static_cast<double>(i++);
      svg += "  <text x=\"" + fixed(x0 + 10, 1) + "\" y=\"" + fixed(y + 4, 1) + "\">" +
             row.at("study_id").get<std::string>() + "</text>\n";
      const auto& rr = row.at("rr");
      if (!rr.is_number() || rr.get<double>() <= 0.0) continue;
      const auto& low = row.at("ci_low");
      const auto& high = row.at("ci_high");
      if (low.is_number() && high.is_number() && low.get<double>() > 0.0) {
        svg += "  <line x1=\"" + fixed(xpos(low.get<double>()), 1) + "\" y1=\"" + fixed(y, 1) +
               "\" x2=\"" + fixed(xpos(high.get<double>()), 1) + "\" y2=\"" + fixed(y, 1) +
               "\" stroke=\"black\"/>\n";
      }
      const double side = 4.0 + 0.16 * row.value("weight_percent", 0.0);
      svg += "  <rect x=\"" + fixed(xpos(rr.get<double>()) - side / 2, 1) + "\" y=\"" +
             fixed(y - side / 2, 1) + "\" width=\"" + fixed(side, 1) + "\" height=\"" +
             fixed(side, 1) + "\"/>\n";
      svg += "  <text x=\"" + fixed(plot_x + kPlotWidth + 8, 1) + "\" y=\"" + fixed(y + 4, 1) + "\">" +
             fixed(rr.get<double>(), 2) + " [" + (low.is_number() ? fixed(low.get<double>(), 2) : "-") +
             ", " + (high.is_number() ? fixed(high.get<double>(), 2) : "-") + "]</text>\n";
    }

    const auto& pooled = panel.at("pooled");
    const double y = kTop + kRowHeight * static_cast<double>(max_rows);
    const double t = pooled.at("theta_hat").get<double>();
    const double l = pooled.at("ci_low").get<double>();
    const double h = pooled.at("ci_high").get<double>();
    svg += "  <text x=\"" + fixed(x0 + 10, 1) + "\" y=\"" + fixed(y + 4, 1) +
           "\" font-weight=\"bold\">Pooled</text>\n";
    svg += "  <polygon points=\"" + fixed(xpos(l), 1) + "," + fixed(y, 1) + " " + fixed(xpos(t), 1) +
           "," + fixed(y - 6, 1) + " " + fixed(xpos(h), 1) + "," + fixed(y, 1) + " " +
           fixed(xpos(t), 1) + "," + fixed(y + 6, 1) + "\"/>\n";
    svg += "  <text x=\"" + fixed(plot_x + kPlotWidth + 8, 1) + "\" y=\"" + fixed(y + 4, 1) +
           "\" font-weight=\"bold\">" + fixed(t, 2) + " [" + fixed(l, 2) + ", " + fixed(h, 2) +
           "]</text>\n";
    svg += "  <text x=\"" + fixed(xpos(1.0) - 3, 1) + "\" y=\"" + fixed(bottom + 16, 1) +
           "\">1</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

// --- simulation ----------------------------------------------------------------

std::vector<SimulationPoint> simulate_consistency(const SimulationConfig& config) {
  if (config.replicates < 1) throw ConfigError("replicates must be positive");
  for (double p0 : config.control_risks) {
    if (!(p0 > 0.0) || config.theta * p0 >= 1.0) {
      throw ConfigError("control risks must be positive with theta * risk below 1");
    }
  }
  std::mt19937_64 rng(config.seed);
  std::vector<SimulationPoint> points;
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < config.control_risks.size(); ++i) ids.push_back("s" + std::to_string(i + 1));
  const WeightVector uniform = uniform_weights(ids);

  for (std::int64_t n : config.arm_sizes) {
    SimulationPoint point{n, 0.0, 0};
    double total_error = 0.0;
    int used = 0;
    for (int r = 0; r < config.replicates; ++r) {
      std::vector<ContingencyTable> tables;
      for (std::size_t i = 0; i < config.control_risks.size(); ++i) {
        const double p0 = config.control_risks[i];
        std::binomial_distribution<std::int64_t> treated(n, config.theta * p0);
        std::binomial_distribution<std::int64_t> control(n, p0);
        const std::int64_t a = treated(rng);
        const std::int64_t c = control(rng);
        tables.push_back(ContingencyTable::from_counts(ids[i], a, n, c, n));
      }
      try {
        total_error += std::abs(pool_ew_mh(tables, uniform).theta_hat - config.theta);
        ++used;
      } catch (const EstimationError&) {
        ++point.skipped;
      }
    }
    point.mean_abs_error = used > 0 ? total_error / used : std::numeric_limits<double>::infinity();
    points.push_back(point);
  }
  return points;
}

}  // namespace evsynth
