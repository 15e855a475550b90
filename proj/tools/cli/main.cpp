// evsynth command-line tool. Output is JSON unless --table is given;
// exit codes: 0 ok, 2 input/schema, 3 configuration/estimation/state.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "evsynth/drug_library.hpp"
#include "evsynth/eligibility.hpp"
#include "evsynth/error.hpp"
#include "evsynth/meta_analysis.hpp"
#include "evsynth/pipeline.hpp"
#include "evsynth/weighting.hpp"
#include "service.hpp"

using namespace evsynth;

namespace {

struct Globals {
  std::string parser = "reference";
  std::uint64_t seed = 20240101;
  bool table = false;
};

std::string fmt(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

void print_json(const Json& j) { std::cout << j.dump(2) << "\n"; }

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& part : split(text, ',')) {
    auto v = parse_decimal(trim(part));
    if (!v) throw InputError("not a number: \"" + part + "\"");
    out.push_back(*v);
  }
  return out;
}

// --- weight options shared by weights, meta, sweep and forest --------------------

struct WeightOptions {
  std::string penalties;       // inline "0,2.8,..."
  std::string penalties_file;  // penalize JSON output or CSV with a penalty column
  std::string ids;             // inline "a,b,..."
  double gamma = 0.5;
  double floor = 20.0;
  std::string pmax = "attainable";
  std::string rules;  // penalty rules, for attainable P_max

  void add_to(CLI::App* cmd, bool with_pmax = true) {
    cmd->add_option("--penalties", penalties, "Comma-separated penalties in study order");
    cmd->add_option("--penalties-file", penalties_file,
                    "Penalty source: output of 'penalize' or a CSV with study_id,penalty");
    cmd->add_option("--ids", ids, "Comma-separated study ids for --penalties");
    cmd->add_option("--gamma", gamma, "Steepness gamma (> 0)")->capture_default_str();
    cmd->add_option("--floor", floor, "Floor B in (0, 100]")->capture_default_str();
    if (with_pmax) {
      cmd->add_option("--pmax", pmax,
                      "attainable[:VALUE], observed, or an explicit value")->capture_default_str();
    }
    cmd->add_option("--rules", rules, "Penalty rules file (attainable P_max = sum of severities)");
  }

  /// Penalties in study order plus the attainable P_max when known.
  std::pair<std::vector<StudyPenalty>, std::optional<double>> load(
      const std::vector<std::string>& fallback_ids = {}, const std::string& tables_csv = "") const {
    std::vector<StudyPenalty> out;
    std::optional<double> attainable;
    if (!penalties.empty()) {
      const auto values = parse_number_list(penalties);
      std::vector<std::string> names;
      if (!ids.empty()) {
        for (const auto& s : split(ids, ',')) names.push_back(trim(s));
      } else if (fallback_ids.size() == values.size()) {
        names = fallback_ids;
      } else {
        for (std::size_t i = 0; i < values.size(); ++i) names.push_back("s" + std::to_string(i + 1));
      }
      if (names.size() != values.size()) throw InputError("--ids and --penalties differ in length");
      for (std::size_t i = 0; i < values.size(); ++i) out.push_back({names[i], values[i]});
    } else if (!penalties_file.empty()) {
      const std::string text = read_file(penalties_file);
      if (penalties_file.size() > 4 && penalties_file.substr(penalties_file.size() - 4) == ".csv") {
        for (const auto& [id, p] : penalties_from_csv(text)) out.push_back({id, p});
      } else {
        const Json j = parse_json(text);
        for (const auto& p : j.at("penalties")) {
          out.push_back({p.at("study_id").get<std::string>(), p.at("penalty").get<double>()});
        }
        if (j.contains("attainable_pmax")) attainable = j["attainable_pmax"].get<double>();
      }
    } else if (!tables_csv.empty()) {
      for (const auto& [id, p] : penalties_from_csv(read_file(tables_csv))) out.push_back({id, p});
    } else {
      throw InputError("no penalties given (use --penalties, --penalties-file or a table CSV with a penalty column)");
    }
    if (!rules.empty()) {
      attainable = attainable_penalty(penalty_rules_from_json(parse_json(read_file(rules)))).value();
    }
    return {out, attainable};
  }

  /// Parses --pmax; "attainable:3.3" supplies the attainable value inline.
  WeightParams params(std::optional<double>& attainable) const {
    WeightParams p;
    p.gamma = gamma;
    p.floor = floor;
    const std::string mode = to_lower(trim(pmax));
    const auto colon = mode.find(':');
    const std::string head = mode.substr(0, colon);
    const std::string tail = colon == std::string::npos ? "" : mode.substr(colon + 1);
    if (head == "attainable" || head == "observed") {
      p.pmax_mode = pmax_mode_from(head);
      if (!tail.empty()) {
        auto v = parse_decimal(tail);
        if (!v) throw ConfigError("--pmax: bad value \"" + tail + "\"");
        if (p.pmax_mode == PmaxMode::observed) throw ConfigError("--pmax observed takes no value");
        attainable = *v;
      }
    } else {
      auto v = parse_decimal(head == "explicit" ? tail : mode);
      if (!v) throw ConfigError("--pmax must be attainable[:VALUE], observed or a number");
      p.explicit_pmax = *v;
    }
    validate(p);
    return p;
  }

  WeightVector compute(const std::vector<std::string>& fallback_ids = {},
                       const std::string& tables_csv = "") const {
    auto [list, attainable] = load(fallback_ids, tables_csv);
    const WeightParams p = params(attainable);
    return compute_weights(list, p, attainable);
  }
};

bool is_csv(const std::string& path) {
  return path.size() > 4 && path.substr(path.size() - 4) == ".csv";
}

std::vector<std::string> ids_of(const std::vector<ContingencyTable>& tables) {
  std::vector<std::string> ids;
  for (const auto& t : tables) ids.push_back(t.study_id);
  return ids;
}

/// --weights uniform | eligibility | FILE (a WeightVector document).
WeightVector resolve_weights(const std::string& spec, const WeightOptions& opts,
                             const std::vector<ContingencyTable>& tables, const std::string& tables_path) {
  if (spec == "uniform") return uniform_weights(ids_of(tables));
  if (spec == "eligibility") return opts.compute(ids_of(tables), is_csv(tables_path) ? tables_path : "");
  return weight_vector_from_json(parse_json(read_file(spec)));
}

std::string rr_cell(const StudyRiskRatio& rr) {
  auto num = [](const std::optional<double>& v, const char* open) {
    return v ? fmt(*v, 2) : std::string(open);
  };
  return num(rr.rr, "inf") + " [" + num(rr.ci_low, "0") + ", " + num(rr.ci_high, "inf") + "]";
}

void print_estimate_table(const PooledEstimate& e) {
  std::printf("%-24s %-22s %8s\n", "Study", "RR [CI]", "Weight%");
  for (const auto& s : e.studies) {
    std::string cell = rr_cell(s.rr);
    if (!s.rr.marker.empty()) cell += " (" + s.rr.marker + ")";
    std::printf("%-24s %-22s %8.2f\n", s.study_id.c_str(), cell.c_str(), s.display_weight_percent);
  }
  std::printf("%-24s %s [%s, %s]\n", "Pooled", fmt(e.theta_hat, 2).c_str(), fmt(e.ci_low, 2).c_str(),
              fmt(e.ci_high, 2).c_str());
}

// --- commands ------------------------------------------------------------------------

Clock clock_for(const std::string& timestamp) {
  return timestamp.empty() ? system_clock() : fixed_clock(timestamp);
}

int cmd_ingest(const Globals& g, const std::string& dump, const std::string& source_tag,
               const std::string& out, const std::string& timestamp) {
  auto result = ingest_registry_dump(std::string_view(read_file(dump)), source_tag.empty() ? dump : source_tag,
                                     clock_for(timestamp));
  if (!out.empty()) write_file(out, to_json(result.corpus).dump(2) + "\n");
  if (g.table) {
    std::printf("studies %zu, accepted %zu, rejected %zu\n", result.report.study_count,
                result.report.accepted, result.report.rejected.size());
    for (const auto& r : result.report.rejected) std::printf("  #%zu %s\n", r.index, r.reason.c_str());
  } else {
    print_json(to_json(result.report));
  }
  return 0;
}

int cmd_prefilter(const Globals& g, const std::string& corpus_path, const std::string& out) {
  const Corpus corpus = load_corpus(corpus_path);
  auto [kept, report] = prefilter(corpus);
  if (!out.empty()) write_file(out, to_json(kept).dump(2) + "\n");
  if (g.table) {
    std::printf("%-28s %6zu\n", "input", report.input_count);
    for (const auto& [bucket, n] : report.removed) std::printf("%-28s %6zu\n", bucket.c_str(), n);
    std::printf("%-28s %6zu\n", "retained", report.retained_count);
  } else {
    print_json(to_json(report));
  }
  return 0;
}

int cmd_plan_validate(const std::string& path) {
  print_json(to_json(load_plan_set(path)));
  return 0;
}

struct FilterArgs {
  std::string corpus, plans, drug_library, audit, summaries, selected_out, rules, run_id = "cli";
  unsigned threads = 1;
  std::string membership = "all";
  std::string timestamp;
};

int cmd_filter(const Globals& g, const FilterArgs& a) {
  const Clock clock = clock_for(a.timestamp);
  const Corpus corpus = load_corpus(a.corpus, clock);
  const PlanSet plans = load_plan_set(a.plans);
  MembershipLibrary lists;
  if (!plans.membership_lists.empty()) {
    if (a.drug_library.empty()) throw ConfigError("plans reference membership lists; pass --drug-library");
    lists = MembershipLibrary::bind(DrugLibrary::load(a.drug_library), plans.membership_lists);
  }
  std::optional<RuleSet> rule_set;
  if (!a.rules.empty()) rule_set = rule_set_from_json(parse_json(read_file(a.rules)));
  auto parser = make_parser(g.parser);
  PipelineOptions options;
  options.threads = a.threads;
  options.policy.membership = a.membership == "any" ? MembershipMode::any : MembershipMode::all;
  options.rule_set = rule_set ? &*rule_set : nullptr;
  AuditLog audit(a.run_id, clock);
  const auto result = run_pipeline(corpus, plans.plans, *parser, lists, audit, options);

  std::vector<std::string> selected;
  for (const auto& t : result.selected.trials) selected.push_back(t.nct_id);
  if (!a.audit.empty()) write_file(a.audit, audit.to_jsonl());
  if (!a.selected_out.empty()) write_file(a.selected_out, to_json(result.selected).dump(2) + "\n");
  if (!a.summaries.empty()) {
    const auto summaries = summarize_selected(result.selected, *parser);
    write_file(a.summaries, is_csv(a.summaries) ? summaries_csv(summaries)
                                                : to_json(summaries).dump(2) + "\n");
  }
  if (g.table) {
    std::cout << render_prisma_table(result.flow);
  } else {
    print_json({{"flow", to_json(result.flow)}, {"selected", selected}, {"audit_digest", audit.digest()}});
  }
  return 0;
}

int cmd_structure(const Globals& g, const std::string& corpus_path, const std::string& labels_path,
                  const std::string& out) {
  const Corpus corpus = load_corpus(corpus_path);
  const Json labels = labels_path.empty() ? Json::object() : parse_json(read_file(labels_path));
  auto parser = make_parser(g.parser);
  std::vector<TrialCriteria> set;
  Json flags = Json::object();
  for (const auto& t : corpus.trials) {
    auto result = structure_criteria(t, *parser);
    if (!result.flags.empty()) flags[t.nct_id] = result.flags;
    set.push_back({t.nct_id, labels.value(t.nct_id, ""), std::move(result.criteria)});
  }
  Json doc = to_json(set);
  if (!out.empty()) write_file(out, doc.dump(2) + "\n");
  if (g.table) {
    for (const auto& t : set) {
      std::printf("%s %s\n", t.trial_id.c_str(), t.label.c_str());
      for (const auto& c : t.criteria) {
        std::printf("  %-9s %-22s %-40s %s\n", std::string(to_string(c.kind)).c_str(),
                    c.entity.empty() ? "?" : c.entity.c_str(), c.attribute.c_str(), c.value.c_str());
      }
    }
  } else {
    doc["flags"] = flags;
    print_json(doc);
  }
  return 0;
}

int cmd_penalize(const Globals& g, const std::string& criteria_path, const std::string& rules_path,
                 const std::string& target_id) {
  const auto set = criteria_set_from_json(parse_json(read_file(criteria_path)));
  const auto rules = penalty_rules_from_json(parse_json(read_file(rules_path)));
  const TrialCriteria* target = nullptr;
  for (const auto& t : set) {
    if (t.trial_id == target_id || t.label == target_id) target = &t;
  }
  if (!target) throw InputError("target " + target_id + " is not in the criteria set");
  Json scores = Json::array();
  Json penalties = Json::array();
  for (const auto& t : set) {
    const auto score = evaluate_penalties(t.trial_id, rules, t.criteria, target->criteria);
    Json s = to_json(score);
    s["label"] = t.label;
    scores.push_back(s);
    penalties.push_back({{"study_id", t.label.empty() ? t.trial_id : t.label}, {"penalty", score.total.value()}});
    if (g.table) {
      std::vector<std::string> ids;
      for (const auto& r : score.triggered) ids.push_back(r.rule_id);
      std::printf("%-14s %-24s %5.1f  %s\n", t.trial_id.c_str(), t.label.c_str(), score.total.value(),
                  join(ids, "+").c_str());
    }
  }
  if (!g.table) {
    print_json({{"target", target->trial_id},
                {"attainable_pmax", attainable_penalty(rules).value()},
                {"penalties", penalties},
                {"scores", scores}});
  }
  return 0;
}

int cmd_weights(const Globals& g, const WeightOptions& opts, bool json) {
  const WeightVector w = opts.compute();
  if (json) {
    print_json(to_json(w));
  } else if (g.table) {
    std::printf("%-24s %6s %8s %8s %8s\n", "Study", "p", "f", "S", "w");
    for (const auto& s : w.studies) {
      std::printf("%-24s %6.2f %8.4f %8.2f %8.4f\n", s.study_id.c_str(), s.penalty, s.compatibility,
                  s.score, s.weight);
    }
    std::printf("P_max %s (%s)\n", fmt(w.pmax, 4).c_str(), w.pmax_source.c_str());
  } else {
    std::vector<std::string> parts;
    for (const auto& s : w.studies) parts.push_back(fmt(s.weight, 4));
    std::cout << join(parts, " ") << "\n";
  }
  for (const auto& warning : w.warnings) std::cerr << "warning: " << warning << "\n";
  return 0;
}

int cmd_meta(const Globals& g, const std::string& tables_path, const std::string& weights_spec,
             const WeightOptions& opts, const PoolingOptions& pooling) {
  const auto tables = load_tables(tables_path);
  const auto weights = resolve_weights(weights_spec, opts, tables, tables_path);
  const auto estimate = pool_ew_mh(tables, weights, pooling);
  if (g.table) {
    print_estimate_table(estimate);
  } else {
    print_json(to_json(estimate));
  }
  return 0;
}

int cmd_sweep(const Globals& g, const std::string& tables_path, const std::string& grid_path,
              const WeightOptions& opts, const PoolingOptions& pooling, bool csv) {
  const auto tables = load_tables(tables_path);
  auto [penalties, attainable] = opts.load(ids_of(tables), is_csv(tables_path) ? tables_path : "");
  if (!opts.pmax.empty()) {
    const auto colon = opts.pmax.find(':');
    if (colon != std::string::npos) {
      auto v = parse_decimal(opts.pmax.substr(colon + 1));
      if (!v) throw ConfigError("--pmax: bad value");
      attainable = *v;
    }
  }
  const SweepGrid grid = grid_path.empty() ? SweepGrid{{0.5}, {20.0}, {PmaxMode::attainable}}
                                           : sweep_grid_from_json(parse_json(read_file(grid_path)));
  const auto rows = sensitivity_sweep(tables, penalties, grid, attainable, pooling);
  if (csv) {
    std::cout << sweep_csv(rows);
  } else if (g.table) {
    std::printf("%6s %6s %-10s %8s %8s %8s\n", "gamma", "floor", "pmax", "theta", "low", "high");
    for (const auto& r : rows) {
      std::printf("%6.2f %6.1f %-10s %8.3f %8.3f %8.3f\n", r.params.gamma, r.params.floor,
                  std::string(to_string(r.params.pmax_mode)).c_str(), r.estimate.theta_hat,
                  r.estimate.ci_low, r.estimate.ci_high);
    }
  } else {
    print_json(to_json(rows));
  }
  return 0;
}

int cmd_forest(const Globals&, const std::string& tables_path, const std::string& weights_spec,
               const WeightOptions& opts, const PoolingOptions& pooling, const std::string& svg) {
  const auto tables = load_tables(tables_path);
  const auto weighted = pool_ew_mh(tables, resolve_weights(weights_spec, opts, tables, tables_path), pooling);
  const auto classical = pool_ew_mh(tables, uniform_weights(ids_of(tables)), pooling);
  const Json data = forest_data(classical, weighted);
  if (!svg.empty()) write_file(svg, render_forest_svg(data));
  print_json(data);
  return 0;
}

int cmd_simulate(const Globals& g, int replicates, double theta, const std::string& arm_sizes) {
  SimulationConfig config;
  config.seed = g.seed;
  config.replicates = replicates;
  config.theta = theta;
  if (!arm_sizes.empty()) {
    config.arm_sizes.clear();
    for (double v : parse_number_list(arm_sizes)) config.arm_sizes.push_back(static_cast<std::int64_t>(v));
  }
  const auto points = simulate_consistency(config);
  if (g.table) {
    std::printf("%10s %16s %8s\n", "arm_size", "mean_abs_error", "skipped");
    for (const auto& p : points) std::printf("%10lld %16.6f %8d\n", static_cast<long long>(p.arm_size), p.mean_abs_error, p.skipped);
    return 0;
  }
  Json out = Json::array();
  for (const auto& p : points) {
    out.push_back({{"arm_size", p.arm_size}, {"mean_abs_error", p.mean_abs_error}, {"skipped", p.skipped}});
  }
  print_json({{"seed", config.seed}, {"theta", config.theta}, {"replicates", config.replicates}, {"points", out}});
  return 0;
}

int cmd_drugs_import(const std::string& library_path, const std::string& document_path) {
  DrugLibrary library;
  if (std::ifstream(library_path).good()) library = DrugLibrary::load(library_path);
  const auto report = library.import_list(parse_json(read_file(document_path)));
  library.save(library_path);
  print_json(to_json(report));
  return 0;
}

int cmd_drugs_lookup(const std::string& library_path, const std::string& disease) {
  const auto list = DrugLibrary::load(library_path).lookup(disease);
  if (!list) throw NotFoundError("no drug list for \"" + disease + "\"");
  print_json(to_json(*list));
  return 0;
}

int cmd_serve(const Globals& g, const std::string& config_path, const std::string& bind, int port,
              bool parser_given) {
  std::string path = config_path;
  if (path.empty()) {
    if (const char* env = std::getenv("EVSYNTH_CONFIG")) path = env;
  }
  service::ServiceConfig config = path.empty() ? service::ServiceConfig{} : service::ServiceConfig::load(path);
  config.apply_environment();
  if (parser_given) config.parser = g.parser;
  if (!bind.empty()) config.bind = bind;
  if (port > 0) config.port = port;
  std::cerr << "evsynth serving on " << config.bind << ":" << config.port << "\n";
  return service::serve(config);
}

int exit_code(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::input:
    case ErrorCategory::schema:
    case ErrorCategory::not_found: return 2;
    case ErrorCategory::configuration:
    case ErrorCategory::estimation:
    case ErrorCategory::state: return 3;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"evsynth: eligibility-aware trial selection and weighted meta-analysis"};
  app.name("evsynth");
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  auto* parser_opt = app.add_option("--parser", g.parser, "Extraction parser: reference, replay:PATH or remote:CONFIG")
                         ->capture_default_str();
  app.add_option("--seed", g.seed, "Seed for stochastic commands")->capture_default_str();
  app.add_flag("--table", g.table, "Render human-readable tables instead of JSON");

  // ingest
  std::string dump, source_tag, out, timestamp;
  auto* ingest = app.add_subcommand("ingest", "Normalize a registry dump into a corpus");
  ingest->add_option("dump", dump, "Registry dump (JSON array or {studies: [...]})")->required();
  ingest->add_option("--source-tag", source_tag, "Provenance tag stored with the corpus");
  ingest->add_option("-o,--out", out, "Write the corpus here");
  ingest->add_option("--timestamp", timestamp, "Fixed ingestion timestamp");

  // prefilter
  std::string corpus;
  auto* pre = app.add_subcommand("prefilter", "Apply the structured prefilter");
  pre->add_option("corpus", corpus, "Corpus or registry dump")->required();
  pre->add_option("-o,--out", out, "Write the retained corpus here");

  // plan-validate
  std::string plans;
  auto* validate_cmd = app.add_subcommand("plan-validate", "Validate a plan set and print it normalized");
  validate_cmd->add_option("plans", plans, "Plan set, plan array or single plan")->required();

  // filter
  FilterArgs fa;
  auto* filter = app.add_subcommand("filter", "Run the prefilter and every plan stage over a corpus");
  filter->add_option("--corpus", fa.corpus, "Corpus or registry dump")->required();
  filter->add_option("--plans", fa.plans, "Plan set")->required();
  filter->add_option("--drug-library", fa.drug_library, "Drug library for in_list plans");
  filter->add_option("--rules", fa.rules, "Rule set; execution requires it to be approved");
  filter->add_option("--audit", fa.audit, "Write the audit log (JSON lines)");
  filter->add_option("--summaries", fa.summaries, "Write trial summaries (.csv or JSON)");
  filter->add_option("--selected-out", fa.selected_out, "Write the selected corpus");
  filter->add_option("--threads", fa.threads, "Worker threads per stage")->capture_default_str();
  filter->add_option("--membership", fa.membership, "in_list membership: all or any")
      ->check(CLI::IsMember({"all", "any"}))
      ->capture_default_str();
  filter->add_option("--run-id", fa.run_id, "Run id recorded in audit events")->capture_default_str();
  filter->add_option("--timestamp", fa.timestamp, "Fixed audit timestamp");

  // structure-criteria
  std::string labels;
  auto* structure = app.add_subcommand("structure-criteria", "Structure eligibility text into criterion tuples");
  structure->add_option("--corpus", corpus, "Corpus or registry dump")->required();
  structure->add_option("--labels", labels, "JSON map of trial id to study label");
  structure->add_option("-o,--out", out, "Write the criteria set here");

  // penalize
  std::string criteria, rules, target;
  auto* penalize = app.add_subcommand("penalize", "Score structured criteria against penalty rules");
  penalize->add_option("--criteria", criteria, "Criteria set")->required();
  penalize->add_option("--rules", rules, "Penalty rules")->required();
  penalize->add_option("--target", target, "Target trial id or label")->required();

  // weights
  WeightOptions wo;
  bool json_out = false;
  auto* weights = app.add_subcommand("weights", "Compute eligibility weights from penalties");
  wo.add_to(weights);
  weights->add_flag("--json", json_out, "Print the full weight vector as JSON");

  // meta
  std::string tables, weights_spec = "uniform";
  PoolingOptions pooling;
  auto* meta = app.add_subcommand("meta", "Pool risk ratios with Mantel-Haenszel weights");
  meta->add_option("--tables", tables, "Contingency tables (.csv or JSON)")->required();
  meta->add_option("--weights", weights_spec, "uniform, eligibility, or a weight vector file")
      ->capture_default_str();
  meta->add_option("--level", pooling.level, "Confidence level")->capture_default_str();
  meta->add_flag("--continuity-correction", pooling.continuity_correction,
                 "Add 0.5 to every cell of tables with a zero cell");
  WeightOptions meta_wo;
  meta_wo.add_to(meta);

  // sweep
  std::string grid;
  bool csv = false;
  auto* sweep = app.add_subcommand("sweep", "Sensitivity sweep over gamma, floor and P_max mode");
  sweep->add_option("--tables", tables, "Contingency tables (.csv or JSON)")->required();
  sweep->add_option("--grid", grid, "Grid: {gamma: [...], floor: [...], pmax_mode: [...]}");
  sweep->add_option("--level", pooling.level, "Confidence level")->capture_default_str();
  sweep->add_flag("--csv", csv, "Print CSV instead of JSON");
  WeightOptions sweep_wo;
  sweep_wo.add_to(sweep);

  // forest
  std::string svg;
  auto* forest = app.add_subcommand("forest", "Forest plot data for classical and weighted pooling");
  forest->add_option("--tables", tables, "Contingency tables (.csv or JSON)")->required();
  forest->add_option("--weights", weights_spec, "uniform, eligibility, or a weight vector file")
      ->capture_default_str();
  forest->add_option("--level", pooling.level, "Confidence level")->capture_default_str();
  forest->add_option("--svg", svg, "Also write an SVG rendering");
  WeightOptions forest_wo;
  forest_wo.add_to(forest);

  // serve
  std::string config_path, bind;
  int port = 0;
  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  serve->add_option("--config", config_path, "Service config (default: $EVSYNTH_CONFIG)");
  serve->add_option("--bind", bind, "Bind address");
  serve->add_option("--port", port, "Port");

  // simulate
  int replicates = 500;
  double theta = 2.0;
  std::string arm_sizes;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo consistency check of the pooled estimator");
  simulate->add_option("--replicates", replicates, "Replicates per arm size")->capture_default_str();
  simulate->add_option("--theta", theta, "True risk ratio")->capture_default_str();
  simulate->add_option("--arm-sizes", arm_sizes, "Comma-separated arm sizes (default 100,1000,10000)");

  // drugs
  std::string library, document, disease;
  auto* drugs = app.add_subcommand("drugs", "Manage the approved-drug library");
  drugs->require_subcommand(1);
  auto* drugs_import = drugs->add_subcommand("import", "Import a drug list document as a new version");
  drugs_import->add_option("--library", library, "Library file (created if missing)")->required();
  drugs_import->add_option("--document", document, "Import document")->required();
  auto* drugs_lookup = drugs->add_subcommand("lookup", "Print the current list for a disease");
  drugs_lookup->add_option("--library", library, "Library file")->required();
  drugs_lookup->add_option("--disease", disease, "Disease key")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*ingest) return cmd_ingest(g, dump, source_tag, out, timestamp);
    if (*pre) return cmd_prefilter(g, corpus, out);
    if (*validate_cmd) return cmd_plan_validate(plans);
    if (*filter) return cmd_filter(g, fa);
    if (*structure) return cmd_structure(g, corpus, labels, out);
    if (*penalize) return cmd_penalize(g, criteria, rules, target);
    if (*weights) return cmd_weights(g, wo, json_out);
    if (*meta) return cmd_meta(g, tables, weights_spec, meta_wo, pooling);
    if (*sweep) return cmd_sweep(g, tables, grid, sweep_wo, pooling, csv);
    if (*forest) return cmd_forest(g, tables, weights_spec, forest_wo, pooling, svg);
    if (*simulate) return cmd_simulate(g, replicates, theta, arm_sizes);
    if (*drugs_import) return cmd_drugs_import(library, document);
    if (*drugs_lookup) return cmd_drugs_lookup(library, disease);
    if (*serve) return cmd_serve(g, config_path, bind, port, parser_opt->count() > 0);
  } catch (const SchemaError& e) {
    std::cerr << "error: " << e.what() << "\n";
    for (const auto& v : e.violations()) std::cerr << "  " << (v.pointer.empty() ? "/" : v.pointer) << ": " << v.message << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
