#include "service.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>

#include <httplib.h>

#include "evsynth/drug_library.hpp"
#include "evsynth/eligibility.hpp"
#include "evsynth/error.hpp"
#include "evsynth/meta_analysis.hpp"
#include "evsynth/weighting.hpp"

namespace fs = std::filesystem;

namespace evsynth::service {

// --- config ---------------------------------------------------------------------

ServiceConfig ServiceConfig::from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("service config must be a JSON object");
  ServiceConfig c;
  try {
    c.bind = j.value("bind", c.bind);
    c.port = j.value("port", c.port);
    c.corpus_root = j.value("corpus_root", c.corpus_root);
    c.runs_dir = j.value("runs_dir", c.runs_dir);
    c.parser = j.value("parser", c.parser);
    c.drug_library = j.value("drug_library", c.drug_library);
    c.generator = j.value("generator", c.generator);
    c.cors_origin = j.value("cors_origin", c.cors_origin);
    c.threads = j.value("threads", c.threads);
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("service config: ") + e.what());
  }
  return c;
}

ServiceConfig ServiceConfig::load(const std::string& path) {
  return from_json(parse_json(read_file(path)));
}

void ServiceConfig::apply_environment() {
  auto env = [](const char* name) -> std::optional<std::string> {
    const char* v = std::getenv(name);
    if (!v || !*v) return std::nullopt;
    return std::string(v);
  };
  if (auto v = env("EVSYNTH_BIND")) bind = *v;
  if (auto v = env("EVSYNTH_PORT")) {
    try {
      port = std::stoi(*v);
    } catch (const std::exception&) {
      throw ConfigError("EVSYNTH_PORT must be an integer");
    }
  }
  if (auto v = env("EVSYNTH_CORPUS_ROOT")) corpus_root = *v;
  if (auto v = env("EVSYNTH_PARSER")) parser = *v;
  if (auto v = env("EVSYNTH_RUNS_DIR")) runs_dir = *v;
  if (auto v = env("EVSYNTH_DRUG_LIBRARY")) drug_library = *v;
  if (auto v = env("EVSYNTH_GENERATOR")) generator = *v;
  if (auto v = env("EVSYNTH_CORS_ORIGIN")) cors_origin = *v;
}

// --- runs -------------------------------------------------------------------------

std::string_view to_string(RunState state) {
  switch (state) {
    case RunState::draft: return "draft";
    case RunState::rules_approved: return "rules-approved";
    case RunState::filtered: return "filtered";
    case RunState::analyzed: return "analyzed";
  }
  return "draft";
}

RunState run_state_from(std::string_view text) {
  for (auto s : {RunState::draft, RunState::rules_approved, RunState::filtered, RunState::analyzed}) {
    if (text == to_string(s)) return s;
  }
  throw InputError("unknown run state " + std::string(text));
}

Json to_json(const Run& run) {
  Json j{{"run_id", run.run_id},
         {"query", run.query},
         {"corpus", run.corpus_ref},
         {"state", to_string(run.state)},
         {"rules", to_json(run.rules)},
         {"plan_set", run.plan_set},
         {"selected", run.selected},
         {"summaries", run.summaries},
         {"weight_params", run.weight_params},
         {"weights", run.weights},
         {"estimates", run.estimates},
         {"created_at", run.created_at}};
  j["flow"] = run.flow ? to_json(*run.flow) : Json();
  return j;
}

Run run_from_json(const Json& j) {
  Run r;
  r.run_id = j.at("run_id").get<std::string>();
  r.query = j.value("query", "");
  r.corpus_ref = j.value("corpus", "");
  r.state = run_state_from(j.value("state", "draft"));
  r.rules = rule_set_from_json(j.at("rules"));
  r.plan_set = j.value("plan_set", Json::object());
  if (j.contains("flow") && !j["flow"].is_null()) r.flow = prisma_flow_from_json(j["flow"]);
  r.selected = j.value("selected", std::vector<std::string>{});
  r.summaries = j.value("summaries", Json::array());
  r.weight_params = j.value("weight_params", Json());
  r.weights = j.value("weights", Json());
  r.estimates = j.value("estimates", Json());
  r.created_at = j.value("created_at", "");
  return r;
}

RunStore::RunStore(std::string runs_dir, Clock clock)
    : runs_dir_(std::move(runs_dir)), clock_(std::move(clock)) {
  fs::create_directories(runs_dir_);
  load_existing();
}

void RunStore::load_existing() {
  for (const auto& dir : fs::directory_iterator(runs_dir_)) {
    if (!dir.is_directory()) continue;
    std::vector<fs::path> snapshots;
    for (const auto& f : fs::directory_iterator(dir.path())) {
      if (f.path().filename().string().rfind("snapshot-", 0) == 0) snapshots.push_back(f.path());
    }
    if (snapshots.empty()) continue;
    std::sort(snapshots.begin(), snapshots.end());
    auto run = std::make_shared<const Run>(run_from_json(parse_json(read_file(snapshots.back().string()))));
    auto e = std::make_unique<Entry>();
    std::vector<AuditEvent> events;
    const auto audit_path = dir.path() / "audit.jsonl";
    if (fs::exists(audit_path)) events = parse_audit_jsonl(read_file(audit_path.string()));
    const std::uint64_t next = events.empty() ? 1 : events.back().sequence + 1;
    e->audit = std::make_unique<AuditLog>(run->run_id, clock_, std::move(events));
    e->persisted_sequence = next;
    e->snapshot_count = static_cast<int>(snapshots.size());
    e->snapshot = run;
    int n = 0;
    if (std::sscanf(run->run_id.c_str(), "run-%d", &n) == 1) next_id_ = std::max(next_id_, n + 1);
    entries_.emplace(run->run_id, std::move(e));
  }
}

RunStore::Entry& RunStore::entry(const std::string& run_id) const {
  std::shared_lock lock(map_mutex_);
  auto it = entries_.find(run_id);
  if (it == entries_.end()) throw NotFoundError("no run " + run_id);
  return *it->second;
}

void RunStore::persist(const std::string& run_id, Entry& e, const Run& run) {
  const fs::path dir = fs::path(runs_dir_) / run_id;
  fs::create_directories(dir);
  const std::string lines = e.audit->to_jsonl(e.persisted_sequence);
  if (!lines.empty()) {
    std::ofstream out(dir / "audit.jsonl", std::ios::app | std::ios::binary);
    out << lines;
    if (!out) throw ConfigError("cannot append audit log for " + run_id);
  }
  e.persisted_sequence = e.audit->next_sequence();
  char name[32];
  std::snprintf(name, sizeof name, "snapshot-%06d.json", ++e.snapshot_count);
  const fs::path tmp = dir / (std::string(name) + ".tmp");
  write_file(tmp.string(), to_json(run).dump(2) + "\n");
  fs::rename(tmp, dir / name);
}

std::shared_ptr<const Run> RunStore::create(Run run) {
  std::unique_lock lock(map_mutex_);
  char id[32];
  std::snprintf(id, sizeof id, "run-%06d", next_id_++);
  run.run_id = id;
  run.created_at = clock_();
  auto e = std::make_unique<Entry>();
  e->audit = std::make_unique<AuditLog>(run.run_id, clock_);
  for (const auto& rule : run.rules.rules) {
    e->audit->append(AuditKind::rule_created, {{"revision", run.rules.revision}, {"rule", to_json(rule)}});
  }
  persist(run.run_id, *e, run);
  auto snapshot = std::make_shared<const Run>(std::move(run));
  e->snapshot = snapshot;
  entries_.emplace(snapshot->run_id, std::move(e));
  return snapshot;
}

std::shared_ptr<const Run> RunStore::get(const std::string& run_id) const {
  return std::atomic_load(&entry(run_id).snapshot);
}

std::vector<std::shared_ptr<const Run>> RunStore::list() const {
  std::shared_lock lock(map_mutex_);
  std::vector<std::shared_ptr<const Run>> out;
  for (const auto& [id, e] : entries_) out.push_back(std::atomic_load(&e->snapshot));
  return out;
}

std::vector<AuditEvent> RunStore::audit(const std::string& run_id) const {
  return entry(run_id).audit->events();
}

// --- http ----------------------------------------------------------------------------

namespace {

constexpr const char* kJson = "application/json";

void send(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), kJson);
}

Json error_body(const std::string& message) { return {{"error", message}}; }

int status_for(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::input: return 400;
    case ErrorCategory::schema: return 422;
    case ErrorCategory::configuration: return 422;
    case ErrorCategory::estimation: return 422;
    case ErrorCategory::state: return 409;
    case ErrorCategory::not_found: return 404;
  }
  return 500;
}

template <typename F>
void guarded(httplib::Response& res, F&& body) {
  try {
    body();
  } catch (const SchemaError& e) {
    Json violations = Json::array();
    for (const auto& v : e.violations()) {
      violations.push_back({{"pointer", v.pointer}, {"message", v.message}});
    }
    Json j = error_body(e.what());
    j["violations"] = violations;
    send(res, 422, j);
  } catch (const ParseError& e) {
    Json j = error_body(e.what());
    j["byte_offset"] = e.byte_offset();
    send(res, 400, j);
  } catch (const Error& e) {
    send(res, status_for(e.category()), error_body(e.what()));
  } catch (const Json::exception& e) {
    send(res, 400, error_body(std::string("malformed request: ") + e.what()));
  } catch (const std::exception& e) {
    send(res, 500, error_body(e.what()));
  }
}

Json body_json(const httplib::Request& req) {
  if (req.body.empty()) return Json::object();
  Json j = parse_json(req.body);
  if (!j.is_object()) throw InputError("request body must be a JSON object");
  return j;
}

void require_state(const Run& run, RunState at_least, const char* what) {
  if (run.state < at_least) {
    throw StateError(std::string(what) + " needs state " + std::string(to_string(at_least)) +
                     " or later; run " + run.run_id + " is " + std::string(to_string(run.state)));
  }
}

std::vector<ContingencyTable> tables_from_request(const Json& body) {
  if (!body.contains("tables")) throw InputError("request needs \"tables\"");
  const Json& t = body["tables"];
  if (t.is_string()) return tables_from_csv(t.get<std::string>());
  return tables_from_json(t);
}

/// Penalties come either as [{study_id, penalty}] or as
/// {criteria, penalty_rules, target} to be scored here.
std::pair<std::vector<StudyPenalty>, std::optional<double>> penalties_from_request(const Json& body) {
  std::vector<StudyPenalty> out;
  std::optional<double> attainable;
  if (body.contains("attainable_pmax") && !body["attainable_pmax"].is_null()) {
    attainable = body["attainable_pmax"].get<double>();
  }
  if (body.contains("penalties")) {
    for (const auto& p : body["penalties"]) {
      out.push_back({p.at("study_id").get<std::string>(), p.at("penalty").get<double>()});
    }
    return {out, attainable};
  }
  if (!body.contains("criteria") || !body.contains("penalty_rules") || !body.contains("target")) {
    throw InputError("request needs \"penalties\" or {criteria, penalty_rules, target}");
  }
  const auto set = criteria_set_from_json(body["criteria"]);
  const auto rules = penalty_rules_from_json(body["penalty_rules"]);
  const auto target_id = body["target"].get<std::string>();
  const TrialCriteria* target = nullptr;
  for (const auto& t : set) {
    if (t.trial_id == target_id || t.label == target_id) target = &t;
  }
  if (!target) throw InputError("target " + target_id + " is not in the criteria set");
  for (const auto& t : set) {
    const auto score = evaluate_penalties(t.trial_id, rules, t.criteria, target->criteria);
    out.push_back({t.label.empty() ? t.trial_id : t.label, score.total.value()});
  }
  if (!attainable) attainable = attainable_penalty(rules).value();
  return {out, attainable};
}

WeightParams params_from_request(const Json& body) {
  Json p = body.value("params", Json::object());
  for (const char* key : {"gamma", "floor", "pmax_mode", "explicit_pmax"}) {
    if (body.contains(key)) p[key] = body[key];
  }
  return weight_params_from_json(p);
}

WeightVector weights_from_request(const Json& body, const Run& run,
                                  const std::vector<ContingencyTable>& tables) {
  if (body.contains("weights")) {
    const Json& w = body["weights"];
    if (w.is_string() && w.get<std::string>() == "uniform") {
      std::vector<std::string> ids;
      for (const auto& t : tables) ids.push_back(t.study_id);
      return uniform_weights(ids);
    }
    return weight_vector_from_json(w);
  }
  if (run.weights.is_null()) throw StateError("no weights computed for run " + run.run_id);
  return weight_vector_from_json(run.weights);
}

PoolingOptions pooling_from_request(const Json& body) {
  PoolingOptions o;
  o.level = body.value("level", o.level);
  o.continuity_correction = body.value("continuity_correction", o.continuity_correction);
  return o;
}

}  // namespace

Service::Service(ServiceConfig config, Clock clock)
    : config_(std::move(config)), clock_(clock), store_(config_.runs_dir, clock) {}

std::string Service::resolve_under_root(const std::string& ref) const {
  const fs::path root = fs::weakly_canonical(config_.corpus_root);
  const fs::path p = fs::weakly_canonical(root / ref);
  const auto rel = p.lexically_relative(root);
  if (ref.empty() || rel.empty() || *rel.begin() == "..") {
    throw InputError("corpus reference must name a file under the corpus root");
  }
  if (!fs::exists(p)) throw NotFoundError("no corpus " + ref);
  return p.string();
}

void Service::register_routes(httplib::Server& server) {
  const std::string origin = config_.cors_origin;
  server.set_post_routing_handler([origin](const httplib::Request&, httplib::Response& res) {
    if (!origin.empty()) {
      res.set_header("Access-Control-Allow-Origin", origin);
      res.set_header("Access-Control-Allow-Methods", "GET, POST, PUT, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type");
    }
  });
  server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  server.Get("/runs", [this](const httplib::Request&, httplib::Response& res) {
    guarded(res, [&] {
      Json runs = Json::array();
      for (const auto& r : store_.list()) {
        runs.push_back({{"run_id", r->run_id}, {"state", to_string(r->state)}, {"query", r->query}});
      }
      send(res, 200, {{"runs", runs}});
    });
  });

  server.Post("/runs", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const Json body = body_json(req);
      Run run;
      run.query = body.value("query", "");
      run.corpus_ref = body.value("corpus", "");
      resolve_under_root(run.corpus_ref);
      if (body.contains("plans")) run.plan_set = to_json(validate_plan_set(body["plans"]));
      if (body.contains("rules")) {
        run.rules = rule_set_from_json(body["rules"]);
        run.rules.status = RuleSetStatus::draft;
      } else if (!config_.generator.empty()) {
        auto generator = make_generator(config_.generator);
        run.rules = generate_rules(run.query, *generator);
      } else {
        throw InputError("request needs \"rules\" when no rule generator is configured");
      }
      send(res, 201, to_json(*store_.create(std::move(run))));
    });
  });

  server.Get(R"(/runs/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { send(res, 200, to_json(*store_.get(req.matches[1]))); });
  });

  server.Get(R"(/runs/([^/]+)/rules)", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { send(res, 200, to_json(store_.get(req.matches[1])->rules)); });
  });

  server.Put(R"(/runs/([^/]+)/rules)", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const RuleSet incoming = rule_set_from_json(parse_json(req.body));
      auto run = store_.update(req.matches[1], [&](Run& r, AuditLog& audit) {
        edit_rules(r.rules, incoming.rules, &audit);
      });
      send(res, 200, to_json(run->rules));
    });
  });

  server.Post(R"(/runs/([^/]+)/rules/approve)", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      auto run = store_.update(req.matches[1], [&](Run& r, AuditLog& audit) {
        approve_rules(r.rules, &audit);
        r.state = RunState::rules_approved;
      });
      send(res, 200, to_json(*run));
    });
  });

  server.Post(R"(/runs/([^/]+)/execute)", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      auto run = store_.update(req.matches[1], [&](Run& r, AuditLog& audit) {
        require_state(r, RunState::rules_approved, "execute");
        if (r.state != RunState::rules_approved) throw StateError("run " + r.run_id + " was already executed");
        if (!r.plan_set.contains("plans")) throw StateError("run " + r.run_id + " has no approved plans");
        const PlanSet plans = validate_plan_set(r.plan_set);
        if (plans.plans.empty()) throw StateError("run " + r.run_id + " has no approved plans");
        const Corpus corpus = load_corpus(resolve_under_root(r.corpus_ref), clock_);
        MembershipLibrary lists;
        if (!plans.membership_lists.empty()) {
          if (config_.drug_library.empty()) throw ConfigError("plans use membership lists but no drug library is configured");
          lists = MembershipLibrary::bind(DrugLibrary::load(config_.drug_library), plans.membership_lists);
        }
        auto parser = make_parser(config_.parser);
        PipelineOptions options;
        options.threads = config_.threads;
        options.rule_set = &r.rules;
        const auto result = run_pipeline(corpus, plans.plans, *parser, lists, audit, options);
        r.flow = result.flow;
        r.selected.clear();
        for (const auto& t : result.selected.trials) r.selected.push_back(t.nct_id);
        r.summaries = to_json(summarize_selected(result.selected, *parser));
        r.state = RunState::filtered;
      });
      send(res, 200, {{"run_id", run->run_id}, {"state", to_string(run->state)},
                      {"flow", to_json(*run->flow)}, {"selected", run->selected}});
    });
  });

  server.Get(R"(/runs/([^/]+)/prisma)", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      auto run = store_.get(req.matches[1]);
      require_state(*run, RunState::filtered, "prisma");
      Json j = to_json(*run->flow);
      j["table"] = render_prisma_table(*run->flow);
      send(res, 200, j);
    });
  });

  server.Get(R"(/runs/([^/]+)/trials)", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const std::string id = req.matches[1];
      auto run = store_.get(id);
      require_state(*run, RunState::filtered, "trials");
      Json verdicts = Json::array();
      for (const auto& e : store_.audit(id)) {
        if (e.kind == AuditKind::verdict || e.kind == AuditKind::extraction) verdicts.push_back(to_json(e));
      }
      send(res, 200, {{"summaries", run->summaries},
                      {"columns", summary_columns()},
                      {"selected", run->selected},
                      {"events", verdicts}});
    });
  });

  server.Post(R"(/runs/([^/]+)/weights)", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const Json body = body_json(req);
      const auto [penalties, attainable] = penalties_from_request(body);
      const WeightParams params = params_from_request(body);
      WeightVector weights;
      auto run = store_.update(req.matches[1], [&](Run& r, AuditLog& audit) {
        require_state(r, RunState::filtered, "weights");
        weights = compute_weights(penalties, params, attainable);
        r.weight_params = to_json(params);
        r.weights = to_json(weights);
        audit.append(AuditKind::weights, r.weights);
      });
      send(res, 200, to_json(weights));
    });
  });

  server.Post(R"(/runs/([^/]+)/meta)", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const Json body = body_json(req);
      const auto tables = tables_from_request(body);
      const auto options = pooling_from_request(body);
      PooledEstimate estimate;
      Json response;
      store_.update(req.matches[1], [&](Run& r, AuditLog& audit) {
        require_state(r, RunState::filtered, "meta");
        const WeightVector weights = weights_from_request(body, r, tables);
        estimate = pool_ew_mh(tables, weights, options);
        std::vector<std::string> ids;
        for (const auto& t : tables) ids.push_back(t.study_id);
        const PooledEstimate classical = pool_ew_mh(tables, uniform_weights(ids), options);
        response = to_json(estimate);
        r.estimates = {{"weighted", response},
                       {"classical", to_json(classical)},
                       {"forest", forest_data(classical, estimate)}};
        r.state = RunState::analyzed;
        audit.append(AuditKind::estimate, r.estimates["weighted"]);
      });
      send(res, 200, response);
    });
  });

  server.Post(R"(/runs/([^/]+)/sweep)", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const Json body = body_json(req);
      const auto tables = tables_from_request(body);
      const auto [penalties, attainable] = penalties_from_request(body);
      if (!body.contains("grid")) throw InputError("request needs \"grid\"");
      const SweepGrid grid = sweep_grid_from_json(body["grid"]);
      auto run = store_.get(req.matches[1]);
      require_state(*run, RunState::filtered, "sweep");
      const auto rows = sensitivity_sweep(tables, penalties, grid, attainable, pooling_from_request(body));
      send(res, 200, to_json(rows));
    });
  });
}

int serve(const ServiceConfig& config) {
  Service service(config);
  httplib::Server server;
  service.register_routes(server);
  if (!server.bind_to_port(config.bind, config.port)) {
    throw ConfigError("cannot bind " + config.bind + ":" + std::to_string(config.port));
  }
  server.listen_after_bind();
  return 0;
}

}  // namespace evsynth::service
