#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>

#include "evsynth/audit.hpp"
#include "evsynth/pipeline.hpp"
#include "evsynth/util.hpp"

namespace httplib {
class Server;
}

namespace evsynth::service {

/// Loaded from the JSON file named by EVSYNTH_CONFIG (or --config), then
/// overridden by EVSYNTH_BIND, EVSYNTH_PORT, EVSYNTH_CORPUS_ROOT,
/// EVSYNTH_PARSER, EVSYNTH_RUNS_DIR, EVSYNTH_DRUG_LIBRARY, EVSYNTH_GENERATOR
/// and EVSYNTH_CORS_ORIGIN.
struct ServiceConfig {
  std::string bind = "127.0.0.1";
  int port = 8080;
  std::string corpus_root = ".";
  std::string runs_dir = "runs";
  std::string parser = "reference";
  std::string drug_library;  // library file for in_list plans
  std::string generator;     // optional generation adapter spec
  std::string cors_origin = "*";
  unsigned threads = 1;

  static ServiceConfig from_json(const Json& j);
  static ServiceConfig load(const std::string& path);
  /// Applies environment overrides in place.
  void apply_environment();
};

enum class RunState { draft, rules_approved, filtered, analyzed };
std::string_view to_string(RunState state);
RunState run_state_from(std::string_view text);

struct Run {
  std::string run_id;
  std::string query;
  std::string corpus_ref;
  RunState state = RunState::draft;
  RuleSet rules;
  Json plan_set = Json::object();  // validated plan-set document
  std::optional<PrismaFlow> flow;
  std::vector<std::string> selected;
  Json summaries = Json::array();
  Json weight_params;   // null until weights are posted
  Json weights;         // WeightVector document
  Json estimates;       // {weighted, classical, forest}
  std::string created_at;
};

Json to_json(const Run& run);
Run run_from_json(const Json& j);

/// On-disk store: <runs_dir>/<run_id>/snapshot-NNNNNN.json (never rewritten)
/// and audit.jsonl (appended). Reads see immutable snapshots; mutations of
/// one run are serialized by a per-run lock.
class RunStore {
 public:
  RunStore(std::string runs_dir, Clock clock);

  std::shared_ptr<const Run> create(Run run);
  [[nodiscard]] std::shared_ptr<const Run> get(const std::string& run_id) const;
  [[nodiscard]] std::vector<std::shared_ptr<const Run>> list() const;

  /// Runs `mutate` on a private copy under the run lock, persists the
  /// result and any audit events it appended, then publishes it.
  template <typename F>
  std::shared_ptr<const Run> update(const std::string& run_id, F&& mutate);

  [[nodiscard]] std::vector<AuditEvent> audit(const std::string& run_id) const;

 private:
  struct Entry {
    std::mutex write_mutex;
    std::shared_ptr<const Run> snapshot;
    std::unique_ptr<AuditLog> audit;
    std::uint64_t persisted_sequence = 1;
    int snapshot_count = 0;
  };

  Entry& entry(const std::string& run_id) const;
  void persist(const std::string& run_id, Entry& e, const Run& run);
  void load_existing();

  std::string runs_dir_;
  Clock clock_;
  mutable std::shared_mutex map_mutex_;
  std::map<std::string, std::unique_ptr<Entry>> entries_;
  int next_id_ = 1;
};

template <typename F>
std::shared_ptr<const Run> RunStore::update(const std::string& run_id, F&& mutate) {
  Entry& e = entry(run_id);
  std::lock_guard lock(e.write_mutex);
  auto next = std::make_shared<Run>(*std::atomic_load(&e.snapshot));
  mutate(*next, *e.audit);
  persist(run_id, e, *next);
  std::shared_ptr<const Run> published = next;
  std::atomic_store(&e.snapshot, published);
  return published;
}

/// Route handlers over a RunStore. Thread-safe; one instance serves all
/// connections.
class Service {
 public:
  Service(ServiceConfig config, Clock clock = system_clock());

  void register_routes(httplib::Server& server);
  [[nodiscard]] const ServiceConfig& config() const { return config_; }
  RunStore& store() { return store_; }

 private:
  std::string resolve_under_root(const std::string& ref) const;

  ServiceConfig config_;
  Clock clock_;
  RunStore store_;
};

/// Blocks serving on config.bind:config.port.
int serve(const ServiceConfig& config);

}  // namespace evsynth::service
