#include <gtest/gtest.h>

#include <filesystem>
#include <thread>

#include <httplib.h>

#include "evsynth/error.hpp"
#include "evsynth/meta_analysis.hpp"
#include "service.hpp"

using namespace evsynth;
using namespace evsynth::service;
namespace fs = std::filesystem;

namespace {

const std::string kRoot = std::string(EVSYNTH_SOURCE_DIR);

ServiceConfig test_config(const std::string& runs_dir) {
  ServiceConfig c;
  c.corpus_root = kRoot + "/tests/fixtures";
  c.runs_dir = runs_dir;
  c.parser = "replay:" + kRoot + "/tests/fixtures/gastric_replay.json";
  c.drug_library = kRoot + "/data/gastric/drug_library.json";
  c.threads = 2;
  return c;
}

/// Service on an ephemeral loopback port with a fresh runs directory.
class ServiceFixture : public ::testing::Test {
 protected:
  void SetUp() override {
    runs_dir_ = (fs::path(::testing::TempDir()) /
                 ("evsynth_runs_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name())))
                    .string();
    fs::remove_all(runs_dir_);
    start();
  }
  void TearDown() override {
    stop();
    fs::remove_all(runs_dir_);
  }

  void start() {
    service_ = std::make_unique<Service>(test_config(runs_dir_), fixed_clock("2024-01-01T00:00:00Z"));
    server_ = std::make_unique<httplib::Server>();
    service_->register_routes(*server_);
    port_ = server_->bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
  }
  void stop() {
    server_->stop();
    thread_.join();
  }

  std::pair<int, Json> call(const std::string& method, const std::string& path, const Json& body = nullptr) {
    httplib::Result r;
    const std::string text = body.is_null() ? "" : body.dump();
    if (method == "GET") r = client_->Get(path);
    if (method == "POST") r = client_->Post(path, text, "application/json");
    if (method == "PUT") r = client_->Put(path, text, "application/json");
    EXPECT_TRUE(r) << method << " " << path;
    if (!r) return {0, nullptr};
    return {r->status, r->body.empty() ? Json() : Json::parse(r->body)};
  }

  Json create_gastric_run() {
    const Json query = parse_json(read_file(kRoot + "/data/gastric/query.json"));
    auto [status, run] = call("POST", "/runs",
                              {{"query", query["query"]},
                               {"corpus", "gastric_corpus.json"},
                               {"rules", query["rules"]},
                               {"plans", parse_json(read_file(kRoot + "/data/gastric/plans.json"))}});
    EXPECT_EQ(status, 201) << run.dump();
    return run;
  }

  std::string runs_dir_;
  std::unique_ptr<Service> service_;
  std::unique_ptr<httplib::Server> server_;
  std::unique_ptr<httplib::Client> client_;
  std::thread thread_;
  int port_ = 0;
};

Json olaparib_tables() { return to_json(load_tables(kRoot + "/data/olaparib/tables.csv"))["tables"]; }

Json olaparib_penalties() {
  Json out = Json::array();
  for (const auto& [id, p] : penalties_from_csv(read_file(kRoot + "/data/olaparib/tables.csv"))) {
    out.push_back({{"study_id", id}, {"penalty", p}});
  }
  return out;
}

}  // namespace

TEST_F(ServiceFixture, FullReviewFlow) {
  const Json run = create_gastric_run();
  const std::string base = "/runs/" + run["run_id"].get<std::string>();
  EXPECT_EQ(run["state"], "draft");
  EXPECT_EQ(run["rules"]["rules"].size(), 6u);

  // Analysis before filtering is a state conflict.
  EXPECT_EQ(call("POST", base + "/execute").first, 409);
  EXPECT_EQ(call("GET", base + "/prisma").first, 409);

  Json rules = call("GET", base + "/rules").second;
  rules["rules"][0]["text"] = "Include trials that study gastric or gastroesophageal junction cancer";
  auto [put_status, edited] = call("PUT", base + "/rules", rules);
  EXPECT_EQ(put_status, 200);
  EXPECT_EQ(edited["revision"], 2);

  EXPECT_EQ(call("POST", base + "/rules/approve").second["state"], "rules-approved");
  EXPECT_EQ(call("PUT", base + "/rules", rules).first, 409);

  auto [exec_status, executed] = call("POST", base + "/execute");
  ASSERT_EQ(exec_status, 200) << executed.dump();
  const Json labels = parse_json(read_file(kRoot + "/tests/fixtures/gastric_labels.json"));
  EXPECT_EQ(executed["flow"], labels["flow"]);
  EXPECT_EQ(executed["selected"], labels["selected"]);
  EXPECT_EQ(call("POST", base + "/execute").first, 409);

  const Json prisma = call("GET", base + "/prisma").second;
  EXPECT_EQ(prisma["final_count"], 9);
  EXPECT_EQ(prisma["table"], render_prisma_table(prisma_flow_from_json(labels["flow"])));

  const Json trials = call("GET", base + "/trials").second;
  EXPECT_EQ(trials["summaries"].size(), 9u);
  EXPECT_EQ(trials["columns"].size(), 9u);
  EXPECT_FALSE(trials["events"].empty());

  // Penalties scored server-side from structured criteria.
  auto [scored_status, scored] =
      call("POST", base + "/weights",
           {{"criteria", parse_json(read_file(kRoot + "/data/olaparib/structured_criteria.json"))},
            {"penalty_rules", parse_json(read_file(kRoot + "/data/olaparib/penalty_rules.json"))},
            {"target", "Golan 2019"}});
  ASSERT_EQ(scored_status, 200) << scored.dump();
  EXPECT_DOUBLE_EQ(scored["pmax"].get<double>(), 3.3);
  EXPECT_EQ(scored["studies"].size(), 5u);

  auto [w_status, weights] =
      call("POST", base + "/weights", {{"penalties", olaparib_penalties()}, {"attainable_pmax", 3.3}, {"gamma", 0.5}});
  ASSERT_EQ(w_status, 200);
  std::vector<StudyPenalty> p;
  for (const auto& x : olaparib_penalties()) p.push_back({x["study_id"], x["penalty"]});
  EXPECT_EQ(weights, to_json(compute_weights(p, WeightParams{}, 3.3)));

  auto [m_status, estimate] = call("POST", base + "/meta", {{"tables", olaparib_tables()}});
  ASSERT_EQ(m_status, 200) << estimate.dump();
  const auto tables = load_tables(kRoot + "/data/olaparib/tables.csv");
  EXPECT_EQ(estimate.dump(), to_json(pool_ew_mh(tables, compute_weights(p, WeightParams{}, 3.3))).dump());
  EXPECT_NEAR(estimate["theta_hat"].get<double>(), 1.97, 0.005);

  const Json csv_uniform =
      call("POST", base + "/meta", {{"tables", read_file(kRoot + "/data/olaparib/tables.csv")}, {"weights", "uniform"}})
          .second;
  EXPECT_NEAR(csv_uniform["theta_hat"].get<double>(), 2.18, 0.005);

  const Json stored = call("GET", base).second;
  EXPECT_EQ(stored["state"], "analyzed");
  EXPECT_TRUE(stored["estimates"].contains("forest"));

  auto [s_status, sweep] = call("POST", base + "/sweep",
                                {{"tables", olaparib_tables()},
                                 {"penalties", olaparib_penalties()},
                                 {"attainable_pmax", 3.3},
                                 {"grid", {{"gamma", {0.5}}, {"floor", {20, 100}}, {"pmax_mode", {"attainable"}}}}});
  ASSERT_EQ(s_status, 200) << sweep.dump();
  EXPECT_EQ(sweep["rows"].size(), 2u);
}

TEST_F(ServiceFixture, ErrorMapping) {
  EXPECT_EQ(call("GET", "/runs/run-999999").first, 404);
  EXPECT_EQ(call("POST", "/runs", {{"query", "q"}, {"corpus", "../../etc/passwd"}, {"rules", {"Include a"}}}).first,
            400);
  EXPECT_EQ(call("POST", "/runs", {{"query", "q"}, {"corpus", "missing.json"}, {"rules", {"Include a"}}}).first, 404);
  EXPECT_EQ(call("POST", "/runs", {{"query", "q"}, {"corpus", "gastric_corpus.json"}}).first, 400);

  auto [status, body] = call("POST", "/runs",
                             {{"query", "q"},
                              {"corpus", "gastric_corpus.json"},
                              {"rules", {"Include a"}},
                              {"plans", Json::array({{{"filter_name", "Bad Name"}}})}});
  EXPECT_EQ(status, 422);
  ASSERT_TRUE(body.contains("violations"));
  EXPECT_EQ(body["violations"][0]["pointer"].get<std::string>().rfind("/0/", 0), 0u);

  auto r = client_->Post("/runs", "{\"query\": ", "application/json");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 400);
  EXPECT_TRUE(Json::parse(r->body).contains("byte_offset"));
}

TEST_F(ServiceFixture, ExecuteWithoutPlansConflicts) {
  auto [status, run] =
      call("POST", "/runs", {{"query", "q"}, {"corpus", "gastric_corpus.json"}, {"rules", {"Include a"}}});
  ASSERT_EQ(status, 201);
  const std::string base = "/runs/" + run["run_id"].get<std::string>();
  call("POST", base + "/rules/approve");
  EXPECT_EQ(call("POST", base + "/rules/approve").first, 409);
  EXPECT_EQ(call("POST", base + "/execute").first, 409);
}

TEST_F(ServiceFixture, CorsHeaders) {
  auto r = client_->Options("/runs");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 204);
  EXPECT_EQ(r->get_header_value("Access-Control-Allow-Origin"), "*");
}

TEST_F(ServiceFixture, RunsSurviveRestart) {
  const Json run = create_gastric_run();
  const std::string id = run["run_id"];
  call("POST", "/runs/" + id + "/rules/approve");
  call("POST", "/runs/" + id + "/execute");
  const auto before = service_->store().audit(id);
  stop();
  start();
  const Json reloaded = call("GET", "/runs/" + id).second;
  EXPECT_EQ(reloaded["state"], "filtered");
  EXPECT_EQ(reloaded["selected"].size(), 9u);
  const auto after = service_->store().audit(id);
  ASSERT_EQ(after.size(), before.size());
  EXPECT_EQ(to_json(after.back()), to_json(before.back()));
  const Json second = create_gastric_run();
  EXPECT_NE(second["run_id"], run["run_id"]);
  EXPECT_TRUE(fs::exists(fs::path(runs_dir_) / id / "audit.jsonl"));
  EXPECT_TRUE(fs::exists(fs::path(runs_dir_) / id / "snapshot-000001.json"));
}

TEST(ServiceConfig, FileThenEnvironment) {
  const std::string path = ::testing::TempDir() + "evsynth_service.json";
  write_file(path, R"({"port": 9000, "parser": "reference", "corpus_root": "/data"})");
  ServiceConfig config = ServiceConfig::load(path);
  EXPECT_EQ(config.port, 9000);
  ::setenv("EVSYNTH_PORT", "9100", 1);
  ::setenv("EVSYNTH_CORPUS_ROOT", "/srv", 1);
  config.apply_environment();
  EXPECT_EQ(config.port, 9100);
  EXPECT_EQ(config.corpus_root, "/srv");
  ::setenv("EVSYNTH_PORT", "not-a-port", 1);
  EXPECT_THROW(config.apply_environment(), ConfigError);
  ::unsetenv("EVSYNTH_PORT");
  ::unsetenv("EVSYNTH_CORPUS_ROOT");
  EXPECT_THROW(ServiceConfig::from_json(Json::array()), ConfigError);
}

TEST(RunState, Names) {
  for (RunState s : {RunState::draft, RunState::rules_approved, RunState::filtered, RunState::analyzed}) {
    EXPECT_EQ(run_state_from(to_string(s)), s);
  }
}
