#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>

#include "evsynth/util.hpp"

using namespace evsynth;

namespace {

const std::string kRoot = std::string(EVSYNTH_SOURCE_DIR);

struct Ran {
  int code = -1;
  std::string out;
};

/// Runs the CLI from the source root with stderr discarded.
Ran run(const std::string& args) {
  const std::string command = "cd '" + kRoot + "' && '" + std::string(EVSYNTH_CLI_PATH) + "' " + args + " 2>/dev/null";
  Ran r;
  FILE* pipe = ::popen(command.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buffer{};
  std::size_t n = 0;
  while ((n = std::fread(buffer.data(), 1, buffer.size(), pipe)) > 0) r.out.append(buffer.data(), n);
  const int status = ::pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

}  // namespace

TEST(Cli, HelpMatchesGolden) {
  const Ran r = run("--help");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, read_file(kRoot + "/tests/golden/cli_help.txt"));
}

TEST(Cli, WeightsPlainLine) {
  const Ran r = run("weights --penalties 0,2.8,1.8,2.8 --gamma 0.5 --floor 20 --pmax attainable:3.3");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "0.5207 0.1323 0.2147 0.1323\n");
  const Ran json = run("weights --penalties 0,2.8 --pmax observed --json");
  EXPECT_EQ(json.code, 0);
  EXPECT_EQ(parse_json(json.out)["pmax_source"], "observed");
}

TEST(Cli, MetaUniformAndEligibility) {
  Ran r = run("meta --tables data/olaparib/tables.csv --weights uniform");
  ASSERT_EQ(r.code, 0);
  EXPECT_NEAR(parse_json(r.out)["theta_hat"].get<double>(), 2.18, 0.005);
  r = run("meta --tables data/olaparib/tables.csv --weights eligibility --pmax attainable:3.3");
  ASSERT_EQ(r.code, 0);
  EXPECT_NEAR(parse_json(r.out)["theta_hat"].get<double>(), 1.97, 0.005);
}

TEST(Cli, PenalizeFromDataFiles) {
  const Ran r = run(
      "penalize --criteria data/olaparib/structured_criteria.json --rules data/olaparib/penalty_rules.json "
      "--target 'Golan 2019'");
  ASSERT_EQ(r.code, 0);
  const Json j = parse_json(r.out);
  EXPECT_DOUBLE_EQ(j["attainable_pmax"].get<double>(), 3.3);
  EXPECT_EQ(j["penalties"].size(), 5u);
}

TEST(Cli, FilterTable) {
  const Ran r = run(
      "--table --parser replay:tests/fixtures/gastric_replay.json filter --corpus tests/fixtures/gastric_corpus.json "
      "--plans data/gastric/plans.json --drug-library data/gastric/drug_library.json");
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("fda_approved_drugs_only                               9           1"), std::string::npos);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("bogus").code, 2);
  EXPECT_EQ(run("meta --tables missing.csv --weights uniform").code, 2);
  EXPECT_EQ(run("weights --penalties 0,1 --gamma 0 --pmax observed").code, 3);
  EXPECT_EQ(run("plan-validate tests/fixtures/prefilter_labels.json").code, 2);
  EXPECT_EQ(run("filter --corpus tests/fixtures/gastric_corpus.json --plans data/gastric/plans.json").code, 3);
}
