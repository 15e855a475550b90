#include <benchmark/benchmark.h>

#include <random>

#include "evsynth/drug_library.hpp"
#include "evsynth/meta_analysis.hpp"
#include "evsynth/pipeline.hpp"
#include "evsynth/weighting.hpp"

using namespace evsynth;

namespace {

const std::string kRoot = EVSYNTH_SOURCE_DIR;

std::vector<StudyPenalty> penalties(std::size_t k) {
  std::mt19937_64 rng(k);
  std::uniform_int_distribution<int> tenths(0, 33);
  std::vector<StudyPenalty> out;
  for (std::size_t i = 0; i < k; ++i) out.push_back({"S" + std::to_string(i), tenths(rng) / 10.0});
  return out;
}

std::vector<ContingencyTable> tables(std::size_t k) {
  std::mt19937_64 rng(k + 1);
  std::uniform_int_distribution<std::int64_t> events(5, 60);
  std::vector<ContingencyTable> out;
  for (std::size_t i = 0; i < k; ++i) {
    out.push_back(ContingencyTable::from_counts("S" + std::to_string(i), events(rng), 200, events(rng), 200));
  }
  return out;
}

void BM_Weights(benchmark::State& state) {
  const auto p = penalties(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(compute_weights(p, WeightParams{}, 3.3));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Weights)->RangeMultiplier(4)->Range(4, 4096)->Complexity();

void BM_PoolEwMh(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  const auto t = tables(k);
  const auto w = compute_weights(penalties(k), WeightParams{}, 3.3);
  for (auto _ : state) benchmark::DoNotOptimize(pool_ew_mh(t, w));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_PoolEwMh)->RangeMultiplier(4)->Range(4, 4096)->Complexity();

void BM_Sweep(benchmark::State& state) {
  const auto t = load_tables(kRoot + "/data/olaparib/tables.csv");
  std::vector<StudyPenalty> p;
  for (const auto& [id, v] : penalties_from_csv(read_file(kRoot + "/data/olaparib/tables.csv"))) p.push_back({id, v});
  const auto grid = sweep_grid_from_json(parse_json(read_file(kRoot + "/data/olaparib/sweep_grid.json")));
  for (auto _ : state) benchmark::DoNotOptimize(sensitivity_sweep(t, p, grid, 3.3));
}
BENCHMARK(BM_Sweep);

void BM_GastricPipeline(benchmark::State& state) {
  const Clock clock = fixed_clock("2024-01-01T00:00:00Z");
  const Corpus corpus = load_corpus(kRoot + "/tests/fixtures/gastric_corpus.json", clock);
  const PlanSet plans = load_plan_set(kRoot + "/data/gastric/plans.json");
  DrugLibrary library;
  library.import_list(parse_json(read_file(kRoot + "/data/gastric/drug_import.json")));
  const auto lists = MembershipLibrary::bind(library, plans.membership_lists);
  ReplayParser parser(ReplayFixture::load(kRoot + "/tests/fixtures/gastric_replay.json"));
  PipelineOptions options;
  options.threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) {
    AuditLog audit("bench", clock);
    benchmark::DoNotOptimize(run_pipeline(corpus, plans.plans, parser, lists, audit, options));
  }
}
BENCHMARK(BM_GastricPipeline)->Arg(1)->Arg(4)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
