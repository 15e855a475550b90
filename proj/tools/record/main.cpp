// evsynth-record: turns hand-labelled answer files into digest-keyed replay
// fixtures, so fixtures never need hand-computed hashes.

#include <iostream>

#include <CLI11.hpp>

#include "evsynth/eligibility.hpp"
#include "evsynth/error.hpp"
#include "evsynth/pipeline.hpp"
#include "evsynth/plan.hpp"
#include "evsynth/trial.hpp"

using namespace evsynth;

namespace {

Clock epoch() { return fixed_clock("1970-01-01T00:00:00Z"); }

/// answers: {nct_id: {filter_name: [raw answer per condition]}}
void record_plans(const std::string& corpus_path, const std::vector<std::string>& plan_paths,
                  const std::string& answers_path, const std::string& out) {
  const Corpus corpus = load_corpus(corpus_path, epoch());
  std::map<std::string, FunctionPlan> plans;
  for (const auto& path : plan_paths) {
    for (auto& plan : load_plan_set(path).plans) plans.emplace(plan.filter_name, std::move(plan));
  }
  const Json answers = parse_json(read_file(answers_path));
  ReplayFixture fixture;
  for (const auto& [nct_id, per_plan] : answers.items()) {
    const TrialRecord* trial = corpus.find(nct_id);
    if (!trial) throw InputError("answers name unknown trial " + nct_id);
    for (const auto& [filter_name, raw] : per_plan.items()) {
      auto it = plans.find(filter_name);
      if (it == plans.end()) throw InputError("answers name unknown plan " + filter_name);
      if (raw.size() > it->second.conditions.size()) {
        throw InputError(nct_id + "/" + filter_name + " has more answers than conditions");
      }
      for (std::size_t i = 0; i < raw.size(); ++i) {
        const auto& c = it->second.conditions[i];
        ExtractionRequest request{c.llm_instruction, attended_text(*trial, c.fields_to_attend),
                                  expected_kind(c)};
        fixture.responses[request_digest(request)] = raw[i].get<std::string>();
      }
    }
  }
  fixture.save(out);
}

/// annotations: {nct_id: [{"starts_with": text, "tuple": {...} | null}]}
void record_structuring(const std::string& corpus_path, const std::string& annotations_path,
                        const std::string& labels_path, const std::string& out_replay,
                        const std::string& out_criteria) {
  const Corpus corpus = load_corpus(corpus_path, epoch());
  const Json annotations = parse_json(read_file(annotations_path));
  const Json labels = labels_path.empty() ? Json::object() : parse_json(read_file(labels_path));
  ReplayFixture fixture;
  for (const auto& [nct_id, items] : annotations.items()) {
    const TrialRecord* trial = corpus.find(nct_id);
    if (!trial) throw InputError("annotations name unknown trial " + nct_id);
    const auto clauses = split_criteria(trial->eligibility_text);
    if (clauses.size() != items.size()) {
      throw InputError(nct_id + ": " + std::to_string(items.size()) + " annotations for " +
                       std::to_string(clauses.size()) + " clauses");
    }
    for (std::size_t i = 0; i < clauses.size(); ++i) {
      const auto prefix = items[i].at("starts_with").get<std::string>();
      if (clauses[i].sentence.rfind(prefix, 0) != 0) {
        throw InputError(nct_id + " clause " + std::to_string(i) + " does not start with \"" + prefix +
                         "\": " + clauses[i].sentence);
      }
      const Json& tuple = items[i].at("tuple");
      ExtractionRequest request{kStructureCriterionInstruction, clauses[i].sentence,
                                ExpectedKind::phrase_or_none};
      fixture.responses[request_digest(request)] = tuple.is_null() ? "None" : tuple.dump();
    }
  }
  fixture.save(out_replay);

  ReplayParser parser(fixture);
  std::vector<TrialCriteria> set;
  for (const auto& [nct_id, items] : annotations.items()) {
    auto result = structure_criteria(*corpus.find(nct_id), parser);
    set.push_back({nct_id, labels.value(nct_id, ""), std::move(result.criteria)});
  }
  write_file(out_criteria, to_json(set).dump(2) + "\n");
}

/// answers: {"rules": {query: text}, "plan": {rule: text}}
void record_generation(const std::string& answers_path, const std::string& out) {
  const Json answers = parse_json(read_file(answers_path));
  ReplayFixture fixture;
  for (const auto& [task, table] : answers.items()) {
    const GenerationTask kind = task == "plan" ? GenerationTask::plan : GenerationTask::rules;
    for (const auto& [input, text] : table.items()) {
      fixture.responses[generation_digest(kind, input)] = text.get<std::string>();
    }
  }
  fixture.save(out);
}

void dump_clauses(const std::string& corpus_path) {
  const Corpus corpus = load_corpus(corpus_path, epoch());
  for (const auto& t : corpus.trials) {
    std::cout << "== " << t.nct_id << "\n";
    const auto clauses = split_criteria(t.eligibility_text);
    for (std::size_t i = 0; i < clauses.size(); ++i) {
      std::cout << i << " [" << to_string(clauses[i].kind) << "] " << clauses[i].sentence << "\n";
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Build digest-keyed replay fixtures from hand-labelled answers"};
  app.require_subcommand(1);

  std::string corpus, answers, out, annotations, labels, out_criteria;
  std::vector<std::string> plans;

  auto* plans_cmd = app.add_subcommand("plans", "Replay fixture for plan conditions");
  plans_cmd->add_option("--corpus", corpus)->required();
  plans_cmd->add_option("--plans", plans)->required();
  plans_cmd->add_option("--answers", answers)->required();
  plans_cmd->add_option("--out", out)->required();

  auto* structure_cmd = app.add_subcommand("structure", "Replay fixture and criteria set for structuring");
  structure_cmd->add_option("--corpus", corpus)->required();
  structure_cmd->add_option("--annotations", annotations)->required();
  structure_cmd->add_option("--labels", labels);
  structure_cmd->add_option("--out", out)->required();
  structure_cmd->add_option("--criteria-out", out_criteria)->required();

  auto* generation_cmd = app.add_subcommand("generation", "Replay fixture for rule and plan generation");
  generation_cmd->add_option("--answers", answers)->required();
  generation_cmd->add_option("--out", out)->required();

  auto* clauses_cmd = app.add_subcommand("clauses", "Print split eligibility clauses");
  clauses_cmd->add_option("--corpus", corpus)->required();

  CLI11_PARSE(app, argc, argv);
  try {
    if (*plans_cmd) record_plans(corpus, plans, answers, out);
    if (*structure_cmd) record_structuring(corpus, annotations, labels, out, out_criteria);
    if (*generation_cmd) record_generation(answers, out);
    if (*clauses_cmd) dump_clauses(corpus);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
