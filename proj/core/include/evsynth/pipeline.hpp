#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "evsynth/audit.hpp"
#include "evsynth/extraction.hpp"
#include "evsynth/plan.hpp"
#include "evsynth/trial.hpp"

namespace evsynth {

// --- rule sets ----------------------------------------------------------------

enum class RuleKind { include, exclude };
enum class RuleSetStatus { draft, approved };

std::string_view to_string(RuleKind kind);
std::string_view to_string(RuleSetStatus status);

struct Rule {
  std::string rule_id;
  std::string text;
  RuleKind kind = RuleKind::include;

  friend bool operator==(const Rule&, const Rule&) = default;
};

struct RuleSet {
  std::vector<Rule> rules;
  RuleSetStatus status = RuleSetStatus::draft;
  int revision = 1;
};

Json to_json(const Rule& rule);
Json to_json(const RuleSet& set);
/// {rules, status?, revision?} or a bare array of rules. Missing rule ids
/// become r1, r2, ...; missing kinds are inferred from a leading "Exclude".
RuleSet rule_set_from_json(const Json& j);

/// Replaces the rules of a draft set and bumps the revision. Approved sets
/// are immutable (StateError). Emits one rule-edited event.
void edit_rules(RuleSet& set, std::vector<Rule> rules, AuditLog* audit = nullptr);

/// draft -> approved; approving twice is a StateError. Emits rule-edited.
void approve_rules(RuleSet& set, AuditLog* audit = nullptr);

// --- flow ---------------------------------------------------------------------

struct PrismaStage {
  std::string label;
  std::size_t remaining = 0;
  std::size_t excluded = 0;
};

struct PrismaFlow {
  std::size_t initial_count = 0;
  std::vector<PrismaStage> stages;
  std::size_t final_count = 0;
};

Json to_json(const PrismaFlow& flow);
PrismaFlow prisma_flow_from_json(const Json& j);
/// Fixed-width plaintext table.
std::string render_prisma_table(const PrismaFlow& flow);

// --- pipeline -------------------------------------------------------------------

struct PipelineOptions {
  PrefilterConfig prefilter;
  EvaluationPolicy policy;
  /// Worker threads per stage. Verdicts are audited in canonical trial
  /// order whatever the value.
  unsigned threads = 1;
  /// When set, execution requires status approved.
  const RuleSet* rule_set = nullptr;
};

struct PipelineResult {
  Corpus selected;
  PrismaFlow flow;
  PrefilterReport prefilter_report;
  std::vector<std::vector<RuleVerdict>> verdicts;  // per plan stage
};

/// Stage 0 is the prefilter; stage i applies plan i to the survivors of
/// stage i-1. Configuration problems (unapproved rules, missing membership
/// lists) throw before stage 0. Extraction failures never throw.
PipelineResult run_pipeline(const Corpus& corpus, const std::vector<FunctionPlan>& plans,
                            Parser& parser, const MembershipLibrary& lists, AuditLog& audit,
                            const PipelineOptions& options = {});

/// Recomputes the selected ids (ascending) from verdict events alone.
std::vector<std::string> replay_selection(const std::vector<AuditEvent>& events);

// --- summaries ----------------------------------------------------------------

struct TrialSummary {
  std::string nct_id;
  std::string interventions;
  std::string biomarker;
  std::string condition;
  std::string phase;
  std::optional<std::int64_t> enrollment;
  std::string status;
  std::string pfs;
  std::string os;
};

inline constexpr const char* kBiomarkerInstruction =
    "Name the biomarker that defines the enrolled population (for example HER2, PD-L1, "
    "MSI-H). Return a short phrase or 'None'. Do not explain your answer.";
inline constexpr const char* kPfsInstruction =
    "Summarize the reported progression-free survival result in one short phrase, or "
    "return 'None' if none is reported. Do not explain your answer.";
inline constexpr const char* kOsInstruction =
    "Summarize the reported overall survival result in one short phrase, or return 'None' "
    "if none is reported. Do not explain your answer.";

/// Registry fields are copied; biomarker and endpoint text come from the
/// parser and are left empty when it answers None or fails.
std::vector<TrialSummary> summarize_selected(const Corpus& selected, Parser& parser);

/// Column names follow the landscape table: NCT Number, Intervention(s),
/// Biomarker, Condition, Study Phase, Enrollment Size, Status,
/// Endpoints: PFS, Endpoints: OS.
const std::vector<std::string>& summary_columns();
Json to_json(const TrialSummary& summary);
Json to_json(const std::vector<TrialSummary>& summaries);
std::string summaries_csv(const std::vector<TrialSummary>& summaries);

// --- generation ---------------------------------------------------------------

enum class GenerationTask { rules, plan };
std::string_view to_string(GenerationTask task);

/// Same shape as the extraction parser contract: a request in, raw text out,
/// nullopt when the backend cannot answer.
class GenerationAdapter {
 public:
  virtual ~GenerationAdapter() = default;
  [[nodiscard]] virtual std::string id() const = 0;
  virtual std::optional<std::string> generate(GenerationTask task, const std::string& input) = 0;
};

std::string generation_digest(GenerationTask task, const std::string& input);

class ReplayGenerator final : public GenerationAdapter {
 public:
  explicit ReplayGenerator(ReplayFixture fixture) : fixture_(std::move(fixture)) {}
  [[nodiscard]] std::string id() const override { return "replay"; }
  std::optional<std::string> generate(GenerationTask task, const std::string& input) override;

 private:
  ReplayFixture fixture_;
};

/// Sends the prompt template for the task (loaded from a prompts directory)
/// plus the input through the remote text client.
class RemoteGenerator final : public GenerationAdapter {
 public:
  RemoteGenerator(RemoteConfig config, std::string prompts_dir);
  [[nodiscard]] std::string id() const override { return "remote"; }
  std::optional<std::string> generate(GenerationTask task, const std::string& input) override;

 private:
  RemoteTextClient client_;
  std::string prompts_dir_;
};

/// "replay:PATH" or "remote:CONFIG[,PROMPTS_DIR]".
std::unique_ptr<GenerationAdapter> make_generator(const std::string& spec);

/// Draft rule set from a free-text query. The response is either a JSON
/// rule document or one rule per line with optional (i)/1./- markers.
/// Empty queries and unusable responses are InputErrors; an unreachable
/// adapter is a ConfigError.
RuleSet generate_rules(const std::string& query, GenerationAdapter& generator,
                       AuditLog* audit = nullptr);

/// Raw plan JSON for one rule; callers must still run validate_plan.
Json generate_plan(const std::string& rule_text, GenerationAdapter& generator);

}  // namespace evsynth
