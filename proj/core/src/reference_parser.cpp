// Rule-based stand-in for the extraction service. Every table below is
// the complete behaviour; nothing is learned or configurable at run time.

#include <algorithm>
#include <regex>
#include <set>

#include "evsynth/extraction.hpp"

namespace evsynth {

namespace {

constexpr auto kIcase = std::regex::ECMAScript | std::regex::icase;

/// When the instruction matches `trigger`, the answer is "Yes" (or the
/// matched phrase) iff the attended text matches `evidence`. First row wins.
struct TopicRule {
  const char* name;
  std::regex trigger;
  std::regex evidence;
};

const std::vector<TopicRule>& topic_rules() {
  static const std::vector<TopicRule> rules = [] {
    std::vector<TopicRule> r;
    auto add = [&](const char* name, const char* trigger, const char* evidence) {
      r.push_back({name, std::regex(trigger, kIcase), std::regex(evidence, kIcase)});
    };
    add("phase-3", R"(phase\s*(iii|3)\b)", R"(phase\s*(iii|3)\b|\bphase3\b)");
    add("phase-4", R"(phase\s*(iv|4)\b)", R"(phase\s*(iv|4)\b|\bphase4\b)");
    add("phase-2", R"(phase\s*(ii|2)\b)", R"(phase\s*(ii|2)\b|\bphase2\b)");
    add("phase-1", R"(phase\s*(i|1)\b)", R"(phase\s*(i|1)\b|\b(early_)?phase1\b)");
    add("randomized", R"(randomi[sz])", R"((^|[^_\-a-z])randomi[sz]ed)");
    add("placebo", R"(placebo)", R"(placebo)");
    add("survival", R"(survival|\bpfs\b|\bos\b)",
        R"(progression[- ]free survival|overall survival|\bPFS\b|\bOS\b)");
    add("biomarker", R"(biomarker)",
        R"(\bHER-?2\b|\bMSI-H\b|MSI-high|\bdMMR\b|\bPD-L1\b|claudin|\bCLDN18|\bFGFR2|\bBRCA[12]?\b|\bEGFR\b|\bKRAS\b)");
    add("gastric", R"(gastric|gastroesophageal|gastro-oesophageal|stomach)",
        R"(gastric|stomach|gastro-?o?esophageal|\bGEJ\b|esophagogastric)");
    add("targeted-or-immunotherapy", R"(targeted|immunotherap)",
        R"(immunotherap|checkpoint inhibitor|targeted therap|monoclonal antibod|antibody[- ]drug conjugate|\b[a-z]+mab\b|\b[a-z]+nib\b|deruxtecan)");
    add("olaparib", R"(olaparib)", R"(olaparib|AZD2281|lynparza)");
    add("maintenance", R"(maintenance)", R"(maintenance)");
    add("safety", R"(adverse|safety|toxicit)", R"(adverse|toxicit|safety)");
    return r;
  }();
  return rules;
}

/// Quoted fragments of the instruction other than the answer tokens.
std::vector<std::string> quoted_terms(const std::string& instruction) {
  static const std::regex quoted(R"(["'`]([^"'`]{2,60})["'])");
  std::vector<std::string> terms;
  for (auto it = std::sregex_iterator(instruction.begin(), instruction.end(), quoted);
       it != std::sregex_iterator(); ++it) {
    std::string term = trim((*it)[1].str());
    if (iequals(term, "yes") || iequals(term, "no") || iequals(term, "none")) continue;
    terms.push_back(term);
  }
  return terms;
}

/// First evidence match for the instruction's topic, if any.
std::optional<std::string> topic_evidence(const ExtractionRequest& request, bool& topic_known) {
  topic_known = false;
  for (const auto& rule : topic_rules()) {
    if (!std::regex_search(request.instruction, rule.trigger)) continue;
    topic_known = true;
    std::smatch m;
    if (std::regex_search(request.attended_text, m, rule.evidence)) return trim(m.str());
    return std::nullopt;
  }
  for (const auto& term : quoted_terms(request.instruction)) {
    topic_known = true;
    auto pos = to_lower(request.attended_text).find(to_lower(term));
    if (pos != std::string::npos) return request.attended_text.substr(pos, term.size());
  }
  return std::nullopt;
}

std::string strip_commas(std::string text) {
  std::erase(text, ',');
  return text;
}

/// Precedence: "n = 84", then a number following "enrollment", then the
/// first number anywhere.
std::string parse_number(const std::string& text) {
  static const std::regex n_equals(R"(\bn\s*=\s*(\d[\d,]*(?:\.\d+)?))", kIcase);
  static const std::regex enrollment(R"(enrol(?:l)?(?:ment|ed)?\b[^0-9\n]{0,24}(\d[\d,]*))", kIcase);
  static const std::regex any_number(R"((\d[\d,]*(?:\.\d+)?))");
  std::smatch m;
  for (const auto* pattern : {&n_equals, &enrollment, &any_number}) {
    if (std::regex_search(text, m, *pattern)) return strip_commas(m[1].str());
  }
  return "None";
}

/// Intervention tokenization: typed "KIND: name" entries when present,
/// otherwise semicolon/newline separated names after the section label.
std::string parse_names(const std::string& text) {
  static const std::regex typed(R"(\b(DRUG|BIOLOGICAL|COMBINATION_PRODUCT)\s*:\s*([^;\n]+))");
  static const std::regex any_typed(
      R"(\b(DRUG|BIOLOGICAL|COMBINATION_PRODUCT|GENETIC|RADIATION|PROCEDURE|DEVICE|DIETARY_SUPPLEMENT|BEHAVIORAL|DIAGNOSTIC_TEST|OTHER)\s*:)");
  std::vector<std::string> names;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), typed); it != std::sregex_iterator();
       ++it) {
    names.push_back(trim((*it)[2].str()));
  }
  if (names.empty() && !std::regex_search(text, any_typed)) {
    for (auto& line : split(text, '\n')) {
      auto colon = line.find(':');
      std::string body = colon == std::string::npos ? line : line.substr(colon + 1);
      for (auto& part : split(body, ';')) {
        if (auto name = trim(part); !name.empty()) names.push_back(name);
      }
    }
  }
  if (names.empty()) return "None";
  return Json(names).dump();
}

// --- eligibility clause structuring ---------------------------------------------

struct EntityRule {
  const char* entity;
  std::regex pattern;
};

const std::vector<EntityRule>& entity_rules() {
  static const std::vector<EntityRule> rules = [] {
    std::vector<EntityRule> r;
    auto add = [&](const char* entity, const char* pattern) {
      r.push_back({entity, std::regex(pattern, kIcase)});
    };
    add("biomarker", R"(\bBRCA|\bHER-?2\b|\bPD-L1\b|\bMSI|mutation|biomarker|claudin)");
    add("timing", R"(within \d+|\d+\s*(weeks?|wks?|days?|months?)\b)");
    add("response-status", R"(response|progression|stable disease|evidence of disease)");
    add("prior-treatment", R"(previous|prior|platinum|chemotherap|PARP|treatment with|received)");
    add("disease", R"(cancer|carcinoma|adenocarcinoma|tumou?r|histolog|malignan)");
    add("demographics", R"(\bage\b|years of age|\bfemale\b|\bmale\b|\bwomen\b|\bmen\b)");
    add("comorbidity", R"(ascites|infection|cardiac|renal|hepatic|comorbid)");
    return r;
  }();
  return rules;
}

std::string structure_clause(const std::string& clause) {
  std::string body = trim(clause);
  if (body.empty()) return "None";
  for (const auto& rule : entity_rules()) {
    std::smatch m;
    if (!std::regex_search(body, m, rule.pattern)) continue;
    std::string attribute = normalize_name(m.str());
    std::replace(attribute.begin(), attribute.end(), ' ', '-');
    std::string value = body.size() > 80 ? body.substr(0, 80) : body;
    return Json{{"entity", rule.entity}, {"attribute", attribute}, {"value", value}, {"condition", ""}}
        .dump();
  }
  return "None";
}

}  // namespace

std::string reference_parse(const ExtractionRequest& request) {
  switch (request.expected_kind) {
    case ExpectedKind::number:
      return parse_number(request.attended_text);
    case ExpectedKind::name_list:
      return parse_names(request.attended_text);
    case ExpectedKind::boolean_yes_no: {
      bool known = false;
      // Unknown topics and missing evidence both answer "No" so include
      // rules fail closed.
      return topic_evidence(request, known) ? "Yes" : "No";
    }
    case ExpectedKind::phrase_or_none: {
      if (request.instruction.find(kStructureCriterionInstruction) != std::string::npos) {
        return structure_clause(request.attended_text);
      }
      bool known = false;
      auto phrase = topic_evidence(request, known);
      return phrase ? *phrase : "None";
    }
  }
  return "None";
}

}  // namespace evsynth
