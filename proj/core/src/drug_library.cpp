#include "evsynth/drug_library.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "evsynth/error.hpp"

namespace evsynth {

namespace {

constexpr int kLibraryFormatVersion = 1;

/// Trims and collapses whitespace but keeps the original case.
std::string clean_spacing(std::string_view text) {
  std::string out;
  bool pending = false;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending = !out.empty();
      continue;
    }
    if (pending) out.push_back(' ');
    pending = false;
    out.push_back(c);
  }
  return out;
}

std::set<std::string> key_tokens(std::string_view key) {
  std::set<std::string> tokens;
  std::string current;
  for (char c : key) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else if (!current.empty()) {
      tokens.insert(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.insert(std::move(current));
  return tokens;
}

std::string entry_identity(const DrugEntry& e) {
  return normalize_name(e.generic_name.empty() ? e.display_name : e.generic_name);
}

}  // namespace

bool contains(const DrugList& list, std::string_view name) {
  const std::string needle = normalize_name(name);
  if (needle.empty()) return false;
  return std::any_of(list.entries.begin(), list.entries.end(), [&](const DrugEntry& e) {
    if (normalize_name(e.display_name) == needle || normalize_name(e.generic_name) == needle) {
      return true;
    }
    return std::any_of(e.brand_names.begin(), e.brand_names.end(),
                       [&](const std::string& b) { return normalize_name(b) == needle; });
  });
}

std::string normalize_disease_key(std::string_view key) { return normalize_name(key); }

Json to_json(const DrugList& list) {
  Json entries = Json::array();
  for (const auto& e : list.entries) {
    entries.push_back({{"display_name", e.display_name},
                       {"generic_name", e.generic_name},
                       {"brand_names", e.brand_names}});
  }
  return {{"disease_key", list.disease_key},
          {"entries", entries},
          {"source", list.source},
          {"retrieved_at", list.retrieved_at},
          {"version", list.version}};
}

DrugList drug_list_from_json(const Json& j) {
  if (!j.is_object()) throw InputError("drug list must be a JSON object");
  DrugList list;
  list.disease_key = normalize_disease_key(j.value("disease_key", ""));
  list.source = j.value("source", "");
  list.retrieved_at = j.value("retrieved_at", "");
  list.version = j.value("version", 0);
  for (const auto& e : j.value("entries", Json::array())) {
    list.entries.push_back(DrugEntry{e.value("display_name", ""), e.value("generic_name", ""),
                                     e.value("brand_names", std::vector<std::string>{})});
  }
  return list;
}

Json to_json(const ImportReport& report) {
  return {{"disease_key", report.disease_key},
          {"version", report.version},
          {"accepted", report.accepted},
          {"dropped_off_label", report.dropped_off_label},
          {"duplicates_collapsed", report.duplicates_collapsed}};
}

DrugLibrary::DrugLibrary(const DrugLibrary& other) {
  std::shared_lock lock(other.mutex_);
  lists_ = other.lists_;
}

DrugLibrary& DrugLibrary::operator=(const DrugLibrary& other) {
  if (this == &other) return *this;
  std::map<std::string, std::vector<DrugList>> copy;
  {
    std::shared_lock lock(other.mutex_);
    copy = other.lists_;
  }
  std::unique_lock lock(mutex_);
  lists_ = std::move(copy);
  return *this;
}

DrugLibrary DrugLibrary::from_json(const Json& j) {
  if (!j.is_object() || !j.contains("lists") || !j["lists"].is_object()) {
    throw InputError("drug library needs a \"lists\" object");
  }
  if (j.value("format_version", 0) != kLibraryFormatVersion) {
    throw InputError("unsupported drug library format version");
  }
  DrugLibrary library;
  for (const auto& [key, versions] : j["lists"].items()) {
    auto& history = library.lists_[normalize_disease_key(key)];
    for (const auto& v : versions) history.push_back(drug_list_from_json(v));
  }
  return library;
}

DrugLibrary DrugLibrary::load(const std::string& path) {
  return from_json(parse_json(read_file(path)));
}

Json DrugLibrary::to_json() const {
  std::shared_lock lock(mutex_);
  Json lists = Json::object();
  for (const auto& [key, history] : lists_) {
    Json versions = Json::array();
    for (const auto& v : history) versions.push_back(evsynth::to_json(v));
    lists[key] = versions;
  }
  return {{"format_version", kLibraryFormatVersion}, {"lists", lists}};
}

void DrugLibrary::save(const std::string& path) const { write_file(path, to_json().dump(2) + "\n"); }

std::optional<DrugList> DrugLibrary::lookup(std::string_view disease_key) const {
  std::shared_lock lock(mutex_);
  const std::string key = normalize_disease_key(disease_key);
  if (key.empty()) return std::nullopt;
  if (auto it = lists_.find(key); it != lists_.end() && !it->second.empty()) {
    return it->second.back();
  }
  const auto wanted = key_tokens(key);
  for (const auto& [stored, history] : lists_) {
    if (history.empty()) continue;
    const auto have = key_tokens(stored);
    if (std::includes(have.begin(), have.end(), wanted.begin(), wanted.end())) {
      return history.back();
    }
  }
  return std::nullopt;
}

std::vector<DrugList> DrugLibrary::history(std::string_view disease_key) const {
  std::shared_lock lock(mutex_);
  auto it = lists_.find(normalize_disease_key(disease_key));
  return it == lists_.end() ? std::vector<DrugList>{} : it->second;
}

ImportReport DrugLibrary::import_list(const Json& document) {
  if (!document.is_object()) throw InputError("drug list import must be a JSON object");
  DrugList list;
  list.disease_key = normalize_disease_key(document.value("disease_key", ""));
  if (list.disease_key.empty()) throw InputError("drug list import without disease_key");
  list.source = document.value("source", "");
  list.retrieved_at = document.value("retrieved_at", "");

  ImportReport report;
  report.disease_key = list.disease_key;
  std::map<std::string, std::size_t> position;
  for (const auto& row : document.value("entries", Json::array())) {
    DrugEntry entry{clean_spacing(row.value("display_name", "")),
                    clean_spacing(row.value("generic_name", "")), {}};
    if (entry.display_name.empty()) entry.display_name = entry.generic_name;
    if (entry.display_name.empty()) continue;
    if (iequals(trim(row.value("status", "approved")), "off-label")) {
      report.dropped_off_label.push_back(entry.display_name);
      continue;
    }
    std::set<std::string> seen_brands;
    for (const auto& brand : row.value("brand_names", std::vector<std::string>{})) {
      std::string cleaned = clean_spacing(brand);
      if (cleaned.empty()) continue;
      if (seen_brands.insert(normalize_name(cleaned)).second) {
        entry.brand_names.push_back(cleaned);
      } else {
        ++report.duplicates_collapsed;
      }
    }
    auto identity = entry_identity(entry);
    if (auto it = position.find(identity); it != position.end()) {
      auto& existing = list.entries[it->second];
      for (auto& brand : entry.brand_names) {
        bool dup = std::any_of(existing.brand_names.begin(), existing.brand_names.end(),
                               [&](const std::string& b) { return iequals(b, brand); });
        if (!dup) existing.brand_names.push_back(brand);
      }
      ++report.duplicates_collapsed;
      continue;
    }
    position.emplace(identity, list.entries.size());
    list.entries.push_back(std::move(entry));
  }

  std::unique_lock lock(mutex_);
  auto& history = lists_[list.disease_key];
  list.version = history.empty() ? 1 : history.back().version + 1;
  report.version = list.version;
  report.accepted = list.entries.size();
  history.push_back(std::move(list));
  return report;
}

Json DrugLibrary::export_list(std::string_view disease_key) const {
  auto list = lookup(disease_key);
  if (!list) throw NotFoundError("no drug list for '" + std::string(disease_key) + "'");
  return evsynth::to_json(*list);
}

std::optional<Json> ReplayDrugSource::fetch(std::string_view disease) {
  const std::string key = normalize_disease_key(disease);
  if (documents_.is_object() && documents_.contains(key)) return documents_[key];
  return std::nullopt;
}

std::optional<DrugList> resolve_drug_list(DrugLibrary& library, DrugSource* source,
                                          std::string_view disease) {
  if (auto hit = library.lookup(disease)) return hit;
  if (source == nullptr) return std::nullopt;
  auto document = source->fetch(disease);
  if (!document) return std::nullopt;
  library.import_list(*document);
  return library.lookup(disease);
}

MembershipLibrary MembershipLibrary::bind(const DrugLibrary& library,
                                          const std::map<std::string, std::string>& bindings) {
  MembershipLibrary out;
  for (const auto& [name, disease] : bindings) {
    auto list = library.lookup(disease);
    if (!list) {
      throw ConfigError("membership list '" + name + "' is bound to '" + disease +
                        "' which is not in the drug library");
    }
    out.add(name, std::move(*list));
  }
  return out;
}

}  // namespace evsynth
