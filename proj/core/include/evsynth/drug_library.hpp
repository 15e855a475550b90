#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "evsynth/util.hpp"

namespace evsynth {

struct DrugEntry {
  std::string display_name;
  std::string generic_name;
  std::vector<std::string> brand_names;

  friend bool operator==(const DrugEntry&, const DrugEntry&) = default;
};

/// Approved drugs for one disease. Off-label rows never make it in.
struct DrugList {
  std::string disease_key;
  std::vector<DrugEntry> entries;
  std::string source;
  std::string retrieved_at;
  int version = 0;
};

/// Case-insensitive, whitespace-normalized match against every stored name.
bool contains(const DrugList& list, std::string_view name);

std::string normalize_disease_key(std::string_view key);

struct ImportReport {
  std::string disease_key;
  int version = 0;
  std::size_t accepted = 0;
  std::vector<std::string> dropped_off_label;
  std::size_t duplicates_collapsed = 0;
};

/// Versioned store: disease key -> append-only history of lists. Lookups
/// are concurrent, imports serialized.
class DrugLibrary {
 public:
  DrugLibrary() = default;

  static DrugLibrary from_json(const Json& j);
  static DrugLibrary load(const std::string& path);
  [[nodiscard]] Json to_json() const;
  void save(const std::string& path) const;

  /// Exact normalized key first, then the lexicographically first key whose
  /// tokens include every query token ("gastric cancer" hits
  /// "stomach/gastric cancer").
  [[nodiscard]] std::optional<DrugList> lookup(std::string_view disease_key) const;

  /// All versions of a key, oldest first.
  [[nodiscard]] std::vector<DrugList> history(std::string_view disease_key) const;

  /// Import document:
  ///   {disease_key, source, retrieved_at,
  ///    entries: [{display_name, generic_name, brand_names, status?}]}
  /// Rows whose status is "off-label" are dropped and reported.
  ImportReport import_list(const Json& document);

  [[nodiscard]] Json export_list(std::string_view disease_key) const;

  DrugLibrary(const DrugLibrary& other);
  DrugLibrary& operator=(const DrugLibrary& other);

 private:
  mutable std::shared_mutex mutex_;
  std::map<std::string, std::vector<DrugList>> lists_;
};

/// Web retrieval boundary. Only a replay implementation ships; a live
/// scraper would implement the same interface.
class DrugSource {
 public:
  virtual ~DrugSource() = default;
  /// An import document for the disease, or nullopt.
  virtual std::optional<Json> fetch(std::string_view disease) = 0;
};

class ReplayDrugSource final : public DrugSource {
 public:
  explicit ReplayDrugSource(Json documents) : documents_(std::move(documents)) {}
  std::optional<Json> fetch(std::string_view disease) override;

 private:
  Json documents_;  // normalized disease -> import document
};

/// Local library first; on a miss, fetch, import and cache.
std::optional<DrugList> resolve_drug_list(DrugLibrary& library, DrugSource* source,
                                          std::string_view disease);

Json to_json(const DrugList& list);
DrugList drug_list_from_json(const Json& j);
Json to_json(const ImportReport& report);

/// Named membership lists referenced by in_list conditions.
class MembershipLibrary {
 public:
  void add(std::string name, DrugList list) { lists_[std::move(name)] = std::move(list); }

  [[nodiscard]] const DrugList* find(std::string_view name) const {
    auto it = lists_.find(std::string(name));
    return it == lists_.end() ? nullptr : &it->second;
  }

  [[nodiscard]] const std::map<std::string, DrugList>& lists() const { return lists_; }

  /// Binds list names to library keys, e.g.
  /// {"FDA_approved_drugs_gastric": "gastric cancer"}. Missing keys are
  /// configuration errors.
  static MembershipLibrary bind(const DrugLibrary& library,
                                const std::map<std::string, std::string>& bindings);

 private:
  std::map<std::string, DrugList> lists_;
};

}  // namespace evsynth
