#include <gtest/gtest.h>

#include "evsynth/drug_library.hpp"
#include "evsynth/error.hpp"

using namespace evsynth;

namespace {

Json document(const std::string& key, std::vector<Json> entries, const std::string& at = "2024-01-01T00:00:00Z") {
  return {{"disease_key", key}, {"source", "unit"}, {"retrieved_at", at}, {"entries", entries}};
}

Json entry(const std::string& name, std::vector<std::string> brands = {}, const std::string& status = "") {
  Json j{{"display_name", name}, {"generic_name", to_lower(name)}, {"brand_names", brands}};
  if (!status.empty()) j["status"] = status;
  return j;
}

}  // namespace

TEST(DrugLibrary, FixtureImportDropsOffLabel) {
  DrugLibrary library;
  const auto report =
      library.import_list(parse_json(read_file(std::string(EVSYNTH_SOURCE_DIR) + "/data/gastric/drug_import.json")));
  EXPECT_EQ(report.accepted, 14u);
  EXPECT_EQ(report.dropped_off_label, std::vector<std::string>{"Regorafenib"});
  EXPECT_EQ(report.version, 1);
  const auto list = library.lookup(report.disease_key);
  ASSERT_TRUE(list);
  EXPECT_FALSE(contains(*list, "Regorafenib"));
  EXPECT_TRUE(contains(*list, "  TRASTUZUMAB "));
}

TEST(DrugLibrary, BrandAndGenericNamesMatch) {
  DrugLibrary library;
  library.import_list(document("gastric cancer", {entry("Nivolumab", {"Opdivo"})}));
  const auto list = *library.lookup("Gastric  Cancer");
  EXPECT_TRUE(contains(list, "opdivo"));
  EXPECT_TRUE(contains(list, "NIVOLUMAB"));
  EXPECT_FALSE(contains(list, "nivo"));
}

TEST(DrugLibrary, VersionsAreAppendOnly) {
  DrugLibrary library;
  library.import_list(document("gastric cancer", {entry("A")}, "2024-01-01T00:00:00Z"));
  const auto second = library.import_list(document("gastric cancer", {entry("A"), entry("B")}, "2024-02-01T00:00:00Z"));
  EXPECT_EQ(second.version, 2);
  const auto history = library.history("gastric cancer");
  ASSERT_EQ(history.size(), 2u);
  EXPECT_EQ(history[0].entries.size(), 1u);
  EXPECT_EQ(library.lookup("gastric cancer")->version, 2);
}

TEST(DrugLibrary, DuplicatesCollapse) {
  DrugLibrary library;
  const auto report = library.import_list(document("x", {entry("A"), entry("a"), entry("B")}));
  EXPECT_EQ(report.accepted, 2u);
  EXPECT_EQ(report.duplicates_collapsed, 1u);
}

TEST(DrugLibrary, TokenLookup) {
  DrugLibrary library;
  library.import_list(document("stomach/gastric cancer", {entry("A")}));
  library.import_list(document("breast cancer", {entry("B")}));
  EXPECT_EQ(library.lookup("gastric cancer")->disease_key, "stomach/gastric cancer");
  EXPECT_EQ(library.lookup("Breast Cancer")->disease_key, "breast cancer");
  EXPECT_FALSE(library.lookup("lung cancer"));
}

TEST(DrugLibrary, JsonRoundTripAndSaveLoad) {
  DrugLibrary library;
  library.import_list(document("x", {entry("A", {"Alpha"})}));
  const std::string path = ::testing::TempDir() + "evsynth_drug_library.json";
  library.save(path);
  const DrugLibrary loaded = DrugLibrary::load(path);
  EXPECT_EQ(loaded.to_json(), library.to_json());
  EXPECT_EQ(loaded.lookup("x")->entries, library.lookup("x")->entries);
  EXPECT_EQ(library.export_list("x")["entries"].size(), 1u);
}

TEST(DrugLibrary, BadImportsAreInputErrors) {
  DrugLibrary library;
  EXPECT_THROW(library.import_list(Json::array()), InputError);
  EXPECT_THROW(library.import_list({{"disease_key", ""}, {"entries", Json::array()}}), InputError);
}

TEST(DrugLibrary, ResolveCachesFetchedLists) {
  DrugLibrary library;
  ReplayDrugSource source(Json{{"gastric cancer", document("gastric cancer", {entry("A")})}});
  EXPECT_TRUE(resolve_drug_list(library, &source, "Gastric Cancer"));
  EXPECT_EQ(library.history("gastric cancer").size(), 1u);
  EXPECT_TRUE(resolve_drug_list(library, nullptr, "gastric cancer"));
  EXPECT_FALSE(resolve_drug_list(library, &source, "lung cancer"));
}

TEST(Membership, BindResolvesOrFails) {
  DrugLibrary library;
  library.import_list(document("gastric cancer", {entry("A")}));
  const auto lists = MembershipLibrary::bind(library, {{"approved", "gastric cancer"}});
  ASSERT_NE(lists.find("approved"), nullptr);
  EXPECT_EQ(lists.find("other"), nullptr);
  EXPECT_THROW(MembershipLibrary::bind(library, {{"approved", "lung cancer"}}), ConfigError);
}
