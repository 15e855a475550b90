#include <gtest/gtest.h>

#include "evsynth/error.hpp"
#include "evsynth/util.hpp"

using namespace evsynth;

TEST(Text, TrimAndNormalize) {
  EXPECT_EQ(trim("  a b \n"), "a b");
  EXPECT_EQ(normalize_name("  Trastuzumab   DERUXTECAN "), "trastuzumab deruxtecan");
  EXPECT_TRUE(iequals("Placebo", "placebo"));
  EXPECT_TRUE(icontains("Olaparib vs Placebo", "PLACEBO"));
  EXPECT_FALSE(icontains("olaparib", "placebo"));
}

TEST(Text, SplitAndJoin) {
  const auto parts = split("a,b,,c", ',');
  ASSERT_EQ(parts.size(), 4u);
  EXPECT_EQ(parts[2], "");
  EXPECT_EQ(join(parts, "|"), "a|b||c");
}

TEST(Text, ParseDecimal) {
  EXPECT_DOUBLE_EQ(*parse_decimal("2.8"), 2.8);
  EXPECT_DOUBLE_EQ(*parse_decimal("-1e3"), -1000.0);
  EXPECT_FALSE(parse_decimal("2.8x"));
  EXPECT_FALSE(parse_decimal(""));
  EXPECT_FALSE(parse_decimal("abc"));
}

TEST(Json, ParseErrorsCarryOffset) {
  try {
    parse_json("{\"a\": [1, 2,, 3]}");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_GT(e.byte_offset(), 0u);
    EXPECT_EQ(e.category(), ErrorCategory::input);
  }
}

TEST(Json, Sha256KnownVector) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Json, StableDigestIgnoresTimestamps) {
  Json a{{"x", 1}, {"timestamp", "2024-01-01T00:00:00Z"}, {"nested", {{"ingested_at", "t1"}, {"y", 2}}}};
  Json b{{"x", 1}, {"timestamp", "2025-06-01T12:00:00Z"}, {"nested", {{"ingested_at", "t2"}, {"y", 2}}}};
  EXPECT_EQ(stable_digest(a), stable_digest(b));
  b["nested"]["y"] = 3;
  EXPECT_NE(stable_digest(a), stable_digest(b));
}

TEST(Json, PointerEscaping) {
  EXPECT_EQ(pointer_append("/plans", "a/b~c"), "/plans/a~1b~0c");
  EXPECT_EQ(pointer_append("/plans", std::size_t{3}), "/plans/3");
}

TEST(Clock, FixedClockRepeats) {
  const Clock c = fixed_clock("2024-05-01T00:00:00Z");
  EXPECT_EQ(c(), "2024-05-01T00:00:00Z");
  EXPECT_EQ(c(), c());
  const std::string now = system_clock()();
  EXPECT_EQ(now.size(), 20u);
  EXPECT_EQ(now.back(), 'Z');
}

TEST(Files, RoundTrip) {
  const std::string path = ::testing::TempDir() + "evsynth_util_roundtrip.txt";
  write_file(path, "line\n");
  EXPECT_EQ(read_file(path), "line\n");
  EXPECT_THROW(read_file(path + ".missing"), Error);
}
