#pragma once

#include <chrono>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace evsynth {

using Json = nlohmann::json;

// --- text -------------------------------------------------------------------

std::string trim(std::string_view text);
std::string to_lower(std::string_view text);

/// Lower-cases, trims and collapses internal whitespace runs to one space.
std::string normalize_name(std::string_view text);

bool iequals(std::string_view a, std::string_view b);
bool icontains(std::string_view haystack, std::string_view needle);

std::vector<std::string> split(std::string_view text, char delimiter);
std::string join(const std::vector<std::string>& parts, std::string_view separator);

/// Parses a whole string as a decimal literal; nullopt on any trailing junk.
std::optional<double> parse_decimal(std::string_view text);

// --- json -------------------------------------------------------------------

/// Parses JSON text, converting library errors into ParseError with offset.
Json parse_json(std::string_view text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

/// Hex SHA-256 of arbitrary bytes.
std::string sha256_hex(std::string_view bytes);

/// Digest of a JSON document with every member named "timestamp",
/// "ingested_at" or "retrieved_at" removed, recursively.
std::string stable_digest(const Json& document);

/// JSON pointer segment escaping per RFC 6901.
std::string pointer_append(const std::string& base, std::string_view token);
std::string pointer_append(const std::string& base, std::size_t index);

// --- time -------------------------------------------------------------------

/// Injectable wall clock. Artifacts carry timestamps but every digest used
/// for reproducibility checks strips them.
using Clock = std::function<std::string()>;

Clock system_clock();
Clock fixed_clock(std::string timestamp);

}  // namespace evsynth
