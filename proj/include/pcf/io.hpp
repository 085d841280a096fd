#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace pcf::io {

inline constexpr const char* kToolVersion = "0.1.0";

/// Writes through a temporary file in the same directory and renames it into place.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// CSV with a header line and values printed at 17 significant digits.
std::string csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& columns);

/// FNV-1a 64-bit over bytes, as 16 lowercase hex digits.
std::string fnv1a_hex(const std::string& bytes);

/// Digest of the canonical (sorted-key, compact) dump of a document.
std::string digest(const nlohmann::json& doc);

/// `meta` object appended to every report. Wall-clock is included only when
/// `wall_seconds` is non-negative.
nlohmann::json meta(const nlohmann::json& definition, std::uint64_t seed, double wall_seconds);

std::string dump(const nlohmann::json& doc);

}  // namespace pcf::io
