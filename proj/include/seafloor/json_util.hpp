#ifndef SEAFLOOR_JSON_UTIL_HPP
#define SEAFLOOR_JSON_UTIL_HPP

#include <filesystem>

#include "json.hpp"

namespace seafloor {

using Json = nlohmann::json;

/// Throws Error(Io) on unreadable files or malformed JSON.
Json read_json(const std::filesystem::path& path);

/// Pretty-printed, newline-terminated; byte-stable for equal values.
void write_json(const std::filesystem::path& path, const Json& value);

}  // namespace seafloor

#endif  // SEAFLOOR_JSON_UTIL_HPP
