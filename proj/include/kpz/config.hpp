#pragma once

#include <filesystem>
#include <string_view>

#include "kpz/io.hpp"

namespace kpz::config {

// Reads the TOML subset used by experiment manifests: bare keys, [table] and
// [a.b] headers, strings, integers, floats, booleans, scalar arrays, comments.
io::Json parse_toml(std::string_view text);
io::Json load_toml(const std::filesystem::path& path);

}  // namespace kpz::config
