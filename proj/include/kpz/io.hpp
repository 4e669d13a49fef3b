#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

namespace kpz::io {

using Json = nlohmann::ordered_json;

// 17 significant digits, so a value read back is bitwise the value written.
// Infinities are written as inf / -inf.
std::string format_double(double v);
double parse_double(std::string_view text);

void write_text(const std::filesystem::path& path, std::string_view text);
std::string read_text(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const Json& doc);
Json read_json(const std::filesystem::path& path);

// JSON cannot hold infinities; they travel as strings.
Json number_or_string(double v);

std::string code_version();

}  // namespace kpz::io
