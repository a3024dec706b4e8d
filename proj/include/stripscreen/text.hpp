#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace stripscreen {

// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

// Fixed-point rendering for display tables.
std::string format_fixed(double value, int precision);

std::vector<std::string> split(std::string_view line, char delim);
std::string_view trim(std::string_view s);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

std::uint64_t fnv1a64(std::string_view bytes);
std::string file_hash_hex(const std::filesystem::path& path);

}  // namespace stripscreen
