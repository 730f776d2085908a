#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace decode {

std::string read_file(const std::filesystem::path& path);

/// Writes via a sibling temp file and rename, so readers never observe a
/// partially written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// Lowercase hex SHA-256 digest.
std::string sha256_hex(std::string_view bytes);

/// Shortest-roundtrip-safe decimal rendering (%.17g).
std::string format_double(double value);

}  // namespace decode
