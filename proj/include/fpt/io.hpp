#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace fpt {

/// Shortest decimal that reads back to the same double.
std::string format_double(double v);

/// Writes to a sibling temporary file and renames it over `path`.
/// Throws std::system_error (I/O) on failure.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

}  // namespace fpt
