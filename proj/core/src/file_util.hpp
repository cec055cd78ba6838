#pragma once

#include <filesystem>
#include <string>

namespace netweave::detail {

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& contents);

/// Writes to a sibling temporary file and renames it over `path`, so readers
/// never observe a half-written file.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace netweave::detail
