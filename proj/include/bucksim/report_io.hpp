#pragma once

#include <filesystem>
#include <initializer_list>
#include <string>
#include <string_view>

namespace bucksim {

// 17 significant digits (round-trips any double).
std::string format_double(double v);

// Joins already formatted fields with commas and a trailing newline.
std::string csv_row(std::initializer_list<std::string_view> fields);

// Writes content to a sibling temp file, then renames it over `path`, so a
// reader never sees a partially written file. Throws ConfigError on failure.
void atomic_write(const std::filesystem::path& path, std::string_view content);

} // namespace bucksim
