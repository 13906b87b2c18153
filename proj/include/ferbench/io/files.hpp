#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace ferbench::io {

// Write-temp-then-rename so a crashed job never leaves a half-written
// artifact behind.
void atomic_write(const std::filesystem::path& path, const std::string& content);

std::string read_text(const std::filesystem::path& path);
std::vector<std::string> read_lines(const std::filesystem::path& path);

// CSV with minimal quoting: fields containing comma, quote or newline are
// quoted, quotes doubled. All framework CSVs are written through this.
std::string csv_escape(const std::string& field);
std::string csv_row(const std::vector<std::string>& fields);
std::vector<std::string> csv_parse_row(const std::string& line);

// Sample ids may contain path separators (frame ids); they are flattened
// before use as file names.
std::string safe_file_stem(const std::string& sample_id);

// processed/<dataset>/<sample_id>.png — the processed-image store layout.
std::filesystem::path processed_image_path(const std::filesystem::path& processed_root,
                                           const std::string& dataset,
                                           const std::string& sample_id);

}  // namespace ferbench::io
