#pragma once

#include <string>
#include <vector>

namespace factprobe::io {

std::string read_file(const std::string& path);

// Non-empty lines with their 1-based line numbers (blank lines are skipped).
std::vector<std::pair<std::size_t, std::string>> read_jsonl_lines(const std::string& path);

void ensure_parent_dir(const std::string& path);
void ensure_dir(const std::string& path);

// Writes only when the content differs from what is on disk, so unchanged
// reruns leave output files untouched. Returns true when a write happened.
bool write_file_if_changed(const std::string& path, const std::string& content);

bool file_exists(const std::string& path);

} // namespace factprobe::io
