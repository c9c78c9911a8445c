#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace factprobe::util {

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);
bool is_blank(std::string_view s);

// Whitespace tokenization, lowercased.
std::vector<std::string> whitespace_tokens(std::string_view text);

// Lowercased whitespace tokens with ASCII punctuation removed first.
std::vector<std::string> content_tokens(std::string_view text);

// FNV-1a, 64-bit. Fixed offset basis acts as the seed; stable across platforms.
std::uint64_t fnv1a64(std::string_view data);

// Hex-encoded SHA-256 digest.
std::string sha256_hex(std::string_view data);

// Fixed-point decimal with '.' separator, e.g. format_fixed(0.5, 4) == "0.5000".
std::string format_fixed(double value, int decimals);

std::string join(const std::vector<std::string>& parts, std::string_view sep);
std::vector<std::string> split(std::string_view s, char sep);

} // namespace factprobe::util
