#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace roledet {

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
std::vector<std::string> split_whitespace(std::string_view s);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

/// FNV-1a, 64 bit. Used for cache keys and per-item seeds.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);

}  // namespace roledet
