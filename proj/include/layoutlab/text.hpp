#pragma once

#include <string>
#include <string_view>

namespace layoutlab {

/// Lowercase ASCII letters; other bytes pass through untouched.
std::string to_lower_ascii(std::string_view s);

/// Trim leading/trailing ASCII whitespace and collapse interior runs of
/// whitespace to a single space. Used to compare captions.
std::string normalize_caption(std::string_view s);

/// True if `s` consists only of ASCII whitespace (or is empty).
bool is_blank(std::string_view s);

}  // namespace layoutlab
