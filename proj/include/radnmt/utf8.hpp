#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace radnmt::utf8 {

// Splits a UTF-8 string into one string per Unicode scalar value.
// Returns nullopt when the bytes are not well-formed UTF-8 (overlong forms,
// surrogates and values above U+10FFFF are rejected).
std::optional<std::vector<std::string>> try_split_scalars(std::string_view text);

// As above, throwing InputError on malformed input.
std::vector<std::string> split_scalars(std::string_view text);

bool is_valid(std::string_view text);

// Number of scalar values in a valid UTF-8 string.
std::size_t scalar_count(std::string_view text);

bool is_single_scalar(std::string_view text);

// Whitespace split on ASCII space/tab; empty fields are skipped.
std::vector<std::string> split_tokens(std::string_view line);

// Lower-cases ASCII letters only; multi-byte sequences pass through.
std::string ascii_lower(std::string_view text);

}  // namespace radnmt::utf8
