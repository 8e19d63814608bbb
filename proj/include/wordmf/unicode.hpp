#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

// Minimal UTF-8 and Latin-script character handling, enough for whitespace
// tokenization of European-language texts. Letters outside the Latin ranges
// handled here are treated as non-letters; lowercasing is a simple 1:1 map.

namespace wordmf::uni {

inline constexpr char32_t kInvalid = 0xFFFFFFFFu;

// Decodes the code point starting at s[i] and advances i past it.
// Returns kInvalid (and advances by one byte) on malformed input:
// stray continuation bytes, truncated or overlong sequences, surrogates,
// values above U+10FFFF.
char32_t next_codepoint(std::string_view s, std::size_t& i);

bool valid_utf8(std::string_view s);

void append_utf8(std::string& out, char32_t cp);

// Number of code points; throws wordmf::Error on malformed input.
std::size_t codepoint_count(std::string_view s);

// Letters of the Basic Latin, Latin-1, Latin Extended-A/B and Latin
// Extended Additional blocks. Digits, marks and symbols are not letters.
bool is_letter(char32_t cp);

// ASCII whitespace plus the common Unicode space separators.
bool is_space(char32_t cp);

// Simple lowercase mapping for ASCII, Latin-1, Latin Extended-A and the
// regular pairs of Latin Extended Additional. Everything else maps to itself.
char32_t to_lower(char32_t cp);

}  // namespace wordmf::uni
