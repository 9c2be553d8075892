#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace cdxsem::text {

// Decodes the UTF-8 code point starting at s[i] and advances i past it.
// Malformed bytes decode as U+FFFD and advance by a single byte.
char32_t decode_utf8(std::string_view s, std::size_t& i);

void append_utf8(std::string& out, char32_t cp);

// Letters as they occur in URLs of the corpora we target: ASCII, Latin-1
// supplement and Latin Extended-A. Everything above U+017F is treated as
// a token separator.
bool is_alpha(char32_t cp);
char32_t to_lower(char32_t cp);

// UTF-8 aware lowercasing with the same mapping the tokenizer uses.
std::string lowercase_word(std::string_view s);

std::size_t codepoint_count(std::string_view s);

// Decodes %xx escapes exactly once; malformed escapes are kept literally.
std::string percent_decode(std::string_view s);

std::vector<std::string_view> split_whitespace(std::string_view line);

std::string_view trim(std::string_view s);

bool iequals_ascii(std::string_view a, std::string_view b);
bool ends_with_ci(std::string_view s, std::string_view suffix);

std::uint64_t fnv1a64(std::string_view s);

} // namespace cdxsem::text
