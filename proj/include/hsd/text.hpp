#pragma once
// Unicode scalar iteration and character properties (ICU-backed).

#include <string>
#include <string_view>
#include <vector>

namespace hsd::text {

/// Decodes UTF-8 into scalar values; ill-formed sequences become U+FFFD.
std::u32string decode_utf8(std::string_view utf8);
void append_utf8(std::string& out, char32_t cp);

bool is_white_space(char32_t cp);  // Unicode White_Space
bool is_upper(char32_t cp);        // general category Lu
bool is_lower(char32_t cp);        // general category Ll
bool is_letter(char32_t cp);       // general category L*
bool is_decimal_digit(char32_t cp);  // general category Nd

/// Lowercases scalar-by-scalar (simple case mapping) and splits on maximal
/// White_Space runs. Empty tokens never appear.
std::vector<std::string> lower_tokens(std::string_view utf8);

}  // namespace hsd::text
