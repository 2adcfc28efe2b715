#include "hsd/text.hpp"

#include <unicode/uchar.h>
#include <unicode/utf8.h>

namespace hsd::text {

std::u32string decode_utf8(std::string_view utf8) {
    std::u32string out;
    out.reserve(utf8.size());
    const auto* s = reinterpret_cast<const uint8_t*>(utf8.data());
    const auto length = static_cast<int32_t>(utf8.size());
    int32_t i = 0;
    while (i < length) {
        UChar32 c = 0;
        U8_NEXT(s, i, length, c);
        out.push_back(c < 0 ? U'�' : static_cast<char32_t>(c));
    }
    return out;
}

void append_utf8(std::string& out, char32_t cp) {
    uint8_t buf[U8_MAX_LENGTH];
    int32_t n = 0;
    UBool error = false;
    U8_APPEND(buf, n, U8_MAX_LENGTH, static_cast<UChar32>(cp), error);
    if (error) {
        out += "\xEF\xBF\xBD";
        return;
    }
    out.append(reinterpret_cast<const char*>(buf), static_cast<std::size_t>(n));
}

bool is_white_space(char32_t cp) { return u_isUWhiteSpace(static_cast<UChar32>(cp)); }
bool is_upper(char32_t cp) { return u_charType(static_cast<UChar32>(cp)) == U_UPPERCASE_LETTER; }
bool is_lower(char32_t cp) { return u_charType(static_cast<UChar32>(cp)) == U_LOWERCASE_LETTER; }
bool is_letter(char32_t cp) { return u_isalpha(static_cast<UChar32>(cp)); }
bool is_decimal_digit(char32_t cp) { return u_charType(static_cast<UChar32>(cp)) == U_DECIMAL_DIGIT_NUMBER; }

std::vector<std::string> lower_tokens(std::string_view utf8) {
    std::vector<std::string> tokens;
    std::string current;
    for (char32_t cp : decode_utf8(utf8)) {
        if (is_white_space(cp)) {
            if (!current.empty()) tokens.push_back(std::move(current));
            current.clear();
        } else {
            append_utf8(current, static_cast<char32_t>(u_tolower(static_cast<UChar32>(cp))));
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

}  // namespace hsd::text
