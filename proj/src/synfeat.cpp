#include "hsd/synfeat.hpp"

#include "hsd/corpus.hpp"
#include "hsd/simd.hpp"
#include "hsd/text.hpp"

namespace hsd {
namespace {

constexpr std::array<const char*, kSymbolCount> kSymbolNames = {
    "exclamation", "question", "at",   "percent", "asterisk", "dollar", "ampersand",
    "hash",        "period",   "colon", "slash",  "hyphen",   "equals"};

struct Tally {
    std::uint64_t chars = 0;
    std::uint64_t words = 0;
    std::uint64_t upper = 0;
    std::uint64_t lower = 0;
    std::uint64_t digit = 0;
    std::uint64_t space = 0;
    std::uint64_t special = 0;
    std::array<std::uint64_t, kSymbolCount> symbols{};
};

SyntacticVector to_vector(const Tally& t) {
    SyntacticVector v;
    auto ratio = [&](std::uint64_t count) {
        return t.chars == 0 ? 0.0 : static_cast<double>(count) / static_cast<double>(t.chars);
    };
    v.values[SyntacticVector::kWordCount] = static_cast<double>(t.words);
    v.values[SyntacticVector::kCharCount] = static_cast<double>(t.chars);
    v.values[SyntacticVector::kCapitalRatio] = ratio(t.upper);
    v.values[SyntacticVector::kDigitRatio] = ratio(t.digit);
    v.values[SyntacticVector::kSpecialRatio] = ratio(t.special);
    v.values[SyntacticVector::kWhitespaceRatio] = ratio(t.space);
    for (std::size_t s = 0; s < kSymbolCount; ++s) {
        v.values[SyntacticVector::kSymbolRatioBase + s] = ratio(t.symbols[s]);
        v.values[SyntacticVector::kSymbolCountBase + s] = static_cast<double>(t.symbols[s]);
    }
    v.values[SyntacticVector::kLowercaseRatio] = ratio(t.lower);
    return v;
}

}  // namespace

const std::array<std::string, kSyntacticDim>& syntactic_feature_names() {
    static const auto names = [] {
        std::array<std::string, kSyntacticDim> n;
        n[0] = "word_count";
        n[1] = "char_count";
        n[2] = "capital_ratio";
        n[3] = "digit_ratio";
        n[4] = "special_char_ratio";
        n[5] = "whitespace_ratio";
        for (std::size_t s = 0; s < kSymbolCount; ++s) {
            n[SyntacticVector::kSymbolRatioBase + s] = std::string("symbol_ratio_") + kSymbolNames[s];
            n[SyntacticVector::kSymbolCountBase + s] = std::string("symbol_count_") + kSymbolNames[s];
        }
        n[32] = "lowercase_ratio";
        return n;
    }();
    return names;
}

namespace detail {

SyntacticVector extract_syntactic_unicode(std::string_view utf8) {
    Tally t;
    bool prev_space = true;
    for (char32_t cp : text::decode_utf8(utf8)) {
        ++t.chars;
        const bool space = text::is_white_space(cp);
        if (space) {
            ++t.space;
        } else if (text::is_decimal_digit(cp)) {
            ++t.digit;
        } else if (text::is_letter(cp)) {
            if (text::is_upper(cp)) ++t.upper;
            else if (text::is_lower(cp)) ++t.lower;
        } else {
            ++t.special;
            for (std::size_t s = 0; s < kSymbolCount; ++s) {
                if (cp == simd::kTrackedSymbols[s]) ++t.symbols[s];
            }
        }
        if (!space && prev_space) ++t.words;
        prev_space = space;
    }
    return to_vector(t);
}

}  // namespace detail

SyntacticVector extract_syntactic(std::string_view utf8) {
    const auto bytes = simd::as_bytes(utf8);
    if (!simd::is_ascii(bytes)) return detail::extract_syntactic_unicode(utf8);

    const simd::AsciiTally a = simd::tally_ascii(bytes);
    Tally t;
    t.chars = bytes.size();
    t.words = a.words;
    t.upper = a.upper;
    t.lower = a.lower;
    t.digit = a.digit;
    t.space = a.space;
    t.special = t.chars - a.upper - a.lower - a.digit - a.space;
    t.symbols = a.symbols;
    return to_vector(t);
}

FeatureTable syntactic_table(const Dataset& dataset) {
    FeatureTable table;
    const auto& names = syntactic_feature_names();
    table.columns.assign(names.begin(), names.end());
    table.values = Matrix(dataset.examples.size(), kSyntacticDim);
    for (std::size_t i = 0; i < dataset.examples.size(); ++i) {
        const auto& ex = dataset.examples[i];
        table.ids.push_back(ex.id);
        const auto v = extract_syntactic(ex.text);
        std::copy(v.values.begin(), v.values.end(), table.values.row(i).begin());
    }
    return table;
}

}  // namespace hsd
