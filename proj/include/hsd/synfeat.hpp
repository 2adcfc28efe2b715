#pragma once
// Surface ("syntactic") text features: character-class counts and ratios.
//
// Frozen dimension order (33 values):
//   [0] word_count  [1] char_count  [2] capital_ratio  [3] digit_ratio
//   [4] special_char_ratio  [5] whitespace_ratio
//   [6..18]  symbol ratios for ! ? @ % * $ & # . : / - =
//   [19..31] symbol counts, same symbol order
//   [32] lowercase_ratio
//
// Characters are Unicode scalar values. Every ratio divides by char_count
// and is 0 for the empty string. "special" means neither letter, decimal
// digit nor White_Space, so it includes all 13 tracked symbols.

#include "hsd/io.hpp"

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>

namespace hsd {

struct Dataset;

inline constexpr std::size_t kSyntacticDim = 33;
inline constexpr std::size_t kSymbolCount = 13;

struct SyntacticVector {
    static constexpr std::size_t kWordCount = 0;
    static constexpr std::size_t kCharCount = 1;
    static constexpr std::size_t kCapitalRatio = 2;
    static constexpr std::size_t kDigitRatio = 3;
    static constexpr std::size_t kSpecialRatio = 4;
    static constexpr std::size_t kWhitespaceRatio = 5;
    static constexpr std::size_t kSymbolRatioBase = 6;
    static constexpr std::size_t kSymbolCountBase = 19;
    static constexpr std::size_t kLowercaseRatio = 32;

    std::array<double, kSyntacticDim> values{};

    double operator[](std::size_t i) const { return values[i]; }
    double symbol_ratio(std::size_t s) const { return values[kSymbolRatioBase + s]; }
    double symbol_count(std::size_t s) const { return values[kSymbolCountBase + s]; }

    friend bool operator==(const SyntacticVector&, const SyntacticVector&) = default;
};

/// Column names in frozen order.
const std::array<std::string, kSyntacticDim>& syntactic_feature_names();

SyntacticVector extract_syntactic(std::string_view utf8);

/// One row per example, in dataset order.
FeatureTable syntactic_table(const Dataset& dataset);

namespace detail {
// Scalar-by-scalar path through ICU properties; extract_syntactic takes a
// SIMD tally shortcut for pure-ASCII input and must agree with this.
SyntacticVector extract_syntactic_unicode(std::string_view utf8);
}  // namespace detail

}  // namespace hsd
