#pragma once
// Frozen oracle table, fuzz generator and invariant checker for the
// syntactic extractor.

#include "hsd/synfeat.hpp"
#include "hsd/text.hpp"

#include <array>
#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace hsd::oracle {

struct SynfeatCase {
    const char* text;
    std::array<double, kSyntacticDim> expected;
};

inline const SynfeatCase kSynfeatCases[] = {
#include "synfeat_expected.inc"
};

// Code points spread over the classes the extractor distinguishes.
inline const std::vector<char32_t>& fuzz_pool() {
    static const std::vector<char32_t> pool = [] {
        std::vector<char32_t> p;
        for (char32_t c = 0x20; c < 0x7F; ++c) p.push_back(c);
        for (char32_t c : {0x09, 0x0A, 0x0D, 0xA0, 0x2003, 0x3000}) p.push_back(c);
        for (char32_t c : {0xC0, 0xE9, 0xDF, 0x01C5, 0x0391, 0x03B1, 0x0416, 0x0436}) p.push_back(c);
        for (char32_t c : {0x65E5, 0x672C, 0x30C6, 0x0661, 0x0662, 0x0966, 0x0301, 0x20AC, 0x00BF, 0x1F600}) p.push_back(c);
        return p;
    }();
    return pool;
}

inline std::string random_text(std::mt19937_64& rng) {
    const auto& pool = fuzz_pool();
    const std::size_t n = rng() % 64;
    std::string s;
    for (std::size_t i = 0; i < n; ++i) text::append_utf8(s, pool[rng() % pool.size()]);
    return s;
}

inline std::uint64_t as_count(double ratio, double n) { return static_cast<std::uint64_t>(std::llround(ratio * n)); }

/// Empty when every invariant holds, else the first violated one.
inline std::string invariant_violation(const std::string& s) {
    using SV = SyntacticVector;
    const SV v = extract_syntactic(s);
    const double n = v[SV::kCharCount];
    if (n != static_cast<double>(text::decode_utf8(s).size())) return "char_count";
    if (v[SV::kWordCount] < 0.0 || v[SV::kWordCount] != std::floor(v[SV::kWordCount])) return "word_count";
    for (std::size_t i : {SV::kCapitalRatio, SV::kDigitRatio, SV::kSpecialRatio, SV::kWhitespaceRatio, SV::kLowercaseRatio}) {
        if (!(v[i] >= 0.0 && v[i] <= 1.0)) return "ratio range " + std::to_string(i);
    }
    std::uint64_t symbol_total = 0;
    for (std::size_t k = 0; k < kSymbolCount; ++k) {
        const double c = v.symbol_count(k);
        if (c < 0.0 || c != std::floor(c)) return "symbol count " + std::to_string(k);
        if (!(v.symbol_ratio(k) >= 0.0 && v.symbol_ratio(k) <= 1.0)) return "symbol ratio range " + std::to_string(k);
        // ratio is the correctly rounded quotient count / char_count
        if (v.symbol_ratio(k) != (n == 0.0 ? 0.0 : c / n)) return "symbol ratio " + std::to_string(k);
        symbol_total += static_cast<std::uint64_t>(c);
    }
    if (symbol_total > as_count(v[SV::kSpecialRatio], n)) return "symbols exceed specials";
    const std::uint64_t classes = as_count(v[SV::kCapitalRatio], n) + as_count(v[SV::kLowercaseRatio], n) +
                                  as_count(v[SV::kDigitRatio], n) + as_count(v[SV::kWhitespaceRatio], n) +
                                  as_count(v[SV::kSpecialRatio], n);
    if (classes > static_cast<std::uint64_t>(n)) return "classes exceed char_count";
    return {};
}

}  // namespace hsd::oracle
