#include "hsd/corpus.hpp"
#include "hsd/synfeat.hpp"
#include "hsd/text.hpp"
#include "support/synfeat_oracle.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

using namespace hsd;
using SV = SyntacticVector;

namespace {

using oracle::random_text;

void check_invariants(const std::string& s) {
    const std::string why = oracle::invariant_violation(s);
    REQUIRE(why.empty());
}

}  // namespace

TEST_CASE("feature names follow the frozen order") {
    const auto& names = syntactic_feature_names();
    CHECK(names[0] == "word_count");
    CHECK(names[1] == "char_count");
    CHECK(names[5] == "whitespace_ratio");
    CHECK(names[6] == "symbol_ratio_exclamation");
    CHECK(names[18] == "symbol_ratio_equals");
    CHECK(names[19] == "symbol_count_exclamation");
    CHECK(names[31] == "symbol_count_equals");
    CHECK(names[32] == "lowercase_ratio");
}

TEST_CASE("matches the character-tally oracle on hand strings") {
    REQUIRE(std::size(oracle::kSynfeatCases) == 20);
    for (const auto& c : oracle::kSynfeatCases) {
        CAPTURE(c.text);
        const SV v = extract_syntactic(c.text);
        for (std::size_t i = 0; i < kSyntacticDim; ++i) {
            CAPTURE(i);
            CHECK(v[i] == c.expected[i]);
        }
        CHECK(detail::extract_syntactic_unicode(c.text) == v);
    }
}

TEST_CASE("small worked strings") {
    const SV empty = extract_syntactic("");
    for (double x : empty.values) CHECK(x == 0.0);

    const SV ab = extract_syntactic("Ab! c");
    CHECK(ab[SV::kWordCount] == 2.0);
    CHECK(ab[SV::kCharCount] == 5.0);
    CHECK(ab[SV::kCapitalRatio] == 0.2);
    CHECK(ab[SV::kLowercaseRatio] == 0.4);
    CHECK(ab[SV::kWhitespaceRatio] == 0.2);
    CHECK(ab[SV::kSpecialRatio] == 0.2);
    CHECK(ab.symbol_ratio(0) == 0.2);
    CHECK(ab.symbol_count(0) == 1.0);

    const SV digits = extract_syntactic("1234");
    CHECK(digits[SV::kDigitRatio] == 1.0);
    CHECK(digits[SV::kWordCount] == 1.0);
}

TEST_CASE("invariants hold on 10000 fuzz strings") {
    std::mt19937_64 rng(1234);
    for (int i = 0; i < 10000; ++i) {
        const std::string s = random_text(rng);
        CAPTURE(s);
        check_invariants(s);
    }
}

TEST_CASE("ascii fast path equals the unicode path") {
    std::mt19937_64 rng(99);
    for (int i = 0; i < 3000; ++i) {
        std::string s(rng() % 120, ' ');
        for (auto& ch : s) ch = static_cast<char>(rng() % 128);
        REQUIRE(extract_syntactic(s) == detail::extract_syntactic_unicode(s));
    }
}

TEST_CASE("character permutation leaves features unchanged") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 500; ++i) {
        const std::string s = random_text(rng);
        auto cps = text::decode_utf8(s);
        std::shuffle(cps.begin(), cps.end(), rng);
        std::string t;
        for (char32_t c : cps) text::append_utf8(t, c);
        const SV a = extract_syntactic(s), b = extract_syntactic(t);
        // word_count depends on order; every other dimension must not
        for (std::size_t k = 1; k < kSyntacticDim; ++k) REQUIRE(a[k] == b[k]);
    }
}

TEST_CASE("appending an exclamation mark") {
    std::mt19937_64 rng(6);
    for (int i = 0; i < 500; ++i) {
        const std::string s = random_text(rng);
        if (s.empty()) continue;
        const SV a = extract_syntactic(s), b = extract_syntactic(s + "!");
        REQUIRE(b.symbol_count(0) == a.symbol_count(0) + 1.0);
        REQUIRE(b[SV::kCharCount] == a[SV::kCharCount] + 1.0);
    }
}

TEST_CASE("ascii class ratios sum to one") {
    std::mt19937_64 rng(8);
    for (int i = 0; i < 2000; ++i) {
        std::string s(1 + rng() % 80, ' ');
        for (auto& ch : s) ch = static_cast<char>(0x20 + rng() % 95);
        const SV v = extract_syntactic(s);
        const double sum = v[SV::kCapitalRatio] + v[SV::kLowercaseRatio] + v[SV::kDigitRatio] +
                           v[SV::kWhitespaceRatio] + v[SV::kSpecialRatio];
        REQUIRE(std::abs(sum - 1.0) <= 4 * std::numeric_limits<double>::epsilon());
    }
}

TEST_CASE("ill-formed utf-8 is counted as replacement characters") {
    const SV v = extract_syntactic("a\xff" "b");
    CHECK(v[SV::kCharCount] == 3.0);
    CHECK(v[SV::kSpecialRatio] == 1.0 / 3.0);
}

TEST_CASE("table rows follow dataset order") {
    Dataset ds;
    ds.schema = TaskSchema::for_task(Task::A);
    ds.examples = {{"x", "HI!", std::nullopt, std::nullopt}, {"y", "", std::nullopt, std::nullopt}};
    const auto t = syntactic_table(ds);
    CHECK(t.ids == std::vector<std::string>{"x", "y"});
    CHECK(t.columns.size() == kSyntacticDim);
    CHECK(t.values(0, SV::kCapitalRatio) == 2.0 / 3.0);
    CHECK(t.values(1, SV::kCharCount) == 0.0);
}
