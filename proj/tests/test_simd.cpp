#include "hsd/simd.hpp"
#include "hsd/synfeat.hpp"

#include <doctest.h>

#include <bit>
#include <cstring>
#include <random>
#include <string>
#include <vector>

using namespace hsd;
using simd::Isa;

namespace {

std::string random_bytes(std::mt19937_64& rng, std::size_t n, bool ascii_only) {
    // Heavy on whitespace and tracked symbols so word boundaries land on
    // every lane position.
    static const std::string alphabet = "aZ9 \t\n!?@%*$&#.:/-=xY0  \r\v\f~^_";
    std::string s(n, ' ');
    for (auto& c : s) {
        if (!ascii_only && rng() % 17 == 0) {
            c = static_cast<char>(0x80 + rng() % 0x80);
        } else {
            c = alphabet[rng() % alphabet.size()];
        }
    }
    return s;
}

struct IsaGuard {
    Isa saved = simd::active_isa();
    ~IsaGuard() { simd::set_active_isa(saved); }
};

}  // namespace

TEST_CASE("dispatch reports a supported isa") {
    CHECK(simd::isa_supported(Isa::scalar));
    CHECK(simd::isa_supported(simd::active_isa()));
    CHECK(simd::isa_name(Isa::scalar) == "scalar");
    CHECK(simd::isa_name(Isa::avx2) == "avx2");
    IsaGuard guard;
    simd::set_active_isa(Isa::scalar);
    CHECK(simd::active_isa() == Isa::scalar);
    if (!simd::isa_supported(Isa::avx2)) CHECK_THROWS_AS(simd::set_active_isa(Isa::avx2), std::invalid_argument);
}

TEST_CASE("avx2 kernels match the scalar reference bit for bit") {
    if (!simd::isa_supported(Isa::avx2)) {
        MESSAGE("avx2 unavailable on this cpu; equivalence not exercised");
        return;
    }
    const auto& ref = simd::scalar_kernels();
    const auto& vec = simd::avx2_kernels();
    std::mt19937_64 rng(20240917);

    SUBCASE("byte tallies") {
        for (std::size_t n = 0; n < 300; ++n) {
            for (int rep = 0; rep < 8; ++rep) {
                const std::string s = random_bytes(rng, n, rep % 2 == 0);
                const auto bytes = simd::as_bytes(s);
                REQUIRE(ref.is_ascii(bytes) == vec.is_ascii(bytes));
                if (ref.is_ascii(bytes)) REQUIRE(ref.tally_ascii(bytes) == vec.tally_ascii(bytes));
            }
        }
        // Misaligned views into one buffer.
        const std::string big = random_bytes(rng, 4096, true);
        for (std::size_t off = 0; off < 64; ++off) {
            const auto view = simd::as_bytes(std::string_view(big).substr(off, 1000 + off * 7));
            REQUIRE(ref.tally_ascii(view) == vec.tally_ascii(view));
        }
    }

    SUBCASE("axpy") {
        std::normal_distribution<double> nd(0.0, 3.0);
        for (std::size_t n = 0; n < 130; ++n) {
            std::vector<double> x(n), y0(n);
            for (auto& v : x) v = nd(rng);
            for (auto& v : y0) v = nd(rng);
            const double a = nd(rng);
            auto y1 = y0, y2 = y0;
            ref.axpy(a, x, y1);
            vec.axpy(a, x, y2);
            REQUIRE(std::memcmp(y1.data(), y2.data(), n * sizeof(double)) == 0);
        }
    }

    SUBCASE("count_equal") {
        for (std::size_t n = 0; n < 200; ++n) {
            std::vector<std::int32_t> a(n), b(n);
            for (std::size_t i = 0; i < n; ++i) {
                a[i] = static_cast<std::int32_t>(rng() % 3);
                b[i] = static_cast<std::int32_t>(rng() % 3);
            }
            REQUIRE(ref.count_equal(a, b) == vec.count_equal(a, b));
        }
    }
}

TEST_CASE("syntactic features agree across isa choices") {
    IsaGuard guard;
    std::mt19937_64 rng(7);
    std::vector<std::string> texts;
    for (int i = 0; i < 500; ++i) texts.push_back(random_bytes(rng, rng() % 200, true));
    simd::set_active_isa(Isa::scalar);
    std::vector<SyntacticVector> ref;
    for (const auto& t : texts) ref.push_back(extract_syntactic(t));
    if (simd::isa_supported(Isa::avx2)) {
        simd::set_active_isa(Isa::avx2);
        for (std::size_t i = 0; i < texts.size(); ++i) REQUIRE(extract_syntactic(texts[i]) == ref[i]);
    }
}
