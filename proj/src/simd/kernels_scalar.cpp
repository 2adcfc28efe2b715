#include "hsd/simd.hpp"

#include <cassert>

namespace hsd::simd {
namespace {

constexpr bool is_ascii_space(unsigned char c) { return c == ' ' || (c >= '\t' && c <= '\r'); }

bool is_ascii_scalar(std::span<const unsigned char> bytes) {
    for (unsigned char c : bytes) {
        if (c & 0x80) return false;
    }
    return true;
}

AsciiTally tally_ascii_scalar(std::span<const unsigned char> bytes) {
    AsciiTally t;
    bool prev_space = true;
    for (unsigned char c : bytes) {
        const bool space = is_ascii_space(c);
        if (c >= 'A' && c <= 'Z') ++t.upper;
        else if (c >= 'a' && c <= 'z') ++t.lower;
        else if (c >= '0' && c <= '9') ++t.digit;
        else if (space) ++t.space;
        if (!space && prev_space) ++t.words;
        prev_space = space;
        for (std::size_t s = 0; s < kTrackedSymbols.size(); ++s) {
            if (c == kTrackedSymbols[s]) ++t.symbols[s];
        }
    }
    return t;
}

void axpy_scalar(double a, std::span<const double> x, std::span<double> y) {
    assert(x.size() == y.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = y[i] + a * x[i];
}

std::size_t count_equal_scalar(std::span<const std::int32_t> a, std::span<const std::int32_t> b) {
    assert(a.size() == b.size());
    std::size_t n = 0;
    for (std::size_t i = 0; i < a.size(); ++i) n += a[i] == b[i];
    return n;
}

}  // namespace

const Kernels& scalar_kernels() {
    static constexpr Kernels k{is_ascii_scalar, tally_ascii_scalar, axpy_scalar, count_equal_scalar};
    return k;
}

}  // namespace hsd::simd
