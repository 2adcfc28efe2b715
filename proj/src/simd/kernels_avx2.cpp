#include "hsd/simd.hpp"

#if defined(__AVX2__)
#include <immintrin.h>

#include <bit>
#include <cassert>

namespace hsd::simd {
namespace {

// Bytes are known to be < 0x80, so signed byte compares are range checks.
inline std::uint32_t in_range(__m256i v, char lo, char hi) {
    const __m256i ge = _mm256_cmpgt_epi8(v, _mm256_set1_epi8(static_cast<char>(lo - 1)));
    const __m256i le = _mm256_cmpgt_epi8(_mm256_set1_epi8(static_cast<char>(hi + 1)), v);
    return static_cast<std::uint32_t>(_mm256_movemask_epi8(_mm256_and_si256(ge, le)));
}

inline std::uint32_t equal_to(__m256i v, unsigned char c) {
    return static_cast<std::uint32_t>(
        _mm256_movemask_epi8(_mm256_cmpeq_epi8(v, _mm256_set1_epi8(static_cast<char>(c)))));
}

bool is_ascii_avx2(std::span<const unsigned char> bytes) {
    std::size_t i = 0;
    __m256i acc = _mm256_setzero_si256();
    for (; i + 32 <= bytes.size(); i += 32) {
        acc = _mm256_or_si256(acc, _mm256_loadu_si256(reinterpret_cast<const __m256i*>(bytes.data() + i)));
    }
    if (_mm256_movemask_epi8(acc) != 0) return false;
    for (; i < bytes.size(); ++i) {
        if (bytes[i] & 0x80) return false;
    }
    return true;
}

AsciiTally tally_ascii_avx2(std::span<const unsigned char> bytes) {
    AsciiTally t;
    // Bit 0 of `carry` is 1 when the byte before the current block is non-space.
    std::uint32_t carry = 0;
    std::size_t i = 0;
    for (; i + 32 <= bytes.size(); i += 32) {
        const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(bytes.data() + i));
        const std::uint32_t space = equal_to(v, ' ') | in_range(v, '\t', '\r');
        t.upper += std::popcount(in_range(v, 'A', 'Z'));
        t.lower += std::popcount(in_range(v, 'a', 'z'));
        t.digit += std::popcount(in_range(v, '0', '9'));
        t.space += std::popcount(space);
        const std::uint32_t word = ~space;
        t.words += std::popcount(word & ~((word << 1) | carry));
        carry = word >> 31;
        for (std::size_t s = 0; s < kTrackedSymbols.size(); ++s) {
            t.symbols[s] += std::popcount(equal_to(v, kTrackedSymbols[s]));
        }
    }
    if (i < bytes.size()) {
        AsciiTally tail = scalar_kernels().tally_ascii(bytes.subspan(i));
        // The scalar tail counts a word start at its first byte; undo it if
        // the run began in the vector part.
        const bool tail_starts_word = !(bytes[i] == ' ' || (bytes[i] >= '\t' && bytes[i] <= '\r'));
        if (carry && tail_starts_word) --tail.words;
        t.upper += tail.upper;
        t.lower += tail.lower;
        t.digit += tail.digit;
        t.space += tail.space;
        t.words += tail.words;
        for (std::size_t s = 0; s < kTrackedSymbols.size(); ++s) t.symbols[s] += tail.symbols[s];
    }
    return t;
}

void axpy_avx2(double a, std::span<const double> x, std::span<double> y) {
    assert(x.size() == y.size());
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= x.size(); i += 4) {
        const __m256d vx = _mm256_loadu_pd(x.data() + i);
        const __m256d vy = _mm256_loadu_pd(y.data() + i);
        _mm256_storeu_pd(y.data() + i, _mm256_add_pd(vy, _mm256_mul_pd(va, vx)));
    }
    for (; i < x.size(); ++i) y[i] = y[i] + a * x[i];
}

std::size_t count_equal_avx2(std::span<const std::int32_t> a, std::span<const std::int32_t> b) {
    assert(a.size() == b.size());
    std::size_t n = 0;
    std::size_t i = 0;
    for (; i + 8 <= a.size(); i += 8) {
        const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a.data() + i));
        const __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b.data() + i));
        const int mask = _mm256_movemask_ps(_mm256_castsi256_ps(_mm256_cmpeq_epi32(va, vb)));
        n += std::popcount(static_cast<unsigned>(mask));
    }
    for (; i < a.size(); ++i) n += a[i] == b[i];
    return n;
}

}  // namespace

const Kernels& avx2_kernels() {
    static constexpr Kernels k{is_ascii_avx2, tally_ascii_avx2, axpy_avx2, count_equal_avx2};
    return k;
}

}  // namespace hsd::simd

#else

namespace hsd::simd {

// Non-x86 builds: the table aliases the scalar kernels and isa_supported()
// reports AVX2 as unavailable.
const Kernels& avx2_kernels() { return scalar_kernels(); }

}  // namespace hsd::simd

#endif
