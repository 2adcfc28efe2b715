#pragma once
// Data-parallel inner loops shared by the feature extractors and learners.
//
// Every kernel has a scalar reference implementation and an AVX2 variant.
// The active variant is picked once at startup from CPUID and may be forced
// with HSD_SIMD=scalar|avx2. Variants return bit-identical results: the
// kernels are either integer tallies or element-wise double arithmetic with
// no reassociation, and the project builds with -ffp-contract=off.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace hsd::simd {

enum class Isa { scalar, avx2 };

/// The 13 tracked ASCII symbols, in feature order.
inline constexpr std::array<unsigned char, 13> kTrackedSymbols = {
    '!', '?', '@', '%', '*', '$', '&', '#', '.', ':', '/', '-', '='};

/// Character-class tally over an ASCII byte string.
///
/// Whitespace is the ASCII subset of the Unicode White_Space property
/// (TAB, LF, VT, FF, CR, SPACE). `words` counts maximal runs of
/// non-whitespace bytes.
struct AsciiTally {
    std::uint64_t upper = 0;
    std::uint64_t lower = 0;
    std::uint64_t digit = 0;
    std::uint64_t space = 0;
    std::uint64_t words = 0;
    std::array<std::uint64_t, kTrackedSymbols.size()> symbols{};

    friend bool operator==(const AsciiTally&, const AsciiTally&) = default;
};

struct Kernels {
    bool (*is_ascii)(std::span<const unsigned char> bytes);
    AsciiTally (*tally_ascii)(std::span<const unsigned char> bytes);
    // y[i] += a * x[i]
    void (*axpy)(double a, std::span<const double> x, std::span<double> y);
    std::size_t (*count_equal)(std::span<const std::int32_t> a, std::span<const std::int32_t> b);
};

const Kernels& scalar_kernels();
const Kernels& avx2_kernels();

bool isa_supported(Isa isa);
std::string_view isa_name(Isa isa);

/// Currently dispatched ISA.
Isa active_isa();
/// Force a variant; throws std::invalid_argument if the CPU lacks it.
void set_active_isa(Isa isa);
const Kernels& kernels();

inline bool is_ascii(std::span<const unsigned char> bytes) { return kernels().is_ascii(bytes); }
inline AsciiTally tally_ascii(std::span<const unsigned char> bytes) { return kernels().tally_ascii(bytes); }
inline void axpy(double a, std::span<const double> x, std::span<double> y) { kernels().axpy(a, x, y); }
inline std::size_t count_equal(std::span<const std::int32_t> a, std::span<const std::int32_t> b) {
    return kernels().count_equal(a, b);
}

inline std::span<const unsigned char> as_bytes(std::string_view s) {
    return {reinterpret_cast<const unsigned char*>(s.data()), s.size()};
}

}  // namespace hsd::simd
