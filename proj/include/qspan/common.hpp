#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace qspan {

// Error taxonomy. Everything user-triggerable throws one of these so the CLI
// can map them to readable messages instead of raw runtime_errors.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct dimension_error : error {
    using error::error;
};

// Malformed text input; carries a 0-based offset into the offending string/line.
// `bare` is the message without the position suffix, so callers that add line
// context can rewrap without duplicating "(at position N)".
struct parse_error : error {
    std::size_t position;
    std::string bare;
    parse_error(const std::string& msg, std::size_t pos)
        : error(msg + " (at position " + std::to_string(pos) + ")"), position(pos), bare(msg) {}
};

struct non_clifford_error : error {
    using error::error;
};

// Signed-group contradictions: -I in the span, inconsistent duplicate signs.
struct stabilizer_error : error {
    using error::error;
};

// Structural preconditions violated (non-maximal group where maximal needed, etc).
struct structure_error : error {
    using error::error;
};

struct needs_signs_error : error {
    using error::error;
};

// Enumeration guard: APIs that materialize group elements refuse above 2^22.
struct size_limit_error : error {
    using error::error;
};

inline constexpr int kMaxEnumerationBits = 22;

// Deterministic RNG helpers. mt19937_64 output is portable across platforms;
// std::uniform_int_distribution and std::normal_distribution are not, so we
// roll our own mappings on top of the raw 64-bit stream.
using Rng = std::mt19937_64;

// Unbiased integer in [0, bound) by rejection sampling.
inline std::uint64_t rng_below(Rng& rng, std::uint64_t bound) {
    if (bound == 0) throw error("rng_below: bound must be positive");
    std::uint64_t threshold = (0 - bound) % bound;  // 2^64 mod bound
    for (;;) {
        std::uint64_t r = rng();
        if (r >= threshold) return r % bound;
    }
}

inline bool rng_bit(Rng& rng) { return (rng() >> 63) != 0; }

// Uniform double in [0,1) with 53 random bits.
inline double rng_unit(Rng& rng) {
    return static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
}

// Standard normal via Box-Muller (portable, unlike std::normal_distribution).
inline double rng_gauss(Rng& rng) {
    double u1 = rng_unit(rng);
    while (u1 == 0.0) u1 = rng_unit(rng);
    double u2 = rng_unit(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

}  // namespace qspan
