#ifndef SAGL_RATIONAL_HPP
#define SAGL_RATIONAL_HPP

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace sagl {

// Exact arithmetic throughout: every sign decision in the pipeline is made on
// canonical GMP rationals, never on floating point.
using Int = mpz_class;
using Rational = mpq_class;
using RatVec = std::vector<Rational>;

inline Rational make_rational(long num, long den = 1) {
    Rational r(num, den);
    r.canonicalize();
    return r;
}

// Parses "p/q" or "p". Throws std::invalid_argument on garbage or zero denominator.
Rational rational_from_string(const std::string& text);

// Canonical "p/q" form, denominator always printed ("5" -> "5/1").
std::string rational_to_string(const Rational& r);

inline int sign_of(const Rational& r) { return sgn(r); }

// Deterministic 64-bit mixer used everywhere a seed is split; keeps hierarchy
// construction reproducible across platforms (no std::distribution involved).
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

struct SplitMix {
    std::uint64_t state;
    explicit SplitMix(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        state += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    // value in [0, bound)
    std::uint64_t below(std::uint64_t bound) { return bound ? next() % bound : 0; }
    // small signed rational with |num| <= mag, 1 <= den <= mag
    Rational small_rational(unsigned mag) {
        long num = static_cast<long>(below(2 * mag + 1)) - static_cast<long>(mag);
        long den = static_cast<long>(below(mag)) + 1;
        return make_rational(num, den);
    }
};

}  // namespace sagl

#endif
