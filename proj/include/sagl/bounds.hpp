#ifndef SAGL_BOUNDS_HPP
#define SAGL_BOUNDS_HPP

#include <cstdint>
#include <vector>

#include "sagl/rational.hpp"
#include "sagl/signmatrix.hpp"

namespace sagl {

/// The section-1 baseline: vertex index in Z/nZ plus ceil((n-1)/2) forward
/// adjacency bits (bit k = adjacency of i to i+k mod n).
struct TrivialLabel {
    std::uint32_t n = 0;
    std::uint32_t id = 0;
    std::vector<bool> forward_bits;

    // ceil((n-1)/2) + ceil(log2 n): the exact per-vertex cost
    std::uint64_t bit_length() const;
};

std::vector<TrivialLabel> trivial_encode(const SignMatrix& signs);  // n >= 2
int trivial_decode(const TrivialLabel& a, const TrivialLabel& b);

// Fixed rational upper bound for e; over-approximation keeps the bounds valid.
const Rational& euler_upper_bound();

struct BoundValue {
    Rational exact;
    double log2_value = 0.0;
};

// Warren's theorem region count bound (8 e d k / l)^l, exact rational with e
// replaced by its rational upper bound.  Requires k >= l >= 1, d >= 1.
BoundValue warren_region_bound(std::uint64_t k, std::uint64_t l, std::uint64_t d);

struct FamilyCountBound {
    Rational exact;          // (4 e d p n / dimS)^(n dimS)
    double log2_value = 0.0;
    double c = 0.0;          // value <= 2^(c n ln n) for this n
};

FamilyCountBound family_count_bound(std::uint64_t n, std::uint64_t dim_s, std::uint64_t p,
                                    std::uint64_t d);

// log2(2^Q - 1)/Q, the scheme's bits-per-vertex exponent; < 1 for all Q >= 1.
double scheme_exponent(unsigned reduced_dim);

double log2_of_rational(const Rational& r);

}  // namespace sagl

#endif
