#include "sagl/bounds.hpp"

#include <cmath>
#include <stdexcept>

namespace sagl {

std::uint64_t TrivialLabel::bit_length() const {
    std::uint64_t idbits = 0;
    while ((1ULL << idbits) < n) ++idbits;
    return forward_bits.size() + idbits;
}

std::vector<TrivialLabel> trivial_encode(const SignMatrix& signs) {
    const std::size_t n = signs.n();
    if (n < 2) throw std::invalid_argument("trivial_encode: need n >= 2");
    const std::size_t half = n / 2;  // ceil((n-1)/2)
    std::vector<TrivialLabel> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i].n = static_cast<std::uint32_t>(n);
        out[i].id = static_cast<std::uint32_t>(i);
        out[i].forward_bits.resize(half);
        for (std::size_t k = 1; k <= half; ++k)
            out[i].forward_bits[k - 1] = signs.edge_bit(i, (i + k) % n);
    }
    return out;
}

int trivial_decode(const TrivialLabel& a, const TrivialLabel& b) {
    if (a.n != b.n) throw std::invalid_argument("trivial_decode: differing n");
    if (a.id == b.id) throw std::invalid_argument("trivial_decode: self query");
    const std::uint64_t n = a.n;
    const std::uint64_t half = a.forward_bits.size();
    std::uint64_t delta = (b.id + n - a.id) % n;  // j - i mod n
    if (delta >= 1 && delta <= half) return a.forward_bits[delta - 1] ? 1 : 0;
    std::uint64_t rev = (a.id + n - b.id) % n;
    return b.forward_bits[rev - 1] ? 1 : 0;
}

const Rational& euler_upper_bound() {
    static const Rational e = [] {
        Rational r(Int("27182818285"), Int("10000000000"));
        r.canonicalize();
        return r;
    }();
    return e;
}

double log2_of_rational(const Rational& r) {
    if (sgn(r) <= 0) throw std::invalid_argument("log2_of_rational: nonpositive value");
    mpf_class f(r, 128);
    long exp = 0;
    double mant = mpf_get_d_2exp(&exp, f.get_mpf_t());
    return std::log2(mant) + static_cast<double>(exp);
}

namespace {

Rational rational_pow(const Rational& base, std::uint64_t e) {
    Int num, den;
    mpz_pow_ui(num.get_mpz_t(), base.get_num().get_mpz_t(), static_cast<unsigned long>(e));
    mpz_pow_ui(den.get_mpz_t(), base.get_den().get_mpz_t(), static_cast<unsigned long>(e));
    Rational out(num, den);
    out.canonicalize();
    return out;
}

}  // namespace

BoundValue warren_region_bound(std::uint64_t k, std::uint64_t l, std::uint64_t d) {
    if (l < 1 || d < 1) throw std::invalid_argument("warren_region_bound: need l >= 1, d >= 1");
    if (k < l) throw std::invalid_argument("warren_region_bound: requires k >= l");
    Rational base = Rational(8) * euler_upper_bound() * Rational(static_cast<unsigned long>(d)) *
                    Rational(static_cast<unsigned long>(k)) /
                    Rational(static_cast<unsigned long>(l));
    BoundValue out;
    out.exact = rational_pow(base, l);
    out.log2_value = static_cast<double>(l) * log2_of_rational(base);
    return out;
}

FamilyCountBound family_count_bound(std::uint64_t n, std::uint64_t dim_s, std::uint64_t p,
                                    std::uint64_t d) {
    if (n < 1 || dim_s < 1 || p < 1 || d < 1)
        throw std::invalid_argument("family_count_bound: all arguments must be >= 1");
    Rational base = Rational(4) * euler_upper_bound() * Rational(static_cast<unsigned long>(d)) *
                    Rational(static_cast<unsigned long>(p)) *
                    Rational(static_cast<unsigned long>(n)) /
                    Rational(static_cast<unsigned long>(dim_s));
    std::uint64_t exponent = n * dim_s;
    FamilyCountBound out;
    out.exact = rational_pow(base, exponent);
    out.log2_value = static_cast<double>(exponent) * log2_of_rational(base);
    // value <= 2^(c n ln n)  <=>  c = log2(value) ln(2) / (n ln n)
    out.c = n > 1 ? out.log2_value * std::log(2.0) /
                        (static_cast<double>(n) * std::log(static_cast<double>(n)))
                  : 0.0;
    return out;
}

double scheme_exponent(unsigned reduced_dim) {
    if (reduced_dim < 1) throw std::invalid_argument("scheme_exponent: Q >= 1");
    double cells = std::pow(2.0, static_cast<double>(reduced_dim));
    return std::log2(cells - 1.0) / static_cast<double>(reduced_dim);
}

}  // namespace sagl
