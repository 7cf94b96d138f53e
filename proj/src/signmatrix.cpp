#include "sagl/signmatrix.hpp"

#include <algorithm>
#include <map>

#include "sagl/parallel.hpp"

namespace sagl {

std::optional<std::pair<std::size_t, std::size_t>> SignMatrix::first_zero_pair() const {
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = i + 1; j < n_; ++j)
            if (at(i, j) == 0) return std::make_pair(i, j);
    return std::nullopt;
}

// Direct evaluation of f on the raw points, with one positive integer scaling
// per point so the pair loop runs on plain mpz products.  sign(f(x,y)) equals
// sign(sum coef * Zx[a] * Zy[b]) because the per-point scales are positive and
// f is bilinear in the two monomial vectors.
SignMatrix build_sign_matrix(const std::vector<RatVec>& points, const PolynomialPredicate& pred,
                             unsigned threads) {
    const std::size_t n = points.size();
    SignMatrix m(n);
    if (n == 0) return m;

    // distinct single-argument exponent vectors
    std::map<ExponentVec, std::size_t> index;
    std::vector<ExponentVec> exps;
    auto intern = [&](const ExponentVec& e) {
        auto [it, fresh] = index.emplace(e, exps.size());
        if (fresh) exps.push_back(e);
        return it->second;
    };
    struct Triple {
        std::size_t ia, ib;
        Int coef;
    };
    std::vector<Triple> triples;
    for (const auto& [key, coef] : pred.terms())
        triples.push_back(Triple{intern(key.xexp), intern(key.yexp), coef});

    const unsigned q = pred.q();
    std::vector<std::vector<Int>> scaled(n);
    parallel_for(
        n,
        [&](std::size_t i) {
            RatVec vals;
            vals.reserve(exps.size());
            for (const auto& e : exps) {
                Rational v(1);
                for (unsigned c = 0; c < q; ++c)
                    for (unsigned p = 0; p < e[c]; ++p) v *= points[i][c];
                vals.push_back(std::move(v));
            }
            Int lcm(1);
            for (const auto& v : vals)
                mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), v.get_den().get_mpz_t());
            auto& zi = scaled[i];
            zi.reserve(vals.size());
            for (const auto& v : vals) {
                Int z = v.get_num() * (lcm / v.get_den());
                zi.push_back(std::move(z));
            }
        },
        threads);

    parallel_for(
        n,
        [&](std::size_t i) {
            Int acc, prod;
            for (std::size_t j = i; j < n; ++j) {
                acc = 0;
                for (const auto& t : triples) {
                    mpz_mul(prod.get_mpz_t(), scaled[i][t.ia].get_mpz_t(),
                            scaled[j][t.ib].get_mpz_t());
                    mpz_addmul(acc.get_mpz_t(), prod.get_mpz_t(), t.coef.get_mpz_t());
                }
                m.set(i, j, sgn(acc));
            }
        },
        threads);
    return m;
}

}  // namespace sagl
