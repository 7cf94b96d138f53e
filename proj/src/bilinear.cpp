#include "sagl/bilinear.hpp"

#include <map>
#include <stdexcept>

namespace sagl {

namespace {

void enumerate_degree(unsigned q, unsigned remaining, unsigned pos, ExponentVec& cur,
                      std::vector<ExponentVec>& out) {
    if (pos + 1 == q) {
        cur[pos] = remaining;
        out.push_back(cur);
        return;
    }
    // earlier coordinates take as much as possible first: lex-descending ties
    for (int e = static_cast<int>(remaining); e >= 0; --e) {
        cur[pos] = static_cast<unsigned>(e);
        enumerate_degree(q, remaining - static_cast<unsigned>(e), pos + 1, cur, out);
    }
    cur[pos] = 0;
}

}  // namespace

MonomialBasis::MonomialBasis(unsigned q, unsigned degree) : q_(q), degree_(degree) {
    if (q == 0) throw std::invalid_argument("MonomialBasis: q must be positive");
    ExponentVec cur(q, 0);
    for (unsigned t = 0; t <= degree; ++t) enumerate_degree(q, t, 0, cur, monomials_);
}

std::size_t MonomialBasis::index_of(const ExponentVec& e) const {
    for (std::size_t i = 0; i < monomials_.size(); ++i)
        if (monomials_[i] == e) return i;
    throw std::invalid_argument("MonomialBasis::index_of: monomial not in basis");
}

RatVec veronese_lift(const RatVec& point, const MonomialBasis& basis) {
    if (point.size() != basis.q())
        throw std::invalid_argument("veronese_lift: point dimension mismatch");
    RatVec out;
    out.reserve(basis.size());
    for (const auto& exp : basis.monomials()) {
        Rational v(1);
        for (unsigned i = 0; i < basis.q(); ++i)
            for (unsigned e = 0; e < exp[i]; ++e) v *= point[i];
        out.push_back(std::move(v));
    }
    return out;
}

BilinearForm to_bilinear(const PolynomialPredicate& f) {
    MonomialBasis basis(f.q(), f.arg_degree());
    RatMatrix m(basis.size(), basis.size());
    for (const auto& [key, coef] : f.terms()) {
        std::size_t i = basis.index_of(key.xexp);
        std::size_t j = basis.index_of(key.yexp);
        m.at(i, j) += Rational(coef);
    }
    return BilinearForm{std::move(basis), std::move(m)};
}

DiagonalizedForm congruence_diagonalize(const BilinearForm& form) {
    if (!form.matrix.is_symmetric())
        throw std::invalid_argument("congruence_diagonalize: matrix not symmetric");
    const std::size_t n = form.dim();
    RatMatrix a(form.matrix);
    RatMatrix p = RatMatrix::identity(n);
    RatMatrix pinv = RatMatrix::identity(n);

    auto swap_coords = [&](std::size_t k, std::size_t j) {
        for (std::size_t c = 0; c < n; ++c) swap(a.at(k, c), a.at(j, c));
        for (std::size_t r = 0; r < n; ++r) swap(a.at(r, k), a.at(r, j));
        for (std::size_t r = 0; r < n; ++r) swap(p.at(r, k), p.at(r, j));
        for (std::size_t c = 0; c < n; ++c) swap(pinv.at(k, c), pinv.at(j, c));
    };
    // e_k <- e_k + e_j
    auto transvect = [&](std::size_t k, std::size_t j) {
        for (std::size_t r = 0; r < n; ++r) a.at(r, k) += a.at(r, j);
        for (std::size_t c = 0; c < n; ++c) a.at(k, c) += a.at(j, c);
        for (std::size_t r = 0; r < n; ++r) p.at(r, k) += p.at(r, j);
        for (std::size_t c = 0; c < n; ++c) pinv.at(j, c) -= pinv.at(k, c);
    };

    for (std::size_t k = 0; k < n; ++k) {
        if (sgn(a.at(k, k)) == 0) {
            std::size_t dj = n;
            for (std::size_t j = k + 1; j < n; ++j)
                if (sgn(a.at(j, j)) != 0) {
                    dj = j;
                    break;
                }
            if (dj < n) {
                swap_coords(k, dj);
            } else {
                std::size_t oj = n;
                for (std::size_t j = k + 1; j < n; ++j)
                    if (sgn(a.at(k, j)) != 0) {
                        oj = j;
                        break;
                    }
                if (oj == n) continue;  // whole residual row is zero
                // remaining diagonal is all zero, so the move makes a(k,k) = 2 a(k,oj) != 0
                transvect(k, oj);
            }
        }
        const Rational pivot = a.at(k, k);
        for (std::size_t j = k + 1; j < n; ++j) {
            if (sgn(a.at(k, j)) == 0) continue;
            Rational f = a.at(k, j) / pivot;
            // col_j -= f col_k, row_j -= f row_k
            for (std::size_t r = 0; r < n; ++r) a.at(r, j) -= f * a.at(r, k);
            for (std::size_t c = 0; c < n; ++c) a.at(j, c) -= f * a.at(k, c);
            for (std::size_t r = 0; r < n; ++r) p.at(r, j) -= f * p.at(r, k);
            for (std::size_t c = 0; c < n; ++c) pinv.at(k, c) += f * pinv.at(j, c);
        }
    }

    // post-condition: P^T M P reproduces the padded diagonal exactly
    RatMatrix check = p.transposed().multiply(form.matrix).multiply(p);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const Rational& expect = (i == j) ? a.at(i, i) : Rational(0);
            if (check.at(i, j) != expect)
                throw std::logic_error("congruence_diagonalize: congruence identity violated");
        }

    DiagonalizedForm out{form.basis, 0, {}, RatMatrix(), std::move(p), 0, 0};
    std::vector<std::size_t> kept;
    for (std::size_t k = 0; k < n; ++k)
        if (sgn(a.at(k, k)) != 0) kept.push_back(k);
    out.reduced_dim = kept.size();
    out.basis_inverse = RatMatrix(kept.size(), n);
    for (std::size_t r = 0; r < kept.size(); ++r) {
        out.diagonal.push_back(a.at(kept[r], kept[r]));
        for (std::size_t c = 0; c < n; ++c) out.basis_inverse.at(r, c) = pinv.at(kept[r], c);
        if (sgn(out.diagonal.back()) > 0) ++out.count_positive;
        else ++out.count_negative;
    }
    return out;
}

RatVec reduced_lift(const RatVec& point, const DiagonalizedForm& form) {
    return form.basis_inverse.apply(veronese_lift(point, form.basis));
}

EdgeSign edge_sign_reduced(const RatVec& xr, const RatVec& yr, const DiagonalizedForm& form) {
    if (xr.size() != form.reduced_dim || yr.size() != form.reduced_dim)
        throw std::invalid_argument("edge_sign_reduced: vector dimension mismatch");
    Rational acc;
    for (std::size_t k = 0; k < form.reduced_dim; ++k) acc += form.diagonal[k] * xr[k] * yr[k];
    return edge_sign_from_int(sgn(acc));
}

EdgeSign edge_sign(const RatVec& x, const RatVec& y, const DiagonalizedForm& form) {
    return edge_sign_reduced(reduced_lift(x, form), reduced_lift(y, form), form);
}

RatVec hyperplane_normal(const RatVec& y, const DiagonalizedForm& form) {
    RatVec yr = reduced_lift(y, form);
    for (std::size_t k = 0; k < form.reduced_dim; ++k) yr[k] *= form.diagonal[k];
    return yr;
}

}  // namespace sagl
