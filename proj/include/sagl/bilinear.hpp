#ifndef SAGL_BILINEAR_HPP
#define SAGL_BILINEAR_HPP

#include <cstddef>
#include <utility>
#include <vector>

#include "sagl/matrix.hpp"
#include "sagl/polynomial.hpp"
#include "sagl/rational.hpp"

namespace sagl {

/// All monomials of total degree <= degree on q variables, graded-lex order:
/// ascending total degree, ties broken lexicographically with earlier
/// coordinates dominating.  Entry 0 is the constant monomial.
class MonomialBasis {
public:
    MonomialBasis(unsigned q, unsigned degree);

    unsigned q() const { return q_; }
    unsigned degree() const { return degree_; }
    std::size_t size() const { return monomials_.size(); }  // binom(q+degree, degree)
    const std::vector<ExponentVec>& monomials() const { return monomials_; }
    std::size_t index_of(const ExponentVec& e) const;  // throws if absent

private:
    unsigned q_;
    unsigned degree_;
    std::vector<ExponentVec> monomials_;
};

// Evaluates every basis monomial at the point.  Entry 0 is always 1.
RatVec veronese_lift(const RatVec& point, const MonomialBasis& basis);

/// f rewritten as lift(x)^T M lift(y); M symmetric because f is.
struct BilinearForm {
    MonomialBasis basis;
    RatMatrix matrix;  // size() x size()

    std::size_t dim() const { return basis.size(); }
};

BilinearForm to_bilinear(const PolynomialPredicate& f);

enum class EdgeSign : int { Negative = -1, Zero = 0, Positive = 1 };

/// Congruence-diagonalized form with null coordinates deleted.  The diagonal
/// stays rational; downstream code only ever uses exact values and signs, so
/// the classical +/-1 normalization (which needs square roots) is not applied.
struct DiagonalizedForm {
    MonomialBasis basis;        // of the source bilinear form
    std::size_t reduced_dim;    // Q: nonzero diagonal entries
    RatVec diagonal;            // length Q, all nonzero
    RatMatrix basis_inverse;    // Q x Q0, maps a lifted vector to reduced coordinates
    RatMatrix change_of_basis;  // Q0 x Q0 invertible P with P^T M P = diag(diagonal, 0...)
    std::size_t count_positive;
    std::size_t count_negative;

    std::pair<std::size_t, std::size_t> signature() const {
        return {count_positive, count_negative};
    }
};

// Symmetric elimination by congruence with exact rational pivoting.  Zero
// pivots with a nonzero residual row are repaired with an e_i <- e_i + e_j
// basis move.  Post-condition (checked): P^T M P equals the padded diagonal
// exactly.  A zero matrix yields reduced_dim 0; callers treat that as a
// constant predicate.
DiagonalizedForm congruence_diagonalize(const BilinearForm& form);

// basis_inverse * veronese_lift(point); sum_k diagonal_k x'_k y'_k == f(x,y).
RatVec reduced_lift(const RatVec& point, const DiagonalizedForm& form);

// Exact sign of f(x,y), computed through the reduced form.
EdgeSign edge_sign(const RatVec& x, const RatVec& y, const DiagonalizedForm& form);
EdgeSign edge_sign_reduced(const RatVec& xr, const RatVec& yr, const DiagonalizedForm& form);

// w with w_k = diagonal_k * reduced_lift(y)_k, so that x is adjacent to y iff
// w . reduced_lift(x) >= 0.
RatVec hyperplane_normal(const RatVec& y, const DiagonalizedForm& form);

inline EdgeSign edge_sign_from_int(int s) {
    return s > 0 ? EdgeSign::Positive : (s < 0 ? EdgeSign::Negative : EdgeSign::Zero);
}

}  // namespace sagl

#endif
