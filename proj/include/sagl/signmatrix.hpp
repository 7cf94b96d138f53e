#ifndef SAGL_SIGNMATRIX_HPP
#define SAGL_SIGNMATRIX_HPP

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "sagl/bilinear.hpp"
#include "sagl/polynomial.hpp"
#include "sagl/rational.hpp"

namespace sagl {

/// Exact sign of f(x_i, x_j) for every pair, stored as an n x n array of
/// {-1, 0, +1}.  Symmetric; the diagonal is filled but never consulted by
/// decode paths.  This is the ground-truth oracle the partition certificates
/// and label bits are audited against.
class SignMatrix {
public:
    SignMatrix() : n_(0) {}
    explicit SignMatrix(std::size_t n) : n_(n), cells_(n * n, 0) {}

    std::size_t n() const { return n_; }
    int at(std::size_t i, std::size_t j) const { return cells_[i * n_ + j]; }
    void set(std::size_t i, std::size_t j, int s) {
        cells_[i * n_ + j] = static_cast<std::int8_t>(s);
        cells_[j * n_ + i] = static_cast<std::int8_t>(s);
    }

    // First off-diagonal Zero pair, if any (general-position violation).
    std::optional<std::pair<std::size_t, std::size_t>> first_zero_pair() const;

    bool edge_bit(std::size_t i, std::size_t j) const { return at(i, j) >= 0; }

private:
    std::size_t n_;
    std::vector<std::int8_t> cells_;
};

// Builds the matrix by direct exact evaluation of the predicate on the raw
// points (independent of the lifted/diagonalized route).
SignMatrix build_sign_matrix(const std::vector<RatVec>& points, const PolynomialPredicate& pred,
                             unsigned threads = 0);

}  // namespace sagl

#endif
