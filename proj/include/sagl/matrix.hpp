#ifndef SAGL_MATRIX_HPP
#define SAGL_MATRIX_HPP

#include <cstddef>
#include <vector>

#include "sagl/rational.hpp"

namespace sagl {

// Dense matrix of exact rationals. Only the handful of operations the
// diagonalizer and its post-condition checks need.
class RatMatrix {
public:
    RatMatrix() : rows_(0), cols_(0) {}
    RatMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols) {}

    static RatMatrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    Rational& at(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const Rational& at(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    RatMatrix transposed() const;
    RatMatrix multiply(const RatMatrix& rhs) const;
    RatVec apply(const RatVec& v) const;  // this * v

    bool operator==(const RatMatrix& rhs) const;
    bool is_symmetric() const;
    bool is_zero() const;

    // Gauss-Jordan with exact pivoting; empty result if singular.
    RatMatrix inverse_or_empty() const;

private:
    std::size_t rows_, cols_;
    std::vector<Rational> data_;
};

}  // namespace sagl

#endif
