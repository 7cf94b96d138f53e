#include "sagl/matrix.hpp"

#include <stdexcept>

namespace sagl {

RatMatrix RatMatrix::identity(std::size_t n) {
    RatMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
}

RatMatrix RatMatrix::transposed() const {
    RatMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t.at(j, i) = at(i, j);
    return t;
}

RatMatrix RatMatrix::multiply(const RatMatrix& rhs) const {
    if (cols_ != rhs.rows_) throw std::invalid_argument("RatMatrix::multiply: shape mismatch");
    RatMatrix out(rows_, rhs.cols_);
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t k = 0; k < cols_; ++k) {
            const Rational& a = at(i, k);
            if (sgn(a) == 0) continue;
            for (std::size_t j = 0; j < rhs.cols_; ++j) {
                const Rational& b = rhs.at(k, j);
                if (sgn(b) != 0) out.at(i, j) += a * b;
            }
        }
    }
    return out;
}

RatVec RatMatrix::apply(const RatVec& v) const {
    if (cols_ != v.size()) throw std::invalid_argument("RatMatrix::apply: shape mismatch");
    RatVec out(rows_);
    for (std::size_t i = 0; i < rows_; ++i) {
        Rational acc;
        for (std::size_t j = 0; j < cols_; ++j) {
            const Rational& a = at(i, j);
            if (sgn(a) != 0 && sgn(v[j]) != 0) acc += a * v[j];
        }
        out[i] = acc;
    }
    return out;
}

bool RatMatrix::operator==(const RatMatrix& rhs) const {
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_) return false;
    for (std::size_t i = 0; i < data_.size(); ++i)
        if (data_[i] != rhs.data_[i]) return false;
    return true;
}

bool RatMatrix::is_symmetric() const {
    if (rows_ != cols_) return false;
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = i + 1; j < cols_; ++j)
            if (at(i, j) != at(j, i)) return false;
    return true;
}

bool RatMatrix::is_zero() const {
    for (const auto& v : data_)
        if (sgn(v) != 0) return false;
    return true;
}

RatMatrix RatMatrix::inverse_or_empty() const {
    if (rows_ != cols_) return RatMatrix();
    std::size_t n = rows_;
    RatMatrix work(*this);
    RatMatrix inv = identity(n);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        while (pivot < n && sgn(work.at(pivot, col)) == 0) ++pivot;
        if (pivot == n) return RatMatrix();  // singular
        if (pivot != col) {
            for (std::size_t j = 0; j < n; ++j) {
                swap(work.at(pivot, j), work.at(col, j));
                swap(inv.at(pivot, j), inv.at(col, j));
            }
        }
        Rational p = work.at(col, col);
        for (std::size_t j = 0; j < n; ++j) {
            work.at(col, j) /= p;
            inv.at(col, j) /= p;
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (i == col) continue;
            Rational f = work.at(i, col);
            if (sgn(f) == 0) continue;
            for (std::size_t j = 0; j < n; ++j) {
                work.at(i, j) -= f * work.at(col, j);
                inv.at(i, j) -= f * inv.at(col, j);
            }
        }
    }
    return inv;
}

}  // namespace sagl
