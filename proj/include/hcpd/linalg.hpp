#pragma once

#include <cstdint>
#include <vector>

namespace hcpd {

// Minimal dense row-major matrix, just enough for the affinity solves.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::uint32_t rows, std::uint32_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {}

    double& at(std::uint32_t r, std::uint32_t c) {
        return data_[static_cast<std::size_t>(r) * cols_ + c];
    }
    double at(std::uint32_t r, std::uint32_t c) const {
        return data_[static_cast<std::size_t>(r) * cols_ + c];
    }
    double* row(std::uint32_t r) { return data_.data() + static_cast<std::size_t>(r) * cols_; }
    const double* row(std::uint32_t r) const {
        return data_.data() + static_cast<std::size_t>(r) * cols_;
    }

    std::uint32_t rows() const { return rows_; }
    std::uint32_t cols() const { return cols_; }

private:
    std::uint32_t rows_ = 0;
    std::uint32_t cols_ = 0;
    std::vector<double> data_;
};

// In-place Cholesky factorization M = L L^T (lower triangle). Throws
// std::runtime_error when a pivot is not strictly positive, i.e. the matrix
// is not positive definite.
void cholesky_in_place(DenseMatrix& m);

// Inverse of a symmetric positive-definite matrix via Cholesky. Column solves
// are independent, so they are distributed over `threads` workers without
// changing any floating-point operation order (bit-identical for any count).
DenseMatrix spd_inverse(const DenseMatrix& m, int threads = 1);

} // namespace hcpd
