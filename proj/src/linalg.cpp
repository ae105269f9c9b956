#include "hcpd/linalg.hpp"

#include <cmath>
#include <stdexcept>
#include <thread>

namespace hcpd {

void cholesky_in_place(DenseMatrix& m) {
    const std::uint32_t n = m.rows();
    if (m.cols() != n) throw std::invalid_argument("cholesky: matrix not square");
    for (std::uint32_t j = 0; j < n; ++j) {
        double* rj = m.row(j);
        double d = rj[j];
        for (std::uint32_t k = 0; k < j; ++k) d -= rj[k] * rj[k];
        if (!(d > 0.0))
            throw std::runtime_error("cholesky: matrix not positive definite");
        const double ljj = std::sqrt(d);
        rj[j] = ljj;
        const double inv = 1.0 / ljj;
        for (std::uint32_t i = j + 1; i < n; ++i) {
            double* ri = m.row(i);
            double s = ri[j];
            for (std::uint32_t k = 0; k < j; ++k) s -= ri[k] * rj[k];
            ri[j] = s * inv;
        }
    }
    // zero the strict upper triangle so the factor is usable as-is
    for (std::uint32_t i = 0; i < n; ++i)
        for (std::uint32_t j = i + 1; j < n; ++j) m.at(i, j) = 0.0;
}

namespace {

// Solve L L^T x = e_col and write x into out column `col`.
void solve_unit_column(const DenseMatrix& chol, std::uint32_t col, DenseMatrix& out,
                       std::vector<double>& work) {
    const std::uint32_t n = chol.rows();
    // forward: L y = e_col; y is zero above `col`
    for (std::uint32_t i = 0; i < col; ++i) work[i] = 0.0;
    for (std::uint32_t i = col; i < n; ++i) {
        const double* ri = chol.row(i);
        double s = (i == col) ? 1.0 : 0.0;
        for (std::uint32_t k = col; k < i; ++k) s -= ri[k] * work[k];
        work[i] = s / ri[i];
    }
    // backward: L^T x = y
    for (std::uint32_t ii = n; ii-- > 0;) {
        double s = work[ii];
        for (std::uint32_t k = ii + 1; k < n; ++k) s -= chol.at(k, ii) * work[k];
        work[ii] = s / chol.at(ii, ii);
    }
    for (std::uint32_t i = 0; i < n; ++i) out.at(i, col) = work[i];
}

} // namespace

DenseMatrix spd_inverse(const DenseMatrix& m, int threads) {
    const std::uint32_t n = m.rows();
    DenseMatrix chol = m;
    cholesky_in_place(chol);
    DenseMatrix inv(n, n);
    if (threads < 1) threads = 1;
    threads = std::min<int>(threads, std::max<std::uint32_t>(n, 1));
    if (threads == 1 || n < 64) {
        std::vector<double> work(n);
        for (std::uint32_t c = 0; c < n; ++c) solve_unit_column(chol, c, inv, work);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (int w = 0; w < threads; ++w) {
            pool.emplace_back([&, w]() {
                std::vector<double> work(n);
                for (std::uint32_t c = w; c < n; c += static_cast<std::uint32_t>(threads))
                    solve_unit_column(chol, c, inv, work);
            });
        }
        for (auto& th : pool) th.join();
    }
    return inv;
}

} // namespace hcpd
