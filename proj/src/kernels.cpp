#include "gglr/kernels.hpp"

#include <cmath>
#include <vector>

namespace gglr::kernels {

void spmv_serial(std::size_t nrows, const std::size_t* row_ptr, const int* col,
                 const double* val, const double* x, double* y) {
    for (std::size_t i = 0; i < nrows; ++i) {
        double sum = 0.0;
        for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
            sum += val[k] * x[col[k]];
        }
        y[i] = sum;
    }
}

void spmv(std::size_t nrows, const std::size_t* row_ptr, const int* col,
          const double* val, const double* x, double* y) {
    // Small matrices are not worth a parallel region; the result is
    // identical either way.
    if (nrows < 512) {
        spmv_serial(nrows, row_ptr, col, val, x, y);
        return;
    }
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(nrows);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
            sum += val[k] * x[col[k]];
        }
        y[i] = sum;
    }
}

namespace {

inline double block_sum(const double* a, const double* b, std::size_t lo, std::size_t hi) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

double dot_serial(const double* a, const double* b, std::size_t n) {
    const std::size_t nblocks = (n + kDotBlock - 1) / kDotBlock;
    double total = 0.0;
    for (std::size_t ib = 0; ib < nblocks; ++ib) {
        const std::size_t lo = ib * kDotBlock;
        const std::size_t hi = lo + kDotBlock < n ? lo + kDotBlock : n;
        total += block_sum(a, b, lo, hi);
    }
    return total;
}

double dot(const double* a, const double* b, std::size_t n) {
    const std::size_t nblocks = (n + kDotBlock - 1) / kDotBlock;
    if (nblocks < 4) return dot_serial(a, b, n);
    std::vector<double> partial(nblocks);
    const std::ptrdiff_t nb = static_cast<std::ptrdiff_t>(nblocks);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ib = 0; ib < nb; ++ib) {
        const std::size_t lo = static_cast<std::size_t>(ib) * kDotBlock;
        const std::size_t hi = lo + kDotBlock < n ? lo + kDotBlock : n;
        partial[ib] = block_sum(a, b, lo, hi);
    }
    double total = 0.0;
    for (std::size_t ib = 0; ib < nblocks; ++ib) total += partial[ib];
    return total;
}

double nrm2(const double* a, std::size_t n) { return std::sqrt(dot(a, a, n)); }

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    const std::ptrdiff_t pn = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static) if (n >= 4096)
    for (std::ptrdiff_t i = 0; i < pn; ++i) y[i] += alpha * x[i];
}

void xpby(const double* x, double beta, double* y, std::size_t n) {
    const std::ptrdiff_t pn = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static) if (n >= 4096)
    for (std::ptrdiff_t i = 0; i < pn; ++i) y[i] = x[i] + beta * y[i];
}

}  // namespace gglr::kernels
