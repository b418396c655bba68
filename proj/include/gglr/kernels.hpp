#pragma once

#include <cstddef>

// Low-level array kernels used by the sparse solver. Every kernel has a
// serial reference (`*_serial`) and an OpenMP variant with the exact same
// floating-point evaluation order, so the two are bitwise interchangeable
// and results do not depend on the thread count. The parity is enforced by
// tests and the two variants are compared by the benchmark target.
namespace gglr::kernels {

// Summation block size for dot products. The blocked order *is* the
// algorithm: partial sums over consecutive 1024-element blocks, combined
// in block order.
inline constexpr std::size_t kDotBlock = 1024;

// y = A*x for a CSR matrix. Row-parallel; each output element is
// accumulated serially in column order.
void spmv(std::size_t nrows, const std::size_t* row_ptr, const int* col,
          const double* val, const double* x, double* y);
void spmv_serial(std::size_t nrows, const std::size_t* row_ptr, const int* col,
                 const double* val, const double* x, double* y);

double dot(const double* a, const double* b, std::size_t n);
double dot_serial(const double* a, const double* b, std::size_t n);

double nrm2(const double* a, std::size_t n);

// y += alpha * x
void axpy(double alpha, const double* x, double* y, std::size_t n);
// p = r + beta * p
void xpby(const double* x, double beta, double* y, std::size_t n);

}  // namespace gglr::kernels
