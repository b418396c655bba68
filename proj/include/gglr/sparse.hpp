#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace gglr {

struct Triplet {
    int row;
    int col;
    double value;
};

/// General sparse real matrix in compressed sparse row form with a canonical
/// entry ordering: rows ascending, columns ascending within a row, duplicate
/// coordinates summed at construction in insertion order. Building twice from
/// the same triplet sequence yields bitwise-identical storage. Instances are
/// immutable after construction.
class SparseMatrix {
public:
    SparseMatrix() = default;
    SparseMatrix(int nrows, int ncols);  // all-zero matrix

    static SparseMatrix from_triplets(int nrows, int ncols, std::vector<Triplet> entries);
    static SparseMatrix identity(int n);
    static SparseMatrix diagonal(const std::vector<double>& d);

    int rows() const { return nrows_; }
    int cols() const { return ncols_; }
    std::size_t nnz() const { return col_.size(); }

    std::span<const std::size_t> row_ptr() const { return row_ptr_; }
    std::span<const int> col_idx() const { return col_; }
    std::span<const double> values() const { return val_; }

    /// Symmetry metadata set by constructors that guarantee it (identity,
    /// diagonal, symmetrized products). Purely informational.
    bool symmetric_hint() const { return symmetric_hint_; }
    void set_symmetric_hint(bool s) { symmetric_hint_ = s; }

    void matvec_into(const double* x, double* y) const;
    std::vector<double> matvec(const std::vector<double>& x) const;

private:
    int nrows_ = 0;
    int ncols_ = 0;
    std::vector<std::size_t> row_ptr_{0};
    std::vector<int> col_;
    std::vector<double> val_;
    bool symmetric_hint_ = false;
};

SparseMatrix sparse_add(const SparseMatrix& a, const SparseMatrix& b);
SparseMatrix sparse_scale(const SparseMatrix& a, double s);
SparseMatrix sparse_transpose(const SparseMatrix& a);

/// Fᵀ·L·F in canonical sparse form.
SparseMatrix sparse_triple_product(const SparseMatrix& f, const SparseMatrix& l);

/// (a + aᵀ)/2; exact for matrices that are symmetric up to rounding.
SparseMatrix sparse_symmetrize(const SparseMatrix& a);

/// max |a_ij - a_ji| <= tol * max|a_ij|
bool is_symmetric(const SparseMatrix& a, double tol = 1e-12);

}  // namespace gglr
