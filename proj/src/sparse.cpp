#include "gglr/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "gglr/kernels.hpp"

namespace gglr {

namespace {

void check_dims(int nrows, int ncols) {
    if (nrows < 0 || ncols < 0) throw std::invalid_argument("sparse: negative dimension");
}

}  // namespace

SparseMatrix::SparseMatrix(int nrows, int ncols) : nrows_(nrows), ncols_(ncols) {
    check_dims(nrows, ncols);
    row_ptr_.assign(static_cast<std::size_t>(nrows) + 1, 0);
}

SparseMatrix SparseMatrix::from_triplets(int nrows, int ncols, std::vector<Triplet> entries) {
    check_dims(nrows, ncols);
    for (const Triplet& t : entries) {
        if (t.row < 0 || t.row >= nrows || t.col < 0 || t.col >= ncols) {
            throw std::invalid_argument("sparse: triplet index out of range");
        }
    }
    // Stable sort keeps insertion order among duplicates, so the summation
    // order below is reproducible.
    std::stable_sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });

    SparseMatrix m(nrows, ncols);
    m.col_.reserve(entries.size());
    m.val_.reserve(entries.size());
    std::size_t i = 0;
    for (int r = 0; r < nrows; ++r) {
        while (i < entries.size() && entries[i].row == r) {
            const int c = entries[i].col;
            double v = entries[i].value;
            ++i;
            while (i < entries.size() && entries[i].row == r && entries[i].col == c) {
                v += entries[i].value;
                ++i;
            }
            if (v != 0.0) {
                m.col_.push_back(c);
                m.val_.push_back(v);
            }
        }
        m.row_ptr_[static_cast<std::size_t>(r) + 1] = m.col_.size();
    }
    return m;
}

SparseMatrix SparseMatrix::identity(int n) {
    SparseMatrix m(n, n);
    m.col_.resize(static_cast<std::size_t>(n));
    m.val_.assign(static_cast<std::size_t>(n), 1.0);
    for (int i = 0; i < n; ++i) {
        m.col_[static_cast<std::size_t>(i)] = i;
        m.row_ptr_[static_cast<std::size_t>(i) + 1] = static_cast<std::size_t>(i) + 1;
    }
    m.symmetric_hint_ = true;
    return m;
}

SparseMatrix SparseMatrix::diagonal(const std::vector<double>& d) {
    const int n = static_cast<int>(d.size());
    std::vector<Triplet> trip;
    trip.reserve(d.size());
    for (int i = 0; i < n; ++i) {
        if (d[static_cast<std::size_t>(i)] != 0.0) trip.push_back({i, i, d[static_cast<std::size_t>(i)]});
    }
    SparseMatrix m = from_triplets(n, n, std::move(trip));
    m.symmetric_hint_ = true;
    return m;
}

void SparseMatrix::matvec_into(const double* x, double* y) const {
    kernels::spmv(static_cast<std::size_t>(nrows_), row_ptr_.data(), col_.data(), val_.data(), x, y);
}

std::vector<double> SparseMatrix::matvec(const std::vector<double>& x) const {
    if (static_cast<int>(x.size()) != ncols_) {
        throw std::invalid_argument("sparse matvec: dimension mismatch (" + std::to_string(x.size()) +
                                    " vs " + std::to_string(ncols_) + " cols)");
    }
    std::vector<double> y(static_cast<std::size_t>(nrows_));
    matvec_into(x.data(), y.data());
    return y;
}

SparseMatrix sparse_add(const SparseMatrix& a, const SparseMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw std::invalid_argument("sparse_add: dimension mismatch");
    }
    SparseMatrix c(a.rows(), a.cols());
    std::vector<std::size_t> rp(static_cast<std::size_t>(a.rows()) + 1, 0);
    std::vector<int> col;
    std::vector<double> val;
    col.reserve(a.nnz() + b.nnz());
    val.reserve(a.nnz() + b.nnz());
    const auto arp = a.row_ptr(), brp = b.row_ptr();
    const auto ac = a.col_idx(), bc = b.col_idx();
    const auto av = a.values(), bv = b.values();
    for (int r = 0; r < a.rows(); ++r) {
        std::size_t i = arp[static_cast<std::size_t>(r)], iend = arp[static_cast<std::size_t>(r) + 1];
        std::size_t j = brp[static_cast<std::size_t>(r)], jend = brp[static_cast<std::size_t>(r) + 1];
        while (i < iend || j < jend) {
            int c1 = i < iend ? ac[i] : a.cols();
            int c2 = j < jend ? bc[j] : a.cols();
            if (c1 < c2) {
                col.push_back(c1);
                val.push_back(av[i++]);
            } else if (c2 < c1) {
                col.push_back(c2);
                val.push_back(bv[j++]);
            } else {
                col.push_back(c1);
                val.push_back(av[i++] + bv[j++]);
            }
        }
        rp[static_cast<std::size_t>(r) + 1] = col.size();
    }
    // Rebuild through triplets to keep a single canonicalization path.
    std::vector<Triplet> trip;
    trip.reserve(col.size());
    for (int r = 0; r < a.rows(); ++r) {
        for (std::size_t k = rp[static_cast<std::size_t>(r)]; k < rp[static_cast<std::size_t>(r) + 1]; ++k) {
            trip.push_back({r, col[k], val[k]});
        }
    }
    c = SparseMatrix::from_triplets(a.rows(), a.cols(), std::move(trip));
    return c;
}

SparseMatrix sparse_scale(const SparseMatrix& a, double s) {
    std::vector<Triplet> trip;
    trip.reserve(a.nnz());
    const auto rp = a.row_ptr();
    const auto c = a.col_idx();
    const auto v = a.values();
    for (int r = 0; r < a.rows(); ++r) {
        for (std::size_t k = rp[static_cast<std::size_t>(r)]; k < rp[static_cast<std::size_t>(r) + 1]; ++k) {
            trip.push_back({r, c[k], v[k] * s});
        }
    }
    SparseMatrix out = SparseMatrix::from_triplets(a.rows(), a.cols(), std::move(trip));
    out.set_symmetric_hint(a.symmetric_hint());
    return out;
}

SparseMatrix sparse_transpose(const SparseMatrix& a) {
    std::vector<Triplet> trip;
    trip.reserve(a.nnz());
    const auto rp = a.row_ptr();
    const auto c = a.col_idx();
    const auto v = a.values();
    for (int r = 0; r < a.rows(); ++r) {
        for (std::size_t k = rp[static_cast<std::size_t>(r)]; k < rp[static_cast<std::size_t>(r) + 1]; ++k) {
            trip.push_back({c[k], r, v[k]});
        }
    }
    SparseMatrix out = SparseMatrix::from_triplets(a.cols(), a.rows(), std::move(trip));
    out.set_symmetric_hint(a.symmetric_hint());
    return out;
}

namespace {

// Gustavson row-merge product a*b. Column accumulation follows CSR encounter
// order, emitted in ascending column order, so results are reproducible.
SparseMatrix sparse_product(const SparseMatrix& a, const SparseMatrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("sparse product: dimension mismatch");
    const auto arp = a.row_ptr(), brp = b.row_ptr();
    const auto ac = a.col_idx(), bc = b.col_idx();
    const auto av = a.values(), bv = b.values();

    std::vector<double> work(static_cast<std::size_t>(b.cols()), 0.0);
    std::vector<int> stamp(static_cast<std::size_t>(b.cols()), -1);
    std::vector<int> marked;
    std::vector<Triplet> trip;
    for (int r = 0; r < a.rows(); ++r) {
        marked.clear();
        for (std::size_t i = arp[static_cast<std::size_t>(r)]; i < arp[static_cast<std::size_t>(r) + 1]; ++i) {
            const int mid = ac[i];
            const double aval = av[i];
            for (std::size_t j = brp[static_cast<std::size_t>(mid)]; j < brp[static_cast<std::size_t>(mid) + 1]; ++j) {
                const int c = bc[j];
                if (stamp[static_cast<std::size_t>(c)] != r) {
                    stamp[static_cast<std::size_t>(c)] = r;
                    work[static_cast<std::size_t>(c)] = 0.0;
                    marked.push_back(c);
                }
                work[static_cast<std::size_t>(c)] += aval * bv[j];
            }
        }
        std::sort(marked.begin(), marked.end());
        for (int c : marked) trip.push_back({r, c, work[static_cast<std::size_t>(c)]});
    }
    return SparseMatrix::from_triplets(a.rows(), b.cols(), std::move(trip));
}

}  // namespace

SparseMatrix sparse_triple_product(const SparseMatrix& f, const SparseMatrix& l) {
    if (l.rows() != l.cols()) throw std::invalid_argument("triple product: middle matrix must be square");
    if (l.cols() != f.rows()) throw std::invalid_argument("triple product: dimension mismatch");
    return sparse_product(sparse_transpose(f), sparse_product(l, f));
}

SparseMatrix sparse_symmetrize(const SparseMatrix& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("symmetrize: matrix must be square");
    SparseMatrix s = sparse_scale(sparse_add(a, sparse_transpose(a)), 0.5);
    s.set_symmetric_hint(true);
    return s;
}

bool is_symmetric(const SparseMatrix& a, double tol) {
    if (a.rows() != a.cols()) return false;
    const SparseMatrix t = sparse_transpose(a);
    double maxabs = 0.0;
    for (double v : a.values()) maxabs = std::max(maxabs, std::fabs(v));
    const auto arp = a.row_ptr(), trp = t.row_ptr();
    const auto ac = a.col_idx(), tc = t.col_idx();
    const auto av = a.values(), tv = t.values();
    for (int r = 0; r < a.rows(); ++r) {
        std::size_t i = arp[static_cast<std::size_t>(r)], iend = arp[static_cast<std::size_t>(r) + 1];
        std::size_t j = trp[static_cast<std::size_t>(r)], jend = trp[static_cast<std::size_t>(r) + 1];
        while (i < iend || j < jend) {
            int c1 = i < iend ? ac[i] : a.cols();
            int c2 = j < jend ? tc[j] : a.cols();
            double d;
            if (c1 < c2) {
                d = av[i++];
            } else if (c2 < c1) {
                d = tv[j++];
            } else {
                d = av[i++] - tv[j++];
            }
            if (std::fabs(d) > tol * std::max(maxabs, 1.0)) return false;
        }
    }
    return true;
}

}  // namespace gglr
