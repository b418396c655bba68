#include "gglr/gradient_graph.hpp"

#include <cmath>
#include <stdexcept>

#include "gglr/kernels.hpp"

namespace gglr {

std::pair<int, int> gradient_grid_dims(int img_rows, int img_cols, GradientDirection dir) {
    if (dir == GradientDirection::horizontal) return {img_rows, img_cols - 1};
    return {img_rows - 1, img_cols};
}

GradientField GradientField::zero(GradientDirection dir, int img_rows, int img_cols) {
    const auto [r, c] = gradient_grid_dims(img_rows, img_cols, dir);
    if (r <= 0 || c <= 0) throw std::invalid_argument("gradient field: image too small for direction");
    GradientField f;
    f.direction = dir;
    f.rows = r;
    f.cols = c;
    f.values.assign(static_cast<std::size_t>(r) * static_cast<std::size_t>(c), 0.0);
    f.valid.assign(f.values.size(), 1);
    return f;
}

SparseMatrix gradient_operator(int img_rows, int img_cols, GradientDirection dir) {
    const auto [gr, gc] = gradient_grid_dims(img_rows, img_cols, dir);
    if (img_rows < 1 || img_cols < 1 || gr < 1 || gc < 1) {
        throw std::invalid_argument("gradient_operator: image too small for direction");
    }
    const int n_nodes = gr * gc;
    const int n_px = img_rows * img_cols;
    std::vector<Triplet> trip;
    trip.reserve(static_cast<std::size_t>(n_nodes) * 2);
    for (int l = 0; l < gc; ++l) {
        for (int k = 0; k < gr; ++k) {
            const int row = static_cast<int>(vec_index(gr, k, l));
            const int cur = static_cast<int>(vec_index(img_rows, k, l));
            const int nxt = dir == GradientDirection::horizontal
                                ? static_cast<int>(vec_index(img_rows, k, l + 1))
                                : static_cast<int>(vec_index(img_rows, k + 1, l));
            trip.push_back({row, nxt, 1.0});
            trip.push_back({row, cur, -1.0});
        }
    }
    return SparseMatrix::from_triplets(n_nodes, n_px, std::move(trip));
}

GradientField image_gradients(const ImageGrid& img, GradientDirection dir) {
    GradientField f = GradientField::zero(dir, img.rows, img.cols);
    for (int l = 0; l < f.cols; ++l) {
        for (int k = 0; k < f.rows; ++k) {
            const double cur = img.at(k, l);
            const double nxt = dir == GradientDirection::horizontal ? img.at(k, l + 1) : img.at(k + 1, l);
            f.at(k, l) = nxt - cur;
        }
    }
    return f;
}

double edge_weight(double g_i, double g_j, double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("edge_weight: sigma must be positive");
    const double d = g_i - g_j;
    return std::exp(-(d * d) / (sigma * sigma));
}

GradientGraph build_grid_graph(int rows, int cols, const std::vector<double>& values,
                               Connectivity connectivity, GradientDirection axis, double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("build_gradient_graph: sigma must be positive");
    if (rows <= 0 || cols <= 0 || values.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols)) {
        throw std::invalid_argument("build_gradient_graph: bad field dimensions");
    }
    const int n = rows * cols;
    const bool four = connectivity == Connectivity::four;
    const bool along_rows = axis == GradientDirection::vertical;  // 2-connected g^v links (k-1,l),(k+1,l)

    // Per-node rows of W and L are independent; each thread recomputes the
    // weight for both endpoints of an edge from the same operands, so W is
    // exactly symmetric and the result is thread-count invariant.
    std::vector<std::vector<int>> nbr_cols(static_cast<std::size_t>(n));
    std::vector<std::vector<double>> nbr_w(static_cast<std::size_t>(n));
    std::vector<double> degree(static_cast<std::size_t>(n), 0.0);

#pragma omp parallel for schedule(static) if (n >= 1024)
    for (std::ptrdiff_t node = 0; node < static_cast<std::ptrdiff_t>(n); ++node) {
        const int k = static_cast<int>(node % rows);
        const int l = static_cast<int>(node / rows);
        int cand[4];
        int ncand = 0;
        if (four || along_rows) {
            if (k > 0) cand[ncand++] = static_cast<int>(vec_index(rows, k - 1, l));
            if (k + 1 < rows) cand[ncand++] = static_cast<int>(vec_index(rows, k + 1, l));
        }
        if (four || !along_rows) {
            if (l > 0) cand[ncand++] = static_cast<int>(vec_index(rows, k, l - 1));
            if (l + 1 < cols) cand[ncand++] = static_cast<int>(vec_index(rows, k, l + 1));
        }
        auto& cc = nbr_cols[static_cast<std::size_t>(node)];
        auto& ww = nbr_w[static_cast<std::size_t>(node)];
        double deg = 0.0;
        for (int c = 0; c < ncand; ++c) {
            const int j = cand[c];
            const double w = edge_weight(values[static_cast<std::size_t>(node)], values[static_cast<std::size_t>(j)], sigma);
            if (w < kWeightDropThreshold) continue;
            cc.push_back(j);
            ww.push_back(w);
            deg += w;
        }
        degree[static_cast<std::size_t>(node)] = deg;
    }

    std::vector<Triplet> w_trip;
    std::vector<Triplet> l_trip;
    for (int i = 0; i < n; ++i) {
        l_trip.push_back({i, i, degree[static_cast<std::size_t>(i)]});
        const auto& cc = nbr_cols[static_cast<std::size_t>(i)];
        const auto& ww = nbr_w[static_cast<std::size_t>(i)];
        for (std::size_t c = 0; c < cc.size(); ++c) {
            w_trip.push_back({i, cc[c], ww[c]});
            l_trip.push_back({i, cc[c], -ww[c]});
        }
    }

    GradientGraph g;
    g.rows = rows;
    g.cols = cols;
    g.connectivity = connectivity;
    g.sigma = sigma;
    g.adjacency = SparseMatrix::from_triplets(n, n, std::move(w_trip));
    g.adjacency.set_symmetric_hint(true);
    g.degree = std::move(degree);
    g.laplacian = SparseMatrix::from_triplets(n, n, std::move(l_trip));
    g.laplacian.set_symmetric_hint(true);
    return g;
}

GradientGraph build_gradient_graph(const GradientField& field, Connectivity connectivity, double sigma) {
    return build_grid_graph(field.rows, field.cols, field.values, connectivity, field.direction, sigma);
}

SparseMatrix lift_laplacian(const SparseMatrix& f, const SparseMatrix& l) {
    if (l.rows() != l.cols() || l.rows() != f.rows()) {
        throw std::invalid_argument("lift_laplacian: dimension mismatch");
    }
    return sparse_symmetrize(sparse_triple_product(f, l));
}

double gglr_value(const std::vector<double>& x, const SparseMatrix& lifted_h, const SparseMatrix& lifted_v) {
    const std::size_t n = x.size();
    double phi = 0.0;
    std::vector<double> tmp(n);
    for (const SparseMatrix* m : {&lifted_h, &lifted_v}) {
        if (m->nnz() == 0) continue;
        if (m->cols() != static_cast<int>(n)) throw std::invalid_argument("gglr_value: dimension mismatch");
        m->matvec_into(x.data(), tmp.data());
        phi += kernels::dot(x.data(), tmp.data(), n);
    }
    return phi;
}

}  // namespace gglr
