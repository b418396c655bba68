#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "gglr/grid.hpp"
#include "gglr/sparse.hpp"

namespace gglr {

enum class GradientDirection { horizontal, vertical };
enum class Connectivity : int { two = 2, four = 4 };

/// Edge weights smaller than this are removed from the adjacency (and the
/// degree), keeping the graph sparse. They are numerically irrelevant and
/// iterative solve cost scales with nnz.
inline constexpr double kWeightDropThreshold = 1e-8;

/// Dimensions of the gradient grid for an image of the given size:
/// horizontal differences form an M x (N-1) grid, vertical an (M-1) x N one.
std::pair<int, int> gradient_grid_dims(int img_rows, int img_cols, GradientDirection dir);

/// Per-node forward-difference values on the gradient grid (column-major),
/// with a validity bit per node for partially observed images.
struct GradientField {
    GradientDirection direction = GradientDirection::horizontal;
    int rows = 0;
    int cols = 0;
    std::vector<double> values;
    std::vector<std::uint8_t> valid;

    static GradientField zero(GradientDirection dir, int img_rows, int img_cols);

    double& at(int k, int l) { return values[vec_index(rows, k, l)]; }
    double at(int k, int l) const { return values[vec_index(rows, k, l)]; }
    bool is_valid(int k, int l) const { return valid[vec_index(rows, k, l)] != 0; }
    std::size_t size() const { return values.size(); }
};

/// Sparse difference operator mapping a vectorized image to the vectorized
/// gradient field, with the convention g = x_next - x_current. The all-ones
/// image is in its null space.
SparseMatrix gradient_operator(int img_rows, int img_cols, GradientDirection dir);

/// Forward differences of a complete image (all nodes valid).
GradientField image_gradients(const ImageGrid& img, GradientDirection dir);

/// Gaussian weight on the difference of two gradient values.
double edge_weight(double g_i, double g_j, double sigma);

/// Weighted graph over the nodes of a scalar field on a grid.
/// adjacency is symmetric with zero diagonal; laplacian = degree - adjacency
/// is positive semi-definite since all kept weights are nonnegative.
struct GradientGraph {
    int rows = 0;
    int cols = 0;
    Connectivity connectivity = Connectivity::four;
    double sigma = 0.0;
    SparseMatrix adjacency;
    std::vector<double> degree;
    SparseMatrix laplacian;

    int node_count() const { return rows * cols; }
};

/// 4-connected: up/down/left/right neighbors on the gradient grid.
/// 2-connected: the two neighbors along the field's own axis (left/right for
/// horizontal gradients, up/down for vertical ones).
GradientGraph build_gradient_graph(const GradientField& field, Connectivity connectivity, double sigma);

/// Grid graph over arbitrary scalar values (used for the pixel-domain
/// baseline); axis_only restricts edges as in the 2-connected rule.
GradientGraph build_grid_graph(int rows, int cols, const std::vector<double>& values,
                               Connectivity connectivity, GradientDirection axis, double sigma);

/// Fᵀ·L·F, symmetrized exactly. Positive semi-definite whenever L is.
SparseMatrix lift_laplacian(const SparseMatrix& f, const SparseMatrix& l);

/// xᵀ(ℒh + ℒv)x. Either term may be an all-zero matrix (degenerate 1-row or
/// 1-column images).
double gglr_value(const std::vector<double>& x, const SparseMatrix& lifted_h, const SparseMatrix& lifted_v);

}  // namespace gglr
