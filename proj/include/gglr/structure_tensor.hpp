#pragma once

#include <utility>

#include "gglr/gradient_graph.hpp"
#include "gglr/grid.hpp"

namespace gglr {

/// Windowed 2x2 average of gradient outer products at a pixel. Symmetric and
/// nonnegative-definite by construction; samples counts how many window
/// offsets contributed.
struct StructureTensor {
    double shh = 0.0;  // mean (g^h)^2
    double shv = 0.0;  // mean g^h * g^v
    double svv = 0.0;  // mean (g^v)^2
    int samples = 0;
};

/// Dominant-gradient estimate: sqrt(lambda_max) times the unit eigenvector
/// for the larger eigenvalue, oriented by the window's mean gradient.
struct GradientEstimate {
    double gh = 0.0;
    double gv = 0.0;
};

/// Forward differences restricted to observed pixels: a node is valid iff
/// both pixels defining it are known.
GradientField observable_gradients(const ImageGrid& img, const PixelMask& mask, GradientDirection dir);

/// Tensor at pixel (pk, pl) over an odd window. An offset contributes only
/// when the gradients of every existing direction are valid and in bounds
/// there (cross terms need both; a degenerate 1-row or 1-column image has
/// only one direction and contributes zero to the other products).
StructureTensor structure_tensor_at(int pk, int pl, const GradientField& gh, const GradientField& gv, int window);

/// Closed-form eigen decomposition of the 2x2 tensor. The sign of the
/// output follows the mean gradient over the window; with a zero mean it
/// defaults to nonnegative gh, then nonnegative gv. A zero tensor yields
/// (0, 0).
GradientEstimate dominant_gradient(const StructureTensor& s, double mean_gh, double mean_gv);

/// Complete gradient fields for a partially observed image: observable
/// nodes keep their direct difference; the rest take the structure-tensor
/// estimate anchored at the node's base pixel, or 0 when no window sample
/// exists. Every node of the result is valid.
std::pair<GradientField, GradientField> estimate_gradient_field(const ImageGrid& img, const PixelMask& mask,
                                                                int window);

}  // namespace gglr
