#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "gglr/sparse.hpp"

namespace gglr {

/// Single owner of the vectorization convention: columns of the raster are
/// stacked, so pixel (row k, col l), both 0-based, lands at k + l*rows.
/// Every grid-indexed structure in the library derives its indices from this
/// function.
inline std::size_t vec_index(int rows, int k, int l) {
    return static_cast<std::size_t>(k) + static_cast<std::size_t>(l) * static_cast<std::size_t>(rows);
}

/// Grayscale raster. Intensities are nominally in [0,1] (8-bit I/O divides
/// by the file maxval); intermediate solver iterates may leave that range
/// and are clamped only when written out.
struct ImageGrid {
    int rows = 0;
    int cols = 0;
    std::vector<double> values;  // column-major, rows*cols

    static ImageGrid zero(int rows, int cols);
    static ImageGrid constant(int rows, int cols, double v);

    double& at(int k, int l) { return values[vec_index(rows, k, l)]; }
    double at(int k, int l) const { return values[vec_index(rows, k, l)]; }
    std::size_t size() const { return values.size(); }
};

/// Per-pixel known/missing indicator, aligned with ImageGrid.
struct PixelMask {
    int rows = 0;
    int cols = 0;
    std::vector<std::uint8_t> known;  // column-major, 1 = known

    static PixelMask all_known(int rows, int cols);

    bool is_known(int k, int l) const { return known[vec_index(rows, k, l)] != 0; }
    int known_count() const;
};

std::vector<double> vectorize(const ImageGrid& img);
ImageGrid devectorize(int rows, int cols, const std::vector<double>& x);

/// K x MN selection matrix picking the known pixels in ascending
/// column-major index order. Throws when the mask has no known pixel.
SparseMatrix selection_matrix(const PixelMask& mask);

/// Values at known pixels, ascending column-major order (the vector H*x).
std::vector<double> gather_known(const ImageGrid& img, const PixelMask& mask);

}  // namespace gglr
