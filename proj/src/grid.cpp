#include "gglr/grid.hpp"

#include <stdexcept>
#include <string>

namespace gglr {

namespace {

void check_positive_dims(int rows, int cols) {
    if (rows <= 0 || cols <= 0) throw std::invalid_argument("grid: dimensions must be positive");
}

}  // namespace

ImageGrid ImageGrid::zero(int rows, int cols) { return constant(rows, cols, 0.0); }

ImageGrid ImageGrid::constant(int rows, int cols, double v) {
    check_positive_dims(rows, cols);
    ImageGrid g;
    g.rows = rows;
    g.cols = cols;
    g.values.assign(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), v);
    return g;
}

PixelMask PixelMask::all_known(int rows, int cols) {
    check_positive_dims(rows, cols);
    PixelMask m;
    m.rows = rows;
    m.cols = cols;
    m.known.assign(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), 1);
    return m;
}

int PixelMask::known_count() const {
    int k = 0;
    for (std::uint8_t v : known) k += v != 0;
    return k;
}

std::vector<double> vectorize(const ImageGrid& img) {
    if (img.values.size() != static_cast<std::size_t>(img.rows) * static_cast<std::size_t>(img.cols)) {
        throw std::invalid_argument("vectorize: value buffer does not match dimensions");
    }
    return img.values;  // stored column-major already; the copy is the vector
}

ImageGrid devectorize(int rows, int cols, const std::vector<double>& x) {
    check_positive_dims(rows, cols);
    if (x.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols)) {
        throw std::invalid_argument("devectorize: length " + std::to_string(x.size()) + " does not match " +
                                    std::to_string(rows) + "x" + std::to_string(cols));
    }
    ImageGrid g;
    g.rows = rows;
    g.cols = cols;
    g.values = x;
    return g;
}

SparseMatrix selection_matrix(const PixelMask& mask) {
    const int n = mask.rows * mask.cols;
    std::vector<Triplet> trip;
    int row = 0;
    for (int j = 0; j < n; ++j) {
        if (mask.known[static_cast<std::size_t>(j)]) trip.push_back({row++, j, 1.0});
    }
    if (row == 0) throw std::runtime_error("no observations");
    return SparseMatrix::from_triplets(row, n, std::move(trip));
}

std::vector<double> gather_known(const ImageGrid& img, const PixelMask& mask) {
    if (img.rows != mask.rows || img.cols != mask.cols) {
        throw std::invalid_argument("gather_known: image/mask dimension mismatch");
    }
    std::vector<double> y;
    for (std::size_t i = 0; i < img.values.size(); ++i) {
        if (mask.known[i]) y.push_back(img.values[i]);
    }
    return y;
}

}  // namespace gglr
