#include "gglr/degrade.hpp"

#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

namespace gglr {

PixelMask random_mask(int rows, int cols, double missing_fraction, std::uint64_t seed) {
    if (!(missing_fraction >= 0.0 && missing_fraction <= 1.0)) {
        throw std::invalid_argument("random_mask: fraction must be in [0,1]");
    }
    PixelMask mask = PixelMask::all_known(rows, cols);
    const std::size_t n = mask.known.size();
    const std::size_t n_missing = static_cast<std::size_t>(std::llround(missing_fraction * static_cast<double>(n)));

    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < n_missing && i + 1 < n; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng() % (n - i));
        std::swap(perm[i], perm[j]);
    }
    for (std::size_t i = 0; i < n_missing; ++i) mask.known[perm[i]] = 0;
    return mask;
}

ImageGrid zero_fill(const ImageGrid& img, const PixelMask& mask) {
    if (img.rows != mask.rows || img.cols != mask.cols) {
        throw std::invalid_argument("zero_fill: image/mask dimension mismatch");
    }
    ImageGrid out = img;
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        if (!mask.known[i]) out.values[i] = 0.0;
    }
    return out;
}

}  // namespace gglr
