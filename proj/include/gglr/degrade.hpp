#pragma once

#include <cstdint>

#include "gglr/grid.hpp"

namespace gglr {

/// Mask with round(fraction * M*N) missing pixels drawn by a partial
/// Fisher-Yates shuffle of the column-major pixel indices. The generator is
/// pinned to std::mt19937_64 with modulo index mapping, so a given
/// (dims, fraction, seed) triple yields the same mask on every platform;
/// changing the generator breaks mask reproducibility.
PixelMask random_mask(int rows, int cols, double missing_fraction, std::uint64_t seed);

/// Copy of the image with missing pixels set to 0.
ImageGrid zero_fill(const ImageGrid& img, const PixelMask& mask);

}  // namespace gglr
