#pragma once

#include <string>

#include "gglr/grid.hpp"

namespace gglr {

/// Binary 8-bit PGM (P5). Reading divides by the file maxval; writing clamps
/// to [0,1] and scales to maxval 255 — the only place intensities are
/// clamped.
ImageGrid read_pgm(const std::string& path);
void write_pgm(const std::string& path, const ImageGrid& img);

/// Binary PBM (P4) mask; a set bit marks a MISSING pixel.
PixelMask read_pbm_mask(const std::string& path);
void write_pbm_mask(const std::string& path, const PixelMask& mask);

}  // namespace gglr
