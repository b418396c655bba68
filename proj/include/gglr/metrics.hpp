#pragma once

#include <cstdint>

#include "gglr/grid.hpp"

namespace gglr {

/// Peak signal-to-noise ratio in dB on the [0,1] scale (MAX = 1). Identical
/// images give +infinity; serialize it as "inf".
double psnr(const ImageGrid& reference, const ImageGrid& test);

/// Mean local SSIM with the standard 11x11 Gaussian window (sigma 1.5) and
/// constants C1=0.01^2, C2=0.03^2 on the [0,1] scale; windows are evaluated
/// only where they fit entirely, so both images must be at least 11x11.
double ssim(const ImageGrid& reference, const ImageGrid& test);

}  // namespace gglr
