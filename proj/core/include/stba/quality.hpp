#pragma once

#include "stba/image.hpp"

namespace stba {

/// Peak signal-to-noise ratio in dB for unit-range intensities.
/// Returns +infinity when the images are identical.
double psnr(const Image& a, const Image& b);

/// Mean SSIM (11x11 Gaussian window, sigma 1.5, K1 0.01, K2 0.03, L 1),
/// averaged over valid window positions and channels. Images smaller than
/// the window in either dimension use global per-channel statistics.
double ssim(const Image& a, const Image& b);

}  // namespace stba
