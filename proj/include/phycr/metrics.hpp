#pragma once

#include <vector>

#include "phycr/raster.hpp"

namespace phycr {

struct QualityReport {
    double psnr_db = 0.0;
    double ssim = 0.0;
    std::vector<double> per_band_psnr;
};

/// Peak PSNR reported for identical images; keeps reports finite and sortable.
inline constexpr double kPsnrCap = 99.0;

/// 10 * log10(1 / MSE) over all bands and pixels, data range [0,1],
/// capped at 99 dB for identical images.
double psnr(const Raster& a, const Raster& b);

/// Single-scale SSIM on brightness: 11-tap Gaussian window (sigma 1.5),
/// stabilizers C1 = 0.01^2 and C2 = 0.03^2 for unit range, averaged over the
/// valid interior (window fully inside the image).
double ssim(const Raster& a, const Raster& b);

QualityReport evaluate(const Raster& result, const Raster& truth);

}  // namespace phycr
