#include "phycr/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace phycr {

namespace {

double mse(const Raster& a, const Raster& b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return sum / static_cast<double>(a.size());
}

double psnr_from_mse(double m) {
    if (m <= 0.0) return kPsnrCap;
    return std::min(kPsnrCap, 10.0 * std::log10(1.0 / m));
}

}  // namespace

double psnr(const Raster& a, const Raster& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("psnr: dimension mismatch");
    return psnr_from_mse(mse(a, b));
}

double ssim(const Raster& a, const Raster& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("ssim: dimension mismatch");
    constexpr int kRadius = 5;  // 11-tap window
    constexpr double kSigma = 1.5;
    constexpr double kC1 = 0.01 * 0.01;
    constexpr double kC2 = 0.03 * 0.03;

    const int w = a.width();
    const int h = a.height();
    if (w < 2 * kRadius + 1 || h < 2 * kRadius + 1) {
        throw std::invalid_argument("ssim: image smaller than the 11x11 window");
    }

    const ScalarField va = brightness(a);
    const ScalarField vb = brightness(b);

    double kernel[2 * kRadius + 1][2 * kRadius + 1];
    double ksum = 0.0;
    for (int dy = -kRadius; dy <= kRadius; ++dy) {
        for (int dx = -kRadius; dx <= kRadius; ++dx) {
            const double v = std::exp(-0.5 * (dx * dx + dy * dy) / (kSigma * kSigma));
            kernel[dy + kRadius][dx + kRadius] = v;
            ksum += v;
        }
    }
    for (auto& row : kernel) {
        for (double& v : row) v /= ksum;
    }

    double total = 0.0;
    std::size_t count = 0;
    for (int y = kRadius; y < h - kRadius; ++y) {
        for (int x = kRadius; x < w - kRadius; ++x) {
            double mu_a = 0.0, mu_b = 0.0, aa = 0.0, bb = 0.0, ab = 0.0;
            for (int dy = -kRadius; dy <= kRadius; ++dy) {
                for (int dx = -kRadius; dx <= kRadius; ++dx) {
                    const double k = kernel[dy + kRadius][dx + kRadius];
                    const double pa = va.at(x + dx, y + dy);
                    const double pb = vb.at(x + dx, y + dy);
                    mu_a += k * pa;
                    mu_b += k * pb;
                    aa += k * pa * pa;
                    bb += k * pb * pb;
                    ab += k * pa * pb;
                }
            }
            const double var_a = aa - mu_a * mu_a;
            const double var_b = bb - mu_b * mu_b;
            const double cov = ab - mu_a * mu_b;
            const double num = (2.0 * mu_a * mu_b + kC1) * (2.0 * cov + kC2);
            const double den = (mu_a * mu_a + mu_b * mu_b + kC1) * (var_a + var_b + kC2);
            total += num / den;
            ++count;
        }
    }
    return total / static_cast<double>(count);
}

QualityReport evaluate(const Raster& result, const Raster& truth) {
    QualityReport report;
    report.psnr_db = psnr(result, truth);
    report.ssim = ssim(result, truth);
    report.per_band_psnr.reserve(static_cast<std::size_t>(result.bands()));
    for (int b = 0; b < result.bands(); ++b) {
        const ScalarField ra = result.band(b);
        const ScalarField rb = truth.band(b);
        double sum = 0.0;
        for (std::size_t i = 0; i < ra.size(); ++i) {
            const double d = ra[i] - rb[i];
            sum += d * d;
        }
        report.per_band_psnr.push_back(psnr_from_mse(sum / static_cast<double>(ra.size())));
    }
    return report;
}

}  // namespace phycr
