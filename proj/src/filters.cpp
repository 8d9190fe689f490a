#include "phycr/filters.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace phycr {

void FilterParams::validate() const {
    if (base_radius < 1 || refine_radius < 1) {
        throw std::invalid_argument("FilterParams: radii must be >= 1");
    }
    if (base_eps <= 0.0 || refine_eps <= 0.0) {
        throw std::invalid_argument("FilterParams: eps must be > 0");
    }
    if (lp_sigma <= 0.0) {
        throw std::invalid_argument("FilterParams: lp_sigma must be > 0");
    }
}

namespace {

inline int clamp_index(int i, int n) { return std::clamp(i, 0, n - 1); }

// Windowed sum over a (2r+1)^2 box with edge replication, separable passes.
// Each pass uses a prefix sum over the interior plus replicated-edge terms,
// which keeps the accumulation order independent of any tiling.
std::vector<double> box_sum_1d_rows(const std::vector<double>& in, int w, int h, int r) {
    std::vector<double> out(in.size());
    std::vector<double> prefix(static_cast<std::size_t>(w) + 1);
    for (int y = 0; y < h; ++y) {
        const double* row = in.data() + static_cast<std::size_t>(y) * w;
        prefix[0] = 0.0;
        for (int x = 0; x < w; ++x) prefix[x + 1] = prefix[x] + row[x];
        for (int x = 0; x < w; ++x) {
            const int lo = x - r;
            const int hi = x + r;
            const int clo = std::max(lo, 0);
            const int chi = std::min(hi, w - 1);
            double s = prefix[chi + 1] - prefix[clo];
            if (lo < 0) s += static_cast<double>(-lo) * row[0];
            if (hi > w - 1) s += static_cast<double>(hi - (w - 1)) * row[w - 1];
            out[static_cast<std::size_t>(y) * w + x] = s;
        }
    }
    return out;
}

std::vector<double> box_sum_1d_cols(const std::vector<double>& in, int w, int h, int r) {
    std::vector<double> out(in.size());
    std::vector<double> prefix(static_cast<std::size_t>(h) + 1);
    for (int x = 0; x < w; ++x) {
        prefix[0] = 0.0;
        for (int y = 0; y < h; ++y) {
            prefix[y + 1] = prefix[y] + in[static_cast<std::size_t>(y) * w + x];
        }
        const double top = in[x];
        const double bottom = in[static_cast<std::size_t>(h - 1) * w + x];
        for (int y = 0; y < h; ++y) {
            const int lo = y - r;
            const int hi = y + r;
            const int clo = std::max(lo, 0);
            const int chi = std::min(hi, h - 1);
            double s = prefix[chi + 1] - prefix[clo];
            if (lo < 0) s += static_cast<double>(-lo) * top;
            if (hi > h - 1) s += static_cast<double>(hi - (h - 1)) * bottom;
            out[static_cast<std::size_t>(y) * w + x] = s;
        }
    }
    return out;
}

ScalarField box_sum(const ScalarField& field, int radius) {
    auto rows = box_sum_1d_rows(field.data(), field.width(), field.height(), radius);
    auto full = box_sum_1d_cols(rows, field.width(), field.height(), radius);
    return ScalarField(field.width(), field.height(), std::move(full));
}

ScalarField multiply(const ScalarField& a, const ScalarField& b) {
    ScalarField out(a.width(), a.height());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
    return out;
}

std::vector<double> gaussian_kernel(double sigma) {
    const int r = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<double> k(static_cast<std::size_t>(2 * r + 1));
    double sum = 0.0;
    for (int i = -r; i <= r; ++i) {
        const double v = std::exp(-0.5 * (i * i) / (sigma * sigma));
        k[static_cast<std::size_t>(i + r)] = v;
        sum += v;
    }
    for (double& v : k) v /= sum;
    return k;
}

ScalarField convolve_separable(const ScalarField& field, const std::vector<double>& kernel) {
    const int w = field.width();
    const int h = field.height();
    const int r = (static_cast<int>(kernel.size()) - 1) / 2;
    ScalarField tmp(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double s = 0.0;
            for (int i = -r; i <= r; ++i) {
                s += kernel[static_cast<std::size_t>(i + r)] * field.at(clamp_index(x + i, w), y);
            }
            tmp.at(x, y) = s;
        }
    }
    ScalarField out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double s = 0.0;
            for (int i = -r; i <= r; ++i) {
                s += kernel[static_cast<std::size_t>(i + r)] * tmp.at(x, clamp_index(y + i, h));
            }
            out.at(x, y) = s;
        }
    }
    return out;
}

}  // namespace

ScalarField box_mean(const ScalarField& field, int radius) {
    if (radius < 1) throw std::invalid_argument("box_mean: radius must be >= 1");
    const double n = static_cast<double>(2 * radius + 1) * (2 * radius + 1);
    ScalarField out = box_sum(field, radius);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] /= n;
    return out;
}

ScalarField guided_filter(const ScalarField& input, const ScalarField& guide,
                          int radius, double eps) {
    if (!input.same_shape(guide)) {
        throw std::invalid_argument("guided_filter: input/guide dimension mismatch");
    }
    const ScalarField mean_g = box_mean(guide, radius);
    const ScalarField mean_i = box_mean(input, radius);
    const ScalarField mean_gg = box_mean(multiply(guide, guide), radius);
    const ScalarField mean_gi = box_mean(multiply(guide, input), radius);

    ScalarField a(input.width(), input.height());
    ScalarField b(input.width(), input.height());
    for (std::size_t i = 0; i < input.size(); ++i) {
        const double var_g = mean_gg[i] - mean_g[i] * mean_g[i];
        const double cov_gi = mean_gi[i] - mean_g[i] * mean_i[i];
        a[i] = cov_gi / (var_g + eps);
        b[i] = mean_i[i] - a[i] * mean_g[i];
    }
    const ScalarField mean_a = box_mean(a, radius);
    const ScalarField mean_b = box_mean(b, radius);

    ScalarField out(input.width(), input.height());
    for (std::size_t i = 0; i < input.size(); ++i) {
        out[i] = mean_a[i] * guide[i] + mean_b[i];
    }
    return out;
}

ScalarField weighted_guided_filter(const ScalarField& input, const ScalarField& guide,
                                   const ScalarField& weights, int radius, double eps,
                                   double w_floor) {
    if (!input.same_shape(guide) || !input.same_shape(weights)) {
        throw std::invalid_argument("weighted_guided_filter: dimension mismatch");
    }
    const double n = static_cast<double>(2 * radius + 1) * (2 * radius + 1);

    const ScalarField sum_w = box_sum(weights, radius);
    const ScalarField sum_wg = box_sum(multiply(weights, guide), radius);
    const ScalarField sum_wi = box_sum(multiply(weights, input), radius);
    const ScalarField sum_wgg = box_sum(multiply(multiply(weights, guide), guide), radius);
    const ScalarField sum_wgi = box_sum(multiply(multiply(weights, guide), input), radius);

    // Unweighted fallback statistics for windows with negligible total weight.
    const ScalarField sum_g = box_sum(guide, radius);
    const ScalarField sum_i = box_sum(input, radius);
    const ScalarField sum_gg = box_sum(multiply(guide, guide), radius);
    const ScalarField sum_gi = box_sum(multiply(guide, input), radius);

    ScalarField a(input.width(), input.height());
    ScalarField b(input.width(), input.height());
    for (std::size_t i = 0; i < input.size(); ++i) {
        double mean_g, mean_i, mean_gg, mean_gi;
        if (sum_w[i] < w_floor) {
            mean_g = sum_g[i] / n;
            mean_i = sum_i[i] / n;
            mean_gg = sum_gg[i] / n;
            mean_gi = sum_gi[i] / n;
        } else {
            mean_g = sum_wg[i] / sum_w[i];
            mean_i = sum_wi[i] / sum_w[i];
            mean_gg = sum_wgg[i] / sum_w[i];
            mean_gi = sum_wgi[i] / sum_w[i];
        }
        const double var_g = mean_gg - mean_g * mean_g;
        const double cov_gi = mean_gi - mean_g * mean_i;
        a[i] = cov_gi / (var_g + eps);
        b[i] = mean_i - a[i] * mean_g;
    }
    const ScalarField mean_a = box_mean(a, radius);
    const ScalarField mean_b = box_mean(b, radius);

    ScalarField out(input.width(), input.height());
    for (std::size_t i = 0; i < input.size(); ++i) {
        out[i] = mean_a[i] * guide[i] + mean_b[i];
    }
    return out;
}

Raster base_layer(const Raster& img, const FilterParams& params) {
    params.validate();
    Raster out(img.width(), img.height(), img.bands());
    for (int b = 0; b < img.bands(); ++b) {
        const ScalarField band = img.band(b);
        const ScalarField filtered = guided_filter(band, band, params.base_radius, params.base_eps);
        for (std::size_t i = 0; i < filtered.size(); ++i) {
            out[i * img.bands() + b] = filtered[i];
        }
    }
    return out;
}

ScalarField lowpass(const ScalarField& field, double sigma) {
    if (sigma <= 0.0) throw std::invalid_argument("lowpass: sigma must be > 0");
    return convolve_separable(field, gaussian_kernel(sigma));
}

Raster lowpass(const Raster& img, double sigma) {
    if (sigma <= 0.0) throw std::invalid_argument("lowpass: sigma must be > 0");
    const auto kernel = gaussian_kernel(sigma);
    Raster out(img.width(), img.height(), img.bands());
    for (int b = 0; b < img.bands(); ++b) {
        const ScalarField filtered = convolve_separable(img.band(b), kernel);
        for (std::size_t i = 0; i < filtered.size(); ++i) {
            out[i * img.bands() + b] = filtered[i];
        }
    }
    return out;
}

ScalarField highfreq_intensity(const Raster& img) {
    const ScalarField v = brightness(img);
    const int w = v.width();
    const int h = v.height();
    ScalarField out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double c = v.at(x, y);
            // Summed as neighbor differences so constant inputs map to an
            // exact zero.
            const double lap = (c - v.at(clamp_index(x - 1, w), y))
                + (c - v.at(clamp_index(x + 1, w), y))
                + (c - v.at(x, clamp_index(y - 1, h)))
                + (c - v.at(x, clamp_index(y + 1, h)));
            out.at(x, y) = std::abs(lap);
        }
    }
    return out;
}

ScalarField gradient_magnitude(const ScalarField& field) {
    const int w = field.width();
    const int h = field.height();
    ScalarField out(w, h);
    for (int y = 0; y < h; ++y) {
        const int ym = clamp_index(y - 1, h);
        const int yp = clamp_index(y + 1, h);
        for (int x = 0; x < w; ++x) {
            const int xm = clamp_index(x - 1, w);
            const int xp = clamp_index(x + 1, w);
            // Paired column/row differences keep flat fields exactly zero.
            const double gx = ((field.at(xp, ym) - field.at(xm, ym))
                               + 2.0 * (field.at(xp, y) - field.at(xm, y))
                               + (field.at(xp, yp) - field.at(xm, yp)))
                              / 8.0;
            const double gy = ((field.at(xm, yp) - field.at(xm, ym))
                               + 2.0 * (field.at(x, yp) - field.at(x, ym))
                               + (field.at(xp, yp) - field.at(xp, ym)))
                              / 8.0;
            out.at(x, y) = std::hypot(gx, gy);
        }
    }
    return out;
}

}  // namespace phycr
