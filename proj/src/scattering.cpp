#include "phycr/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace phycr {

Raster forward_degrade(const Raster& surface, const ScalarField& t,
                       const AtmosphericLight& light) {
    if (surface.width() != t.width() || surface.height() != t.height()) {
        throw std::invalid_argument("forward_degrade: surface/transmission dimension mismatch");
    }
    if (light.bands() != surface.bands()) {
        throw std::invalid_argument("forward_degrade: airlight band count mismatch");
    }
    const int c = surface.bands();
    Raster out(surface.width(), surface.height(), c);
    for (std::size_t i = 0; i < surface.pixels(); ++i) {
        const double ti = t[i];
        for (int b = 0; b < c; ++b) {
            out[i * c + b] = surface[i * c + b] * ti + light[b] * (1.0 - ti);
        }
    }
    return out;
}

void SynthConfig::validate() const {
    if (size < 32) throw std::invalid_argument("SynthConfig: size must be >= 32");
    if (bands < 1) throw std::invalid_argument("SynthConfig: bands must be >= 1");
    if (thick_core_fraction < 0.0 || thick_core_fraction > 1.0 ||
        thin_fraction < 0.0 || thin_fraction > 1.0 ||
        thick_core_fraction + thin_fraction > 1.0) {
        throw std::invalid_argument("SynthConfig: fractions must be in [0,1] and sum <= 1");
    }
    if (ref_gain <= 0.0) throw std::invalid_argument("SynthConfig: ref_gain must be > 0");
}

namespace {

// Uniform double in [0,1) from the standard-specified mt19937_64 stream.
// std::uniform_real_distribution is avoided: its output is not pinned by the
// standard and scenes must reproduce bit-exactly across platforms.
double next_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double uniform_in(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * next_uniform(rng);
}

// splitmix64-style coordinate hash; stateless per pixel so generation could
// be tiled without changing the output.
std::uint64_t hash_coords(std::uint64_t seed, std::uint64_t x, std::uint64_t y,
                          std::uint64_t channel) {
    std::uint64_t z = seed ^ (x * 0x9E3779B97F4A7C15ULL) ^ (y * 0xC2B2AE3D27D4EB4FULL) ^
                      (channel * 0x165667B19E3779F9ULL);
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Zero-mean hash noise in [-1, 1].
double hash_noise(std::uint64_t seed, int x, int y, int channel) {
    const auto h = hash_coords(seed, static_cast<std::uint64_t>(x),
                               static_cast<std::uint64_t>(y),
                               static_cast<std::uint64_t>(channel));
    return static_cast<double>(h >> 11) * 0x1.0p-53 * 2.0 - 1.0;
}

struct Blob {
    double cx, cy, sigma, amp;
};

double blob_field_at(const std::vector<Blob>& blobs, double x, double y) {
    double s = 0.0;
    for (const Blob& b : blobs) {
        const double dx = x - b.cx;
        const double dy = y - b.cy;
        s += b.amp * std::exp(-0.5 * (dx * dx + dy * dy) / (b.sigma * b.sigma));
    }
    return s;
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

SceneTruth generate_scene(const SynthConfig& cfg) {
    cfg.validate();
    std::mt19937_64 rng(cfg.seed);
    const int n = cfg.size;
    const int c = cfg.bands;
    const std::size_t pixels = static_cast<std::size_t>(n) * n;

    // Airlight: bright and near-achromatic.
    std::vector<double> a_values(static_cast<std::size_t>(c));
    const double a_base = uniform_in(rng, 0.86, 0.92);
    for (int b = 0; b < c; ++b) {
        a_values[static_cast<std::size_t>(b)] = a_base + uniform_in(rng, -0.01, 0.01);
    }
    AtmosphericLight light(std::move(a_values));

    // Surface: shared smooth structure plus per-band modulation and fine
    // hash-noise texture. Kept well below the airlight so estimation has
    // contrast to work with.
    std::vector<Blob> structure;
    const int n_structure = 6;
    for (int i = 0; i < n_structure; ++i) {
        structure.push_back({uniform_in(rng, 0.0, n), uniform_in(rng, 0.0, n),
                             uniform_in(rng, n / 10.0, n / 4.0), uniform_in(rng, -1.0, 1.0)});
    }
    const double fx = uniform_in(rng, 1.5, 3.5) / n;
    const double fy = uniform_in(rng, 1.5, 3.5) / n;
    const double phase = uniform_in(rng, 0.0, 6.28318530717958648);
    std::vector<double> band_scale(static_cast<std::size_t>(c));
    std::vector<double> band_offset(static_cast<std::size_t>(c));
    for (int b = 0; b < c; ++b) {
        band_scale[static_cast<std::size_t>(b)] = uniform_in(rng, 0.10, 0.22);
        band_offset[static_cast<std::size_t>(b)] = uniform_in(rng, 0.12, 0.35);
    }
    const std::uint64_t tex_seed = rng();

    Raster surface(n, n, c);
    for (int y = 0; y < n; ++y) {
        for (int x = 0; x < n; ++x) {
            const double s = blob_field_at(structure, x, y) +
                             0.6 * std::sin(6.28318530717958648 * (fx * x + fy * y) + phase);
            for (int b = 0; b < c; ++b) {
                const double tex = 0.015 * hash_noise(tex_seed, x, y, b);
                const double v = band_offset[static_cast<std::size_t>(b)] +
                                 band_scale[static_cast<std::size_t>(b)] * s + tex;
                surface.at(x, y, b) = std::clamp(v, 0.03, 0.65);
            }
        }
    }

    // Cloud opacity: normalized sum of Gaussian blobs, then a global strength
    // scale calibrated by bisection so the t < 0.02 fraction matches the
    // requested thick-core share.
    std::vector<Blob> clouds;
    const int n_clouds = std::max(3, static_cast<int>(std::lround(
        4.0 + 10.0 * (cfg.thick_core_fraction + cfg.thin_fraction))));
    for (int i = 0; i < n_clouds; ++i) {
        clouds.push_back({uniform_in(rng, 0.1 * n, 0.9 * n), uniform_in(rng, 0.1 * n, 0.9 * n),
                          uniform_in(rng, n / 14.0, n / 7.0), uniform_in(rng, 0.5, 1.0)});
    }
    std::vector<double> opacity(pixels);
    double op_max = 0.0;
    for (int y = 0; y < n; ++y) {
        for (int x = 0; x < n; ++x) {
            const double g = blob_field_at(clouds, x, y);
            opacity[static_cast<std::size_t>(y) * n + x] = g;
            op_max = std::max(op_max, g);
        }
    }
    if (op_max > 0.0) {
        for (double& g : opacity) g /= op_max;
    }

    auto thick_fraction_at = [&](double strength) {
        std::size_t count = 0;
        for (double g : opacity) {
            if (1.0 - strength * g < 0.02) ++count;
        }
        return static_cast<double>(count) / static_cast<double>(pixels);
    };
    double strength;
    if (cfg.thick_core_fraction <= 0.0) {
        strength = 0.9;  // min t = 0.1, no thick cores
    } else {
        double lo = 0.98, hi = 64.0;
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (thick_fraction_at(mid) < cfg.thick_core_fraction) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        strength = hi;
    }

    ScalarField transmission(n, n);
    for (std::size_t i = 0; i < pixels; ++i) {
        transmission[i] = clamp01(1.0 - strength * opacity[i]);
    }

    Raster cloudy = forward_degrade(surface, transmission, light);

    // Prior: surface plus a low-frequency color cast everywhere and spurious
    // high-frequency texture concentrated where the true signal is occluded,
    // fading out as transmission approaches 0.3.
    const double cfx = uniform_in(rng, 0.8, 1.8) / n;
    const double cfy = uniform_in(rng, 0.8, 1.8) / n;
    std::vector<double> cast_phase(static_cast<std::size_t>(c));
    for (int b = 0; b < c; ++b) cast_phase[static_cast<std::size_t>(b)] = uniform_in(rng, 0.0, 6.28318530717958648);
    const std::uint64_t hall_seed = rng();

    Raster prior(n, n, c);
    for (int y = 0; y < n; ++y) {
        for (int x = 0; x < n; ++x) {
            const double t = transmission.at(x, y);
            const double core_w = clamp01((0.3 - t) / 0.3);
            for (int b = 0; b < c; ++b) {
                const double cast = cfg.hallucination_amplitude *
                    std::sin(6.28318530717958648 * (cfx * x + cfy * y) +
                             cast_phase[static_cast<std::size_t>(b)]);
                const double spurious = cfg.hallucination_hf_gain * 0.15 * core_w *
                    hash_noise(hall_seed, x, y, b);
                prior.at(x, y, b) = clamp01(surface.at(x, y, b) + cast + spurious);
            }
        }
    }

    // Reference: exactly affine in the surface so radiometric alignment has a
    // closed-form answer.
    Raster reference(n, n, c);
    for (std::size_t i = 0; i < reference.size(); ++i) {
        reference[i] = clamp01(cfg.ref_gain * surface[i] + cfg.ref_offset);
    }

    return SceneTruth{std::move(surface), std::move(transmission), std::move(light),
                      std::move(cloudy), std::move(prior), std::move(reference)};
}

}  // namespace phycr
