#pragma once

#include "phycr/raster.hpp"

namespace phycr {

/// Parameters for the filter family used across the pipeline.
struct FilterParams {
    int base_radius = 8;       // edge-preserving base-layer window radius
    double base_eps = 1e-3;    // base-layer guided filter regularizer
    double lp_sigma = 4.0;     // Gaussian low-pass scale in pixels
    int refine_radius = 16;    // transmission refinement window radius
    double refine_eps = 1e-4;  // refinement guided filter regularizer
    double w_floor = 1e-3;     // total window weight below which the weighted
                               // filter falls back to unweighted statistics

    void validate() const;
};

/// Windowed mean over a (2*radius+1)^2 box with edge replication padding.
ScalarField box_mean(const ScalarField& field, int radius);

/// Guided filter: local linear model q = a * guide + b with per-window
/// least squares a = cov(guide, input) / (var(guide) + eps),
/// b = mean(input) - a * mean(guide); coefficients are window-averaged
/// before application.
ScalarField guided_filter(const ScalarField& input, const ScalarField& guide,
                          int radius, double eps);

/// Guided filter with weight-normalized window statistics: each pixel
/// contributes to means, variance and covariance in proportion to its
/// weight. Uniform weights reproduce guided_filter exactly. Windows whose
/// total weight falls below w_floor use unweighted statistics instead.
ScalarField weighted_guided_filter(const ScalarField& input, const ScalarField& guide,
                                   const ScalarField& weights, int radius, double eps,
                                   double w_floor = 1e-3);

/// Per-band self-guided guided filter; carries the low-frequency radiometry.
Raster base_layer(const Raster& img, const FilterParams& params);

/// Per-band Gaussian blur, kernel truncated at 3*sigma, edge-replicated,
/// normalized to sum 1.
Raster lowpass(const Raster& img, double sigma);
ScalarField lowpass(const ScalarField& field, double sigma);

/// High-frequency texture intensity: |4-neighbor Laplacian| of brightness.
ScalarField highfreq_intensity(const Raster& img);

/// Euclidean magnitude of Sobel central-difference gradients, edge-replicated.
/// Kernels are normalized by 1/8 so the stencil gain on a unit-slope ramp is
/// exactly 1: the output is in value units per pixel.
ScalarField gradient_magnitude(const ScalarField& field);

}  // namespace phycr
