#pragma once

#include <cstdint>
#include <vector>

#include "phycr/filters.hpp"
#include "phycr/raster.hpp"

namespace phycr {

/// Parametrized logistic gate: sigma(z) = 1 / (1 + exp(-slope * (z - center))).
struct SigmoidGate {
    double center = 0.0;
    double slope = 1.0;

    double operator()(double z) const;
};

struct ExtractionConfig {
    double kappa_percentile = 0.85;       // cloud-region threshold on the probability map
    SigmoidGate gate_v{0.65, 12.0};       // applied to brightness V
    SigmoidGate gate_s{0.75, 12.0};       // applied to (1 - S)
    SigmoidGate gate_g{-0.05, 100.0};     // applied to -|grad|
    double eps_t = 1e-6;                  // transmission denominator regularizer
    double lambda_percentile = 0.75;      // adaptive normalizer rank for r and the HF excess
    double lambda_floor = 1e-4;           // keeps the confidence exponentials total
    double t_clamp_lo = 0.0;
    double t_clamp_hi = 1.0;
    double airlight_fallback_fraction = 1e-3;  // top-K brightest share when Omega is empty

    void validate() const;
};

/// Everything the extraction stage produces, intermediates included.
struct ScatterEstimate {
    AtmosphericLight light;
    ScalarField transmission;      // refined t-hat, in [t_clamp_lo, t_clamp_hi]
    ScalarField confidence;        // U in (0, 1]
    std::vector<std::uint8_t> omega_mask;  // row-major, 1 where the pixel is in Omega
    ScalarField residual;          // r >= 0
    ScalarField transmission_raw;  // pre-refinement t-hat
    ScalarField cloud_prob;
    bool airlight_fallback = false;
};

/// Pointwise gate product on brightness, inverted saturation and negated
/// gradient magnitude of brightness; high for bright, achromatic, flat pixels.
ScalarField cloud_probability(const Raster& cloudy, const ExtractionConfig& cfg);

struct AirlightEstimate {
    AtmosphericLight light;
    std::vector<std::uint8_t> omega_mask;
    bool fallback = false;
};

/// Omega = pixels with probability strictly above its kappa-percentile;
/// airlight is the per-band median of the cloudy image over Omega. An empty
/// Omega (constant probability map) falls back to the brightest pixels.
AirlightEstimate estimate_atmospheric_light(const Raster& cloudy, const ScalarField& prob,
                                            const ExtractionConfig& cfg);

/// Pixel-wise regression of the scattering model between base layers:
/// t = <I_B - A, J_B - A> / (|J_B - A|^2 + eps), clamped.
ScalarField estimate_transmission(const Raster& cloudy_base, const Raster& prior_base,
                                  const AtmosphericLight& light, const ExtractionConfig& cfg);

/// r(x) = ||I_B(x) - (t(x) * J_B(x) + (1 - t(x)) * A)||_2 across bands.
ScalarField physical_residual(const Raster& cloudy_base, const Raster& prior_base,
                              const ScalarField& t, const AtmosphericLight& light);

/// U = exp(-r / lambda_phy) * exp(-max(0, h_prior - h_cloudy) / lambda_hall),
/// with both lambdas set adaptively to the 75th percentile of their map,
/// floored to keep the expression total on perfectly consistent scenes.
ScalarField hallucination_confidence(const ScalarField& r, const ScalarField& h_prior,
                                     const ScalarField& h_cloudy, const ExtractionConfig& cfg);

/// Confidence-weighted guided filtering of the transmission map against the
/// cloudy-image brightness, re-clamped afterwards.
ScalarField refine_transmission(const ScalarField& t, const ScalarField& guide,
                                const ScalarField& confidence, const FilterParams& params,
                                const ExtractionConfig& cfg);

/// Full extraction stage: base layers, airlight, transmission, residual,
/// confidence, refinement. Deterministic composition of the steps above.
ScatterEstimate extract(const Raster& cloudy, const Raster& prior,
                        const FilterParams& fcfg, const ExtractionConfig& ecfg);

}  // namespace phycr
