#pragma once

#include <utility>
#include <vector>

#include "phycr/filters.hpp"
#include "phycr/param_extract.hpp"
#include "phycr/raster.hpp"

namespace phycr {

struct RestoreConfig {
    double t0 = 0.1;                    // transmission floor for the inversion
    double alpha = 0.6;                 // cognitive-guidance gain
    double beta = 1.0;                  // detail-preservation gain
    double gamma = 4.0;                 // extinction sensitivity
    double align_omega_threshold = 0.9; // high-visibility selection for alignment
    int align_min_pixels = 500;         // below this, alignment degrades to identity

    void validate() const;
};

struct RestorationBundle {
    Raster j_phy;
    Raster j_cog;
    ScalarField omega;
    Raster ref_aligned;
    Raster final;
    std::vector<std::pair<double, double>> align_params;  // per-band (gain, offset)
    bool align_fallback = false;
    bool reference_free = false;
    ScatterEstimate estimate;
};

/// Physical inversion J_phy = (I - A) / max(t, t0) + A, clamped to [0,1].
Raster invert_scattering(const Raster& cloudy, const ScalarField& t,
                         const AtmosphericLight& light, const RestoreConfig& cfg);

/// Frequency-decoupled correction: low-pass radiometry pulled toward the
/// prior in proportion to confidence, sensor high-frequency detail re-injected
/// in proportion to transmission.
/// J_cog = J_phy + alpha * U * (lp(prior) - lp(J_phy)) + beta * t * (I - lp(I))
Raster cognitive_adjust(const Raster& j_phy, const Raster& prior, const Raster& cloudy,
                        const ScalarField& t, const ScalarField& confidence,
                        const FilterParams& fcfg, const RestoreConfig& cfg);

/// Soft visibility gate omega = exp(-gamma * (1 - t)), range [e^-gamma, 1].
ScalarField visibility_weight(const ScalarField& t, const RestoreConfig& cfg);

struct AlignResult {
    Raster aligned;
    std::vector<std::pair<double, double>> params;  // per-band (gain, offset)
    bool fallback = false;
};

/// Per-band least-squares affine fit of the reference onto the current scene
/// over high-visibility pixels (omega above threshold). Too few selected
/// pixels yields identity alignment with the fallback flag set.
AlignResult align_reference(const Raster& reference, const Raster& j_cog,
                            const ScalarField& omega, const RestoreConfig& cfg);

/// J = omega * J_cog + (1 - omega) * ref_aligned, per band.
Raster fuse(const Raster& j_cog, const Raster& ref_aligned, const ScalarField& omega);

/// Full pipeline: extraction, inversion, cognitive adjustment, visibility
/// weighting, reference alignment and fusion. Pass has_reference = false to
/// skip fusion and return J_cog as the final image.
RestorationBundle run_pipeline(const Raster& cloudy, const Raster& prior,
                               const Raster& reference, const FilterParams& fcfg,
                               const ExtractionConfig& ecfg, const RestoreConfig& rcfg,
                               bool has_reference = true);

}  // namespace phycr
