#pragma once

#include <cstdint>

#include "phycr/raster.hpp"

namespace phycr {

/// Forward imaging model: per-band convex mix of surface signal and airlight,
/// I = J * t + A * (1 - t).
Raster forward_degrade(const Raster& surface, const ScalarField& t,
                       const AtmosphericLight& light);

/// Ground-truth bundle for one synthetic scene.
struct SceneTruth {
    Raster surface;           // true J
    ScalarField transmission; // true t in [0,1]
    AtmosphericLight light;   // true A
    Raster cloudy;            // I, exactly forward_degrade(surface, t, light)
    Raster prior;             // perturbed surface emulating the VLM candidate
    Raster reference;         // ref_gain * surface + ref_offset, clamped
};

struct SynthConfig {
    std::uint64_t seed = 1;
    int size = 256;
    int bands = 3;
    double thick_core_fraction = 0.1;   // target fraction of pixels with t < 0.02
    double thin_fraction = 0.3;         // approximate fraction with t in (0.3, 0.9)
    double hallucination_amplitude = 0.0;  // low-frequency color cast in the prior
    double hallucination_hf_gain = 0.0;    // spurious texture inside thick cores
    double ref_gain = 1.0;
    double ref_offset = 0.0;

    void validate() const;
};

/// Deterministic procedural scene: smooth multi-band surface, Gaussian-blob
/// cloud field calibrated to the requested thick-core fraction, a prior with
/// injected low-frequency cast and core-confined high-frequency artifacts,
/// and an affine-shifted reference. Same config -> byte-identical scene.
SceneTruth generate_scene(const SynthConfig& cfg);

}  // namespace phycr
