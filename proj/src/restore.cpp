#include "phycr/restore.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace phycr {

void RestoreConfig::validate() const {
    if (t0 <= 0.0 || t0 >= 1.0) throw std::invalid_argument("RestoreConfig: t0 must be in (0,1)");
    if (alpha < 0.0 || beta < 0.0) throw std::invalid_argument("RestoreConfig: gains must be >= 0");
    if (gamma <= 0.0) throw std::invalid_argument("RestoreConfig: gamma must be > 0");
    if (align_omega_threshold <= 0.0 || align_omega_threshold >= 1.0) {
        throw std::invalid_argument("RestoreConfig: align_omega_threshold must be in (0,1)");
    }
    if (align_min_pixels < 1) {
        throw std::invalid_argument("RestoreConfig: align_min_pixels must be >= 1");
    }
}

namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

void check_raster_field(const Raster& r, const ScalarField& f, const char* what) {
    if (r.width() != f.width() || r.height() != f.height()) {
        throw std::invalid_argument(std::string(what) + ": dimension mismatch");
    }
}

}  // namespace

Raster invert_scattering(const Raster& cloudy, const ScalarField& t,
                         const AtmosphericLight& light, const RestoreConfig& cfg) {
    check_raster_field(cloudy, t, "invert_scattering");
    if (light.bands() != cloudy.bands()) {
        throw std::invalid_argument("invert_scattering: airlight band count mismatch");
    }
    cfg.validate();
    const int c = cloudy.bands();
    Raster out(cloudy.width(), cloudy.height(), c);
    for (std::size_t i = 0; i < cloudy.pixels(); ++i) {
        const double denom = std::max(t[i], cfg.t0);
        for (int b = 0; b < c; ++b) {
            out[i * c + b] = clamp01((cloudy[i * c + b] - light[b]) / denom + light[b]);
        }
    }
    return out;
}

Raster cognitive_adjust(const Raster& j_phy, const Raster& prior, const Raster& cloudy,
                        const ScalarField& t, const ScalarField& confidence,
                        const FilterParams& fcfg, const RestoreConfig& cfg) {
    if (!j_phy.same_shape(prior) || !j_phy.same_shape(cloudy)) {
        throw std::invalid_argument("cognitive_adjust: raster dimension mismatch");
    }
    check_raster_field(j_phy, t, "cognitive_adjust");
    check_raster_field(j_phy, confidence, "cognitive_adjust");
    fcfg.validate();
    cfg.validate();

    const Raster prior_lp = lowpass(prior, fcfg.lp_sigma);
    const Raster phy_lp = lowpass(j_phy, fcfg.lp_sigma);
    const Raster cloudy_lp = lowpass(cloudy, fcfg.lp_sigma);

    const int c = j_phy.bands();
    Raster out(j_phy.width(), j_phy.height(), c);
    for (std::size_t i = 0; i < j_phy.pixels(); ++i) {
        const double u = confidence[i];
        const double ti = t[i];
        for (int b = 0; b < c; ++b) {
            const std::size_t k = i * c + b;
            const double v = j_phy[k]
                + cfg.alpha * u * (prior_lp[k] - phy_lp[k])
                + cfg.beta * ti * (cloudy[k] - cloudy_lp[k]);
            out[k] = clamp01(v);
        }
    }
    return out;
}

ScalarField visibility_weight(const ScalarField& t, const RestoreConfig& cfg) {
    cfg.validate();
    ScalarField omega(t.width(), t.height());
    for (std::size_t i = 0; i < t.size(); ++i) {
        omega[i] = std::exp(-cfg.gamma * (1.0 - t[i]));
    }
    return omega;
}

AlignResult align_reference(const Raster& reference, const Raster& j_cog,
                            const ScalarField& omega, const RestoreConfig& cfg) {
    if (!reference.same_shape(j_cog)) {
        throw std::invalid_argument("align_reference: raster dimension mismatch");
    }
    check_raster_field(reference, omega, "align_reference");
    cfg.validate();

    std::vector<std::size_t> selected;
    for (std::size_t i = 0; i < omega.size(); ++i) {
        if (omega[i] > cfg.align_omega_threshold) selected.push_back(i);
    }

    const int c = reference.bands();
    AlignResult result;
    result.params.assign(static_cast<std::size_t>(c), {1.0, 0.0});

    if (selected.size() < static_cast<std::size_t>(cfg.align_min_pixels)) {
        result.fallback = true;
        result.aligned = reference;
        return result;
    }

    // Per-band ordinary least squares: a * ref + b ~ j_cog over the selected
    // pixels. Accumulation in a fixed index order keeps runs reproducible.
    for (int b = 0; b < c; ++b) {
        double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
        for (std::size_t i : selected) {
            const double x = reference[i * c + b];
            const double y = j_cog[i * c + b];
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        const double n = static_cast<double>(selected.size());
        const double var = sxx - sx * sx / n;
        double a = 1.0, bb = 0.0;
        if (var > 1e-12) {
            a = (sxy - sx * sy / n) / var;
            bb = (sy - a * sx) / n;
        } else {
            // Constant reference over the fit region: match its mean level.
            a = 1.0;
            bb = (sy - sx) / n;
        }
        result.params[static_cast<std::size_t>(b)] = {a, bb};
    }

    result.aligned = Raster(reference.width(), reference.height(), c);
    for (std::size_t i = 0; i < reference.pixels(); ++i) {
        for (int b = 0; b < c; ++b) {
            const auto [a, bb] = result.params[static_cast<std::size_t>(b)];
            result.aligned[i * c + b] = clamp01(a * reference[i * c + b] + bb);
        }
    }
    return result;
}

Raster fuse(const Raster& j_cog, const Raster& ref_aligned, const ScalarField& omega) {
    if (!j_cog.same_shape(ref_aligned)) {
        throw std::invalid_argument("fuse: raster dimension mismatch");
    }
    check_raster_field(j_cog, omega, "fuse");
    const int c = j_cog.bands();
    Raster out(j_cog.width(), j_cog.height(), c);
    for (std::size_t i = 0; i < j_cog.pixels(); ++i) {
        const double w = omega[i];
        for (int b = 0; b < c; ++b) {
            out[i * c + b] = w * j_cog[i * c + b] + (1.0 - w) * ref_aligned[i * c + b];
        }
    }
    return out;
}

RestorationBundle run_pipeline(const Raster& cloudy, const Raster& prior,
                               const Raster& reference, const FilterParams& fcfg,
                               const ExtractionConfig& ecfg, const RestoreConfig& rcfg,
                               bool has_reference) {
    if (!cloudy.same_shape(prior)) {
        throw std::invalid_argument("run_pipeline: cloudy/prior dimension mismatch");
    }
    if (has_reference && !cloudy.same_shape(reference)) {
        throw std::invalid_argument("run_pipeline: cloudy/reference dimension mismatch");
    }
    rcfg.validate();

    RestorationBundle bundle;
    bundle.estimate = extract(cloudy, prior, fcfg, ecfg);
    bundle.j_phy = invert_scattering(cloudy, bundle.estimate.transmission,
                                     bundle.estimate.light, rcfg);
    bundle.j_cog = cognitive_adjust(bundle.j_phy, prior, cloudy, bundle.estimate.transmission,
                                    bundle.estimate.confidence, fcfg, rcfg);
    bundle.omega = visibility_weight(bundle.estimate.transmission, rcfg);

    if (has_reference) {
        AlignResult align = align_reference(reference, bundle.j_cog, bundle.omega, rcfg);
        bundle.ref_aligned = std::move(align.aligned);
        bundle.align_params = std::move(align.params);
        bundle.align_fallback = align.fallback;
        bundle.final = fuse(bundle.j_cog, bundle.ref_aligned, bundle.omega);
    } else {
        bundle.reference_free = true;
        bundle.align_params.assign(static_cast<std::size_t>(cloudy.bands()), {1.0, 0.0});
        bundle.final = bundle.j_cog;
    }
    return bundle;
}

}  // namespace phycr
