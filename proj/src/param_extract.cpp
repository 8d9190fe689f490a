#include "phycr/param_extract.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace phycr {

double SigmoidGate::operator()(double z) const {
    return 1.0 / (1.0 + std::exp(-slope * (z - center)));
}

void ExtractionConfig::validate() const {
    if (kappa_percentile <= 0.0 || kappa_percentile >= 1.0 ||
        lambda_percentile <= 0.0 || lambda_percentile >= 1.0) {
        throw std::invalid_argument("ExtractionConfig: percentiles must be in (0,1)");
    }
    if (eps_t <= 0.0) throw std::invalid_argument("ExtractionConfig: eps_t must be > 0");
    if (lambda_floor <= 0.0) throw std::invalid_argument("ExtractionConfig: lambda_floor must be > 0");
    if (gate_v.slope <= 0.0 || gate_s.slope <= 0.0 || gate_g.slope <= 0.0) {
        throw std::invalid_argument("ExtractionConfig: gate slopes must be > 0");
    }
    if (t_clamp_lo >= t_clamp_hi) {
        throw std::invalid_argument("ExtractionConfig: empty t_clamp interval");
    }
}

ScalarField cloud_probability(const Raster& cloudy, const ExtractionConfig& cfg) {
    const ScalarField v = brightness(cloudy);
    const ScalarField s = saturation(cloudy);
    const ScalarField g = gradient_magnitude(v);
    ScalarField out(cloudy.width(), cloudy.height());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = cfg.gate_v(v[i]) * cfg.gate_s(1.0 - s[i]) * cfg.gate_g(-g[i]);
    }
    return out;
}

namespace {

double median_inplace(std::vector<double>& v) {
    const std::size_t n = v.size();
    const std::size_t mid = n / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    double m = v[mid];
    if (n % 2 == 0) {
        std::nth_element(v.begin(), v.begin() + mid - 1, v.begin() + mid);
        m = 0.5 * (m + v[mid - 1]);
    }
    return m;
}

}  // namespace

AirlightEstimate estimate_atmospheric_light(const Raster& cloudy, const ScalarField& prob,
                                            const ExtractionConfig& cfg) {
    if (cloudy.width() != prob.width() || cloudy.height() != prob.height()) {
        throw std::invalid_argument("estimate_atmospheric_light: dimension mismatch");
    }
    cfg.validate();

    AirlightEstimate result;
    result.omega_mask.assign(cloudy.pixels(), 0);

    const double kappa = percentile(prob, cfg.kappa_percentile);
    std::vector<std::size_t> selected;
    for (std::size_t i = 0; i < prob.size(); ++i) {
        if (prob[i] > kappa) {
            result.omega_mask[i] = 1;
            selected.push_back(i);
        }
    }

    if (selected.empty()) {
        // Degenerate (constant) probability map: use the brightest pixels.
        result.fallback = true;
        const ScalarField v = brightness(cloudy);
        const std::size_t k = std::max<std::size_t>(
            1, static_cast<std::size_t>(cfg.airlight_fallback_fraction *
                                        static_cast<double>(cloudy.pixels())));
        std::vector<std::size_t> order(cloudy.pixels());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return v[a] > v[b]; });
        selected.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
        for (std::size_t i : selected) result.omega_mask[i] = 1;
    }

    const int c = cloudy.bands();
    std::vector<double> band_values(selected.size());
    std::vector<double> a(static_cast<std::size_t>(c));
    for (int b = 0; b < c; ++b) {
        for (std::size_t j = 0; j < selected.size(); ++j) {
            band_values[j] = cloudy[selected[j] * c + b];
        }
        a[static_cast<std::size_t>(b)] = std::clamp(median_inplace(band_values), 0.0, 1.0);
    }
    result.light = AtmosphericLight(std::move(a));
    return result;
}

ScalarField estimate_transmission(const Raster& cloudy_base, const Raster& prior_base,
                                  const AtmosphericLight& light, const ExtractionConfig& cfg) {
    if (!cloudy_base.same_shape(prior_base)) {
        throw std::invalid_argument("estimate_transmission: dimension mismatch");
    }
    cfg.validate();
    const int c = cloudy_base.bands();
    ScalarField t(cloudy_base.width(), cloudy_base.height());
    for (std::size_t i = 0; i < cloudy_base.pixels(); ++i) {
        double num = 0.0;
        double den = 0.0;
        for (int b = 0; b < c; ++b) {
            const double di = cloudy_base[i * c + b] - light[b];
            const double dj = prior_base[i * c + b] - light[b];
            num += di * dj;
            den += dj * dj;
        }
        t[i] = std::clamp(num / (den + cfg.eps_t), cfg.t_clamp_lo, cfg.t_clamp_hi);
    }
    return t;
}

ScalarField physical_residual(const Raster& cloudy_base, const Raster& prior_base,
                              const ScalarField& t, const AtmosphericLight& light) {
    if (!cloudy_base.same_shape(prior_base) ||
        cloudy_base.width() != t.width() || cloudy_base.height() != t.height()) {
        throw std::invalid_argument("physical_residual: dimension mismatch");
    }
    const int c = cloudy_base.bands();
    ScalarField r(cloudy_base.width(), cloudy_base.height());
    for (std::size_t i = 0; i < cloudy_base.pixels(); ++i) {
        double sq = 0.0;
        for (int b = 0; b < c; ++b) {
            const double resynth = t[i] * prior_base[i * c + b] + (1.0 - t[i]) * light[b];
            const double d = cloudy_base[i * c + b] - resynth;
            sq += d * d;
        }
        r[i] = std::sqrt(sq);
    }
    return r;
}

ScalarField hallucination_confidence(const ScalarField& r, const ScalarField& h_prior,
                                     const ScalarField& h_cloudy, const ExtractionConfig& cfg) {
    if (!r.same_shape(h_prior) || !r.same_shape(h_cloudy)) {
        throw std::invalid_argument("hallucination_confidence: dimension mismatch");
    }
    cfg.validate();

    ScalarField excess(r.width(), r.height());
    for (std::size_t i = 0; i < excess.size(); ++i) {
        excess[i] = std::max(0.0, h_prior[i] - h_cloudy[i]);
    }
    const double lambda_phy = std::max(percentile(r, cfg.lambda_percentile), cfg.lambda_floor);
    const double lambda_hall = std::max(percentile(excess, cfg.lambda_percentile), cfg.lambda_floor);

    ScalarField u(r.width(), r.height());
    for (std::size_t i = 0; i < u.size(); ++i) {
        u[i] = std::exp(-r[i] / lambda_phy) * std::exp(-excess[i] / lambda_hall);
    }
    return u;
}

ScalarField refine_transmission(const ScalarField& t, const ScalarField& guide,
                                const ScalarField& confidence, const FilterParams& params,
                                const ExtractionConfig& cfg) {
    if (!t.same_shape(guide) || !t.same_shape(confidence)) {
        throw std::invalid_argument("refine_transmission: dimension mismatch");
    }
    params.validate();
    ScalarField refined = weighted_guided_filter(t, guide, confidence, params.refine_radius,
                                                 params.refine_eps, params.w_floor);
    for (std::size_t i = 0; i < refined.size(); ++i) {
        refined[i] = std::clamp(refined[i], cfg.t_clamp_lo, cfg.t_clamp_hi);
    }
    return refined;
}

ScatterEstimate extract(const Raster& cloudy, const Raster& prior,
                        const FilterParams& fcfg, const ExtractionConfig& ecfg) {
    if (!cloudy.same_shape(prior)) {
        throw std::invalid_argument("extract: cloudy/prior dimension mismatch");
    }
    fcfg.validate();
    ecfg.validate();

    const Raster cloudy_base = base_layer(cloudy, fcfg);
    const Raster prior_base = base_layer(prior, fcfg);

    ScatterEstimate est;
    est.cloud_prob = cloud_probability(cloudy, ecfg);
    AirlightEstimate air = estimate_atmospheric_light(cloudy, est.cloud_prob, ecfg);
    est.light = std::move(air.light);
    est.omega_mask = std::move(air.omega_mask);
    est.airlight_fallback = air.fallback;

    est.transmission_raw = estimate_transmission(cloudy_base, prior_base, est.light, ecfg);
    est.residual = physical_residual(cloudy_base, prior_base, est.transmission_raw, est.light);
    est.confidence = hallucination_confidence(est.residual, highfreq_intensity(prior),
                                              highfreq_intensity(cloudy), ecfg);
    est.transmission = refine_transmission(est.transmission_raw, brightness(cloudy),
                                           est.confidence, fcfg, ecfg);
    return est;
}

}  // namespace phycr
