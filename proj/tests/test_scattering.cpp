#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "phycr/scattering.hpp"

using namespace phycr;

TEST_CASE("forward_degrade pointwise model") {
    Raster surface(8, 8, 3, 0.5);
    AtmosphericLight light(std::vector<double>{0.9, 0.9, 0.9});

    ScalarField t1(8, 8, 1.0);
    CHECK(oracles::max_abs_diff(forward_degrade(surface, t1, light), surface) == 0.0);

    ScalarField t0(8, 8, 0.0);
    Raster occluded = forward_degrade(surface, t0, light);
    for (std::size_t i = 0; i < occluded.size(); ++i) CHECK(occluded[i] == 0.9);

    ScalarField t06(8, 8, 0.6);
    Raster mixed = forward_degrade(surface, t06, light);
    for (std::size_t i = 0; i < mixed.size(); ++i) {
        CHECK(mixed[i] == doctest::Approx(0.5 * 0.6 + 0.9 * 0.4));
    }

    ScalarField bad(4, 4, 0.5);
    CHECK_THROWS_AS(forward_degrade(surface, bad, light), std::invalid_argument);
}

TEST_CASE("forward_degrade is affine in the surface") {
    Raster j1 = oracles::random_raster(12, 12, 3, 1);
    Raster j2 = oracles::random_raster(12, 12, 3, 2);
    ScalarField t = oracles::random_field(12, 12, 3);
    AtmosphericLight light(std::vector<double>{0.85, 0.9, 0.88});

    const double alpha = 0.3;
    Raster blend(12, 12, 3);
    for (std::size_t i = 0; i < blend.size(); ++i) {
        blend[i] = alpha * j1[i] + (1.0 - alpha) * j2[i];
    }
    Raster lhs = forward_degrade(blend, t, light);
    Raster d1 = forward_degrade(j1, t, light);
    Raster d2 = forward_degrade(j2, t, light);
    Raster rhs(12, 12, 3);
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = alpha * d1[i] + (1.0 - alpha) * d2[i];
    CHECK(oracles::max_abs_diff(lhs, rhs) < 1e-12);
}

TEST_CASE("generate_scene is deterministic") {
    SynthConfig cfg;
    cfg.seed = 42;
    cfg.size = 64;
    SceneTruth a = generate_scene(cfg);
    SceneTruth b = generate_scene(cfg);
    CHECK(a.surface.data() == b.surface.data());
    CHECK(a.transmission.data() == b.transmission.data());
    CHECK(a.cloudy.data() == b.cloudy.data());
    CHECK(a.prior.data() == b.prior.data());
    CHECK(a.reference.data() == b.reference.data());
    CHECK(a.light.values == b.light.values);
}

TEST_CASE("generate_scene honors the thick-core fraction") {
    SynthConfig none;
    none.seed = 7;
    none.size = 64;
    none.thick_core_fraction = 0.0;
    SceneTruth clear = generate_scene(none);
    double mn = 1.0;
    for (double v : clear.transmission.data()) mn = std::min(mn, v);
    CHECK(mn > 0.02);

    SynthConfig thick;
    thick.seed = 7;
    thick.size = 128;
    thick.thick_core_fraction = 0.2;
    SceneTruth scene = generate_scene(thick);
    std::size_t below = 0;
    for (double v : scene.transmission.data()) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        if (v < 0.02) ++below;
    }
    const double frac = static_cast<double>(below) / static_cast<double>(scene.transmission.size());
    CHECK(frac >= 0.15);
    CHECK(frac <= 0.3);
}

TEST_CASE("generated cloudy image equals the forward model by construction") {
    SynthConfig cfg;
    cfg.seed = 3;
    cfg.size = 64;
    cfg.thick_core_fraction = 0.1;
    SceneTruth scene = generate_scene(cfg);
    Raster rebuilt = forward_degrade(scene.surface, scene.transmission, scene.light);
    CHECK(scene.cloudy.data() == rebuilt.data());
}

TEST_CASE("generate_scene config validation") {
    SynthConfig bad;
    bad.size = 8;
    CHECK_THROWS_AS(generate_scene(bad), std::invalid_argument);
    SynthConfig frac;
    frac.thick_core_fraction = 0.7;
    frac.thin_fraction = 0.7;
    CHECK_THROWS_AS(generate_scene(frac), std::invalid_argument);
}

TEST_CASE("prior hallucinations concentrate in thick cores") {
    SynthConfig cfg;
    cfg.seed = 5;
    cfg.size = 128;
    cfg.thick_core_fraction = 0.15;
    cfg.hallucination_hf_gain = 1.0;
    SceneTruth scene = generate_scene(cfg);
    double core_dev = 0.0, clear_dev = 0.0;
    std::size_t core_n = 0, clear_n = 0;
    for (std::size_t i = 0; i < scene.transmission.size(); ++i) {
        double d = 0.0;
        for (int b = 0; b < 3; ++b) {
            d += std::abs(scene.prior[i * 3 + b] - scene.surface[i * 3 + b]);
        }
        if (scene.transmission[i] < 0.02) {
            core_dev += d;
            ++core_n;
        } else if (scene.transmission[i] > 0.9) {
            clear_dev += d;
            ++clear_n;
        }
    }
    REQUIRE(core_n > 0);
    REQUIRE(clear_n > 0);
    CHECK(core_dev / core_n > 5.0 * (clear_dev / clear_n + 1e-9));
}
