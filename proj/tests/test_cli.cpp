#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "oracles.hpp"
#include "phycr/image_io.hpp"
#include "phycr/metrics.hpp"
#include "phycr/raster.hpp"
#include "phycr/restore.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int run_cli(const std::string& args) {
    const std::string cmd = std::string(PHYCR_BIN) + " " + args + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::vector<std::uint8_t> slurp(const fs::path& p) { return phycr::io::read_file(p); }

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("synth is deterministic and emits consistent planes") {
    const fs::path a = fresh_dir("phycr_cli_synth_a");
    const fs::path b = fresh_dir("phycr_cli_synth_b");
    const std::string args = "synth --seed 7 --size 64 --thick-core-fraction 0.1 --out ";
    REQUIRE(run_cli(args + a.string()) == 0);
    REQUIRE(run_cli(args + b.string()) == 0);

    for (const char* name : {"surface.tif", "t.tif", "cloudy.tif", "prior.tif",
                             "reference.tif", "airlight.json", "synth_config.json"}) {
        CHECK(slurp(a / name) == slurp(b / name));
    }

    const phycr::Raster surface = phycr::io::read_image(a / "surface.tif");
    const phycr::Raster cloudy = phycr::io::read_image(a / "cloudy.tif");
    const phycr::ScalarField t = phycr::io::read_field(a / "t.tif");
    CHECK(surface.width() == cloudy.width());
    CHECK(surface.width() == t.width());
    CHECK(surface.height() == t.height());
}

TEST_CASE("synth honors the thick-core fraction on disk") {
    const fs::path dir = fresh_dir("phycr_cli_synth_thick");
    REQUIRE(run_cli("synth --seed 3 --size 128 --thick-core-fraction 0.2 --out " + dir.string()) == 0);
    const phycr::ScalarField t = phycr::io::read_field(dir / "t.tif");
    std::size_t below = 0;
    for (double v : t.data()) {
        if (v < 0.02) ++below;
    }
    CHECK(static_cast<double>(below) / static_cast<double>(t.size()) >= 0.15);
}

TEST_CASE("synth rejects invalid configs with exit 2") {
    const fs::path dir = fresh_dir("phycr_cli_synth_bad");
    CHECK(run_cli("synth --seed 1 --size 8 --out " + dir.string()) == 2);
    CHECK(run_cli("synth --thick-core-fraction 0.9 --thin-fraction 0.9 --out " + dir.string()) == 2);
}

TEST_CASE("run produces final image and metrics") {
    const fs::path scene = fresh_dir("phycr_cli_scene");
    REQUIRE(run_cli("synth --seed 5 --size 64 --thick-core-fraction 0.1 "
                    "--hallucination-amplitude 0.08 --out " + scene.string()) == 0);

    const fs::path out = fresh_dir("phycr_cli_run");
    const std::string base_args =
        "run --cloudy " + (scene / "cloudy.tif").string() +
        " --prior " + (scene / "prior.tif").string() +
        " --ref " + (scene / "reference.tif").string() +
        " --truth " + (scene / "surface.tif").string() +
        " --dump-intermediates --out ";
    REQUIRE(run_cli(base_args + out.string()) == 0);

    CHECK(fs::exists(out / "final.tif"));
    for (const char* name : {"j_vlm.tif", "airlight.json", "t.tif", "u.tif",
                             "j_phy.tif", "j_cog.tif", "omega.tif", "manifest.json"}) {
        CHECK(fs::exists(out / name));
    }

    json metrics = json::parse(std::ifstream(out / "metrics.json"));
    CHECK(metrics.contains("psnr_db"));
    CHECK(metrics.contains("ssim"));
    CHECK(metrics.contains("per_band_psnr"));
    CHECK(metrics["mode"] == "fused");

    SUBCASE("identical runs are byte-identical") {
        const fs::path out2 = fresh_dir("phycr_cli_run2");
        REQUIRE(run_cli(base_args + out2.string()) == 0);
        for (const auto& entry : fs::directory_iterator(out)) {
            CHECK(slurp(entry.path()) == slurp(out2 / entry.path().filename()));
        }
    }

    SUBCASE("restoring from the dumped intermediates reproduces final") {
        const phycr::Raster cloudy = phycr::io::read_image(scene / "cloudy.tif");
        const phycr::Raster prior = phycr::io::read_image(out / "j_vlm.tif");
        const phycr::Raster reference = phycr::io::read_image(scene / "reference.tif");
        const phycr::ScalarField t = phycr::io::read_field(out / "t.tif");
        const phycr::ScalarField u = phycr::io::read_field(out / "u.tif");
        json air = json::parse(std::ifstream(out / "airlight.json"));
        phycr::AtmosphericLight light(air["values"].get<std::vector<double>>());

        phycr::FilterParams fcfg;
        phycr::RestoreConfig rcfg;
        const phycr::Raster j_phy = phycr::invert_scattering(cloudy, t, light, rcfg);
        const phycr::Raster j_cog = phycr::cognitive_adjust(j_phy, prior, cloudy, t, u, fcfg, rcfg);
        const phycr::ScalarField omega = phycr::visibility_weight(t, rcfg);
        const phycr::AlignResult align = phycr::align_reference(reference, j_cog, omega, rcfg);
        const phycr::Raster final_img = phycr::fuse(j_cog, align.aligned, omega);

        const phycr::Raster dumped_final = phycr::io::read_image(out / "final.tif");
        CHECK(oracles::max_abs_diff(final_img, dumped_final) <= 1.0 / 65535.0);
    }
}

TEST_CASE("reference-free run matches the library call") {
    const fs::path scene = fresh_dir("phycr_cli_scene_nr");
    REQUIRE(run_cli("synth --seed 9 --size 64 --thick-core-fraction 0 --out " + scene.string()) == 0);

    const fs::path out = fresh_dir("phycr_cli_run_nr");
    REQUIRE(run_cli("run --cloudy " + (scene / "cloudy.tif").string() +
                    " --prior " + (scene / "prior.tif").string() +
                    " --out " + out.string()) == 0);

    json manifest = json::parse(std::ifstream(out / "manifest.json"));
    CHECK(manifest["mode"]["reference_free"] == true);

    const phycr::Raster cloudy = phycr::io::read_image(scene / "cloudy.tif");
    const phycr::Raster prior = phycr::io::read_image(scene / "prior.tif");
    phycr::FilterParams fcfg;
    phycr::ExtractionConfig ecfg;
    phycr::RestoreConfig rcfg;
    const phycr::RestorationBundle bundle =
        phycr::run_pipeline(cloudy, prior, phycr::Raster(), fcfg, ecfg, rcfg, false);
    const phycr::Raster final_img = phycr::io::read_image(out / "final.tif");
    // float32 serialization tolerance
    CHECK(oracles::max_abs_diff(bundle.final, final_img) <= 1e-6);
}

TEST_CASE("run error paths") {
    const fs::path out = fresh_dir("phycr_cli_run_err");
    CHECK(run_cli("run --cloudy /nonexistent/cloudy.tif --prior /nonexistent/prior.tif --out " +
                  out.string()) == 1);

    const fs::path scene = fresh_dir("phycr_cli_scene_err");
    REQUIRE(run_cli("synth --seed 2 --size 64 --out " + scene.string()) == 0);
    const fs::path badcfg = out / "bad.cfg";
    std::ofstream(badcfg) << "[filters]\nbase_radius = nope\n";
    CHECK(run_cli("run --cloudy " + (scene / "cloudy.tif").string() +
                  " --prior " + (scene / "prior.tif").string() +
                  " --config " + badcfg.string() +
                  " --out " + out.string()) == 2);
}

TEST_CASE("eval scores pairs and aggregates") {
    const fs::path scene = fresh_dir("phycr_cli_scene_eval");
    REQUIRE(run_cli("synth --seed 6 --size 64 --out " + scene.string()) == 0);

    const fs::path out = fresh_dir("phycr_cli_eval");
    const std::string self_pair =
        (scene / "surface.tif").string() + ":" + (scene / "surface.tif").string();
    const std::string other_pair =
        (scene / "cloudy.tif").string() + ":" + (scene / "surface.tif").string();
    REQUIRE(run_cli("eval --pairs " + self_pair + " " + other_pair + " --out " + out.string()) == 0);

    json report = json::parse(std::ifstream(out / "eval.json"));
    REQUIRE(report["scenes"].size() == 2);
    CHECK(report["scenes"][0]["psnr_db"] == 99.0);
    CHECK(report["scenes"][0]["ssim"] == 1.0);
    CHECK(report.contains("mean"));
    for (const auto& row : report["scenes"]) {
        CHECK(row.contains("scene"));
        CHECK(row.contains("psnr_db"));
        CHECK(row.contains("ssim"));
        CHECK(row.contains("per_band_psnr"));
        CHECK(row.contains("mode"));
    }
    CHECK(fs::exists(out / "eval.txt"));

    CHECK(run_cli("eval --pairs /nope.tif:/nope2.tif --out " + out.string()) == 1);
}
