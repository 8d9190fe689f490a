// phycr: unified all-cloud removal for multispectral imagery.
//
// Subcommands:
//   run    restore a cloudy scene from a VLM candidate and optional reference
//   synth  emit a seeded synthetic scene with full ground truth
//   eval   score result/truth pairs (PSNR, SSIM) as JSON and a text table

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "phycr/config.hpp"
#include "phycr/image_io.hpp"
#include "phycr/metrics.hpp"
#include "phycr/prior_source.hpp"
#include "phycr/restore.hpp"
#include "phycr/scattering.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

class StageTimer {
public:
    explicit StageTimer(ordered_json& sink) : sink_(sink) {}

    template <typename F>
    auto time(const std::string& name, F&& f) {
        const auto start = std::chrono::steady_clock::now();
        if constexpr (std::is_void_v<decltype(f())>) {
            f();
            record(name, start);
        } else {
            auto result = f();
            record(name, start);
            return result;
        }
    }

private:
    void record(const std::string& name, std::chrono::steady_clock::time_point start) {
        const auto ms = std::chrono::duration<double, std::milli>(
                            std::chrono::steady_clock::now() - start)
                            .count();
        sink_[name] = ms;
    }
    ordered_json& sink_;
};

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << text;
}

ordered_json metrics_json(const std::string& scene, const phycr::QualityReport& report,
                          const std::string& mode) {
    ordered_json j;
    j["scene"] = scene;
    j["psnr_db"] = report.psnr_db;
    j["ssim"] = report.ssim;
    j["per_band_psnr"] = report.per_band_psnr;
    j["mode"] = mode;
    return j;
}

int cmd_run(const std::string& cloudy_path, const std::string& prior_path,
            const std::string& prior_url, const std::string& ref_path,
            const std::string& config_path, const std::string& out_dir,
            const std::string& truth_path, bool dump_intermediates) {
    phycr::PipelineConfig cfg;
    if (!config_path.empty()) cfg = phycr::load_config(config_path);

    fs::create_directories(out_dir);
    const fs::path out(out_dir);

    ordered_json timings;
    StageTimer timer(timings);

    const phycr::Raster cloudy = timer.time("load_cloudy", [&] {
        return phycr::io::read_image(cloudy_path);
    });

    phycr::PriorSpec spec;
    if (!prior_url.empty()) {
        spec.mode = phycr::PriorSpec::Mode::Remote;
        spec.endpoint = prior_url;
        spec.prompt = cfg.prior_prompt;
        spec.timeout_seconds = cfg.prior_timeout_seconds;
        if (const char* token = std::getenv("PHYCR_PRIOR_TOKEN")) spec.auth_token = token;
    } else {
        spec.mode = phycr::PriorSpec::Mode::File;
        spec.path = prior_path;
    }
    const phycr::Raster prior = timer.time("acquire_prior", [&] {
        return phycr::acquire_prior(spec, cloudy);
    });

    const bool has_reference = !ref_path.empty();
    phycr::Raster reference;
    if (has_reference) {
        reference = timer.time("load_reference", [&] { return phycr::io::read_image(ref_path); });
    }

    const phycr::RestorationBundle bundle = timer.time("pipeline", [&] {
        return phycr::run_pipeline(cloudy, prior, reference, cfg.filters, cfg.extraction,
                                   cfg.restore, has_reference);
    });

    timer.time("write_outputs", [&] {
        phycr::io::write_image(out / "final.tif", bundle.final);
        if (dump_intermediates) {
            phycr::io::write_image(out / "j_vlm.tif", prior);
            phycr::io::write_field(out / "t.tif", bundle.estimate.transmission);
            phycr::io::write_field(out / "u.tif", bundle.estimate.confidence);
            phycr::io::write_image(out / "j_phy.tif", bundle.j_phy);
            phycr::io::write_image(out / "j_cog.tif", bundle.j_cog);
            phycr::io::write_field(out / "omega.tif", bundle.omega);
            ordered_json air;
            air["values"] = bundle.estimate.light.values;
            air["fallback"] = bundle.estimate.airlight_fallback;
            write_text(out / "airlight.json", air.dump(2) + "\n");
        }
        write_text(out / "config_used.txt", phycr::dump_config(cfg));
    });

    const std::string mode = bundle.reference_free ? "reference-free" : "fused";
    if (!truth_path.empty()) {
        const phycr::Raster truth = phycr::io::read_image(truth_path);
        const phycr::QualityReport report = phycr::evaluate(bundle.final, truth);
        write_text(out / "metrics.json",
                   metrics_json(fs::path(cloudy_path).stem().string(), report, mode).dump(2) + "\n");
    }

    // Manifest: everything that determines the run. Timings go to stderr so
    // output files stay byte-identical across identical runs.
    ordered_json manifest;
    manifest["inputs"] = {{"cloudy", cloudy_path},
                          {"prior", prior_url.empty() ? prior_path : prior_url},
                          {"reference", ref_path},
                          {"truth", truth_path}};
    manifest["config_path"] = config_path;
    manifest["dump_intermediates"] = dump_intermediates;
    manifest["mode"] = {{"reference_free", bundle.reference_free},
                        {"remote_prior", !prior_url.empty()},
                        {"airlight_fallback", bundle.estimate.airlight_fallback},
                        {"align_fallback", bundle.align_fallback}};
    manifest["input_scale"] = "integer samples rescaled by 1/(2^depth - 1); float TIFF unscaled";
    write_text(out / "manifest.json", manifest.dump(2) + "\n");
    std::cerr << "timings_ms " << timings.dump() << "\n";
    return kExitOk;
}

int cmd_synth(const phycr::SynthConfig& cfg, const std::string& out_dir) {
    fs::create_directories(out_dir);
    const fs::path out(out_dir);
    const phycr::SceneTruth scene = phycr::generate_scene(cfg);

    phycr::io::write_image(out / "surface.tif", scene.surface);
    phycr::io::write_field(out / "t.tif", scene.transmission);
    phycr::io::write_image(out / "cloudy.tif", scene.cloudy);
    phycr::io::write_image(out / "prior.tif", scene.prior);
    phycr::io::write_image(out / "reference.tif", scene.reference);

    ordered_json air;
    air["values"] = scene.light.values;
    write_text(out / "airlight.json", air.dump(2) + "\n");

    ordered_json used;
    used["seed"] = cfg.seed;
    used["size"] = cfg.size;
    used["bands"] = cfg.bands;
    used["thick_core_fraction"] = cfg.thick_core_fraction;
    used["thin_fraction"] = cfg.thin_fraction;
    used["hallucination_amplitude"] = cfg.hallucination_amplitude;
    used["hallucination_hf_gain"] = cfg.hallucination_hf_gain;
    used["ref_gain"] = cfg.ref_gain;
    used["ref_offset"] = cfg.ref_offset;
    write_text(out / "synth_config.json", used.dump(2) + "\n");
    return kExitOk;
}

int cmd_eval(const std::vector<std::string>& pairs, const std::string& out_dir) {
    fs::create_directories(out_dir);
    ordered_json rows = ordered_json::array();
    double sum_psnr = 0.0, sum_ssim = 0.0;

    std::ostringstream table;
    table << std::left;
    table << "Scene                PSNR      SSIM\n";
    table.setf(std::ios::fixed);
    table.precision(3);

    for (const std::string& pair : pairs) {
        const auto colon = pair.find(':');
        if (colon == std::string::npos) {
            throw std::runtime_error("pair '" + pair + "' is not result:truth");
        }
        const std::string result_path = pair.substr(0, colon);
        const std::string truth_path = pair.substr(colon + 1);
        const phycr::Raster result = phycr::io::read_image(result_path);
        const phycr::Raster truth = phycr::io::read_image(truth_path);
        const phycr::QualityReport report = phycr::evaluate(result, truth);
        const std::string scene = fs::path(result_path).parent_path().filename().string().empty()
            ? fs::path(result_path).stem().string()
            : fs::path(result_path).parent_path().filename().string();
        rows.push_back(metrics_json(scene, report, "eval"));
        sum_psnr += report.psnr_db;
        sum_ssim += report.ssim;
        table << std::setw(20) << scene << " " << std::setw(9) << report.psnr_db
              << " " << report.ssim << "\n";
    }
    const double n = static_cast<double>(pairs.size());
    ordered_json summary;
    summary["scenes"] = rows;
    summary["mean"] = {{"psnr_db", sum_psnr / n}, {"ssim", sum_ssim / n}};
    table << std::setw(20) << "mean" << " " << std::setw(9) << (sum_psnr / n)
          << " " << (sum_ssim / n) << "\n";

    write_text(fs::path(out_dir) / "eval.json", summary.dump(2) + "\n");
    write_text(fs::path(out_dir) / "eval.txt", table.str());
    std::cout << table.str();
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"phycr: physics-guided all-cloud removal"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "restore a cloudy scene");
    std::string cloudy_path, prior_path, prior_url, ref_path, config_path, out_dir, truth_path;
    bool dump_intermediates = false;
    run->add_option("--cloudy", cloudy_path, "cloudy input image")->required();
    auto* prior_file_opt = run->add_option("--prior", prior_path, "prior candidate image file");
    auto* prior_url_opt = run->add_option("--prior-url", prior_url, "remote prior endpoint URL");
    prior_file_opt->excludes(prior_url_opt);
    run->add_option("--ref", ref_path, "temporal reference image (omit for reference-free mode)");
    run->add_option("--config", config_path, "pipeline config file");
    run->add_option("--out", out_dir, "output directory")->required();
    run->add_option("--truth", truth_path, "ground truth for metrics.json");
    run->add_flag("--dump-intermediates", dump_intermediates, "write every pipeline intermediate");

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic scene with ground truth");
    phycr::SynthConfig scfg;
    std::string synth_out;
    synth->add_option("--seed", scfg.seed, "RNG seed");
    synth->add_option("--size", scfg.size, "scene width/height in pixels");
    synth->add_option("--bands", scfg.bands, "band count");
    synth->add_option("--thick-core-fraction", scfg.thick_core_fraction,
                      "target fraction of pixels with t < 0.02");
    synth->add_option("--thin-fraction", scfg.thin_fraction, "approximate thin-cloud fraction");
    synth->add_option("--hallucination-amplitude", scfg.hallucination_amplitude,
                      "low-frequency cast amplitude in the prior");
    synth->add_option("--hallucination-hf-gain", scfg.hallucination_hf_gain,
                      "spurious texture gain inside thick cores");
    synth->add_option("--ref-gain", scfg.ref_gain, "reference affine gain");
    synth->add_option("--ref-offset", scfg.ref_offset, "reference affine offset");
    synth->add_option("--out", synth_out, "output directory")->required();

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "score result:truth pairs");
    std::vector<std::string> pairs;
    std::string eval_out;
    eval_cmd->add_option("--pairs", pairs, "result:truth path pairs")->required();
    eval_cmd->add_option("--out", eval_out, "output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            if (prior_path.empty() && prior_url.empty()) {
                std::cerr << "error: one of --prior / --prior-url is required\n";
                return kExitRuntime;
            }
            return cmd_run(cloudy_path, prior_path, prior_url, ref_path, config_path, out_dir,
                           truth_path, dump_intermediates);
        }
        if (synth->parsed()) {
            try {
                scfg.validate();
            } catch (const std::invalid_argument& e) {
                std::cerr << "error: " << e.what() << "\n";
                return kExitConfig;
            }
            return cmd_synth(scfg, synth_out);
        }
        if (eval_cmd->parsed()) {
            return cmd_eval(pairs, eval_out);
        }
    } catch (const phycr::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitRuntime;
}
