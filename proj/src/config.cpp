#include "phycr/config.hpp"

#include <fstream>
#include <sstream>

namespace phycr {

void PipelineConfig::validate() const {
    filters.validate();
    extraction.validate();
    restore.validate();
    if (prior_timeout_seconds <= 0.0) {
        throw ConfigError("prior.timeout must be > 0");
    }
}

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("invalid numeric value for " + key + ": '" + value + "'");
    }
}

int parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const int v = std::stoi(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("invalid integer value for " + key + ": '" + value + "'");
    }
}

void apply(PipelineConfig& cfg, const std::string& section, const std::string& key,
           const std::string& value) {
    const std::string full = section + "." + key;
    if (section == "filters") {
        if (key == "base_radius") cfg.filters.base_radius = parse_int(full, value);
        else if (key == "base_eps") cfg.filters.base_eps = parse_double(full, value);
        else if (key == "lp_sigma") cfg.filters.lp_sigma = parse_double(full, value);
        else if (key == "refine_radius") cfg.filters.refine_radius = parse_int(full, value);
        else if (key == "refine_eps") cfg.filters.refine_eps = parse_double(full, value);
        else if (key == "w_floor") cfg.filters.w_floor = parse_double(full, value);
        else throw ConfigError("unknown key: " + full);
    } else if (section == "extraction") {
        if (key == "kappa_percentile") cfg.extraction.kappa_percentile = parse_double(full, value);
        else if (key == "gate_v_center") cfg.extraction.gate_v.center = parse_double(full, value);
        else if (key == "gate_v_slope") cfg.extraction.gate_v.slope = parse_double(full, value);
        else if (key == "gate_s_center") cfg.extraction.gate_s.center = parse_double(full, value);
        else if (key == "gate_s_slope") cfg.extraction.gate_s.slope = parse_double(full, value);
        else if (key == "gate_g_center") cfg.extraction.gate_g.center = parse_double(full, value);
        else if (key == "gate_g_slope") cfg.extraction.gate_g.slope = parse_double(full, value);
        else if (key == "eps_t") cfg.extraction.eps_t = parse_double(full, value);
        else if (key == "lambda_percentile") cfg.extraction.lambda_percentile = parse_double(full, value);
        else if (key == "lambda_floor") cfg.extraction.lambda_floor = parse_double(full, value);
        else if (key == "t_clamp_lo") cfg.extraction.t_clamp_lo = parse_double(full, value);
        else if (key == "t_clamp_hi") cfg.extraction.t_clamp_hi = parse_double(full, value);
        else throw ConfigError("unknown key: " + full);
    } else if (section == "restore") {
        if (key == "t0") cfg.restore.t0 = parse_double(full, value);
        else if (key == "alpha") cfg.restore.alpha = parse_double(full, value);
        else if (key == "beta") cfg.restore.beta = parse_double(full, value);
        else if (key == "gamma") cfg.restore.gamma = parse_double(full, value);
        else if (key == "align_omega_threshold") cfg.restore.align_omega_threshold = parse_double(full, value);
        else if (key == "align_min_pixels") cfg.restore.align_min_pixels = parse_int(full, value);
        else throw ConfigError("unknown key: " + full);
    } else if (section == "prior") {
        if (key == "prompt") cfg.prior_prompt = value;
        else if (key == "timeout") cfg.prior_timeout_seconds = parse_double(full, value);
        else throw ConfigError("unknown key: " + full);
    } else {
        throw ConfigError("unknown section: [" + section + "]");
    }
}

}  // namespace

PipelineConfig parse_config(const std::string& text) {
    PipelineConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError("line " + std::to_string(line_no) + ": malformed section header");
            }
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty()) {
            throw ConfigError("line " + std::to_string(line_no) + ": key outside any section");
        }
        apply(cfg, section, key, value);
    }
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file: " + path.string());
    std::ostringstream buf;
    buf << f.rdbuf();
    return parse_config(buf.str());
}

std::string dump_config(const PipelineConfig& cfg) {
    std::ostringstream out;
    out.precision(17);
    out << "[filters]\n"
        << "base_radius = " << cfg.filters.base_radius << "\n"
        << "base_eps = " << cfg.filters.base_eps << "\n"
        << "lp_sigma = " << cfg.filters.lp_sigma << "\n"
        << "refine_radius = " << cfg.filters.refine_radius << "\n"
        << "refine_eps = " << cfg.filters.refine_eps << "\n"
        << "w_floor = " << cfg.filters.w_floor << "\n\n"
        << "[extraction]\n"
        << "kappa_percentile = " << cfg.extraction.kappa_percentile << "\n"
        << "gate_v_center = " << cfg.extraction.gate_v.center << "\n"
        << "gate_v_slope = " << cfg.extraction.gate_v.slope << "\n"
        << "gate_s_center = " << cfg.extraction.gate_s.center << "\n"
        << "gate_s_slope = " << cfg.extraction.gate_s.slope << "\n"
        << "gate_g_center = " << cfg.extraction.gate_g.center << "\n"
        << "gate_g_slope = " << cfg.extraction.gate_g.slope << "\n"
        << "eps_t = " << cfg.extraction.eps_t << "\n"
        << "lambda_percentile = " << cfg.extraction.lambda_percentile << "\n"
        << "lambda_floor = " << cfg.extraction.lambda_floor << "\n"
        << "t_clamp_lo = " << cfg.extraction.t_clamp_lo << "\n"
        << "t_clamp_hi = " << cfg.extraction.t_clamp_hi << "\n\n"
        << "[restore]\n"
        << "t0 = " << cfg.restore.t0 << "\n"
        << "alpha = " << cfg.restore.alpha << "\n"
        << "beta = " << cfg.restore.beta << "\n"
        << "gamma = " << cfg.restore.gamma << "\n"
        << "align_omega_threshold = " << cfg.restore.align_omega_threshold << "\n"
        << "align_min_pixels = " << cfg.restore.align_min_pixels << "\n\n"
        << "[prior]\n"
        << "prompt = " << cfg.prior_prompt << "\n"
        << "timeout = " << cfg.prior_timeout_seconds << "\n";
    return out.str();
}

}  // namespace phycr
