#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "phycr/filters.hpp"
#include "phycr/param_extract.hpp"
#include "phycr/restore.hpp"

namespace phycr {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Every tunable of the pipeline in one place, loadable from a sectioned
/// key=value file so each run's constants are auditable.
struct PipelineConfig {
    FilterParams filters;
    ExtractionConfig extraction;
    RestoreConfig restore;
    std::string prior_prompt = "remove cloud";
    double prior_timeout_seconds = 60.0;

    void validate() const;
};

/// Parses the plain-text config format:
///   [filters] / [extraction] / [restore] / [prior] sections,
///   key = value lines, '#' comments, blank lines ignored.
/// Unknown sections or keys are errors so typos cannot silently fall back to
/// defaults.
PipelineConfig load_config(const std::filesystem::path& path);
PipelineConfig parse_config(const std::string& text);

/// Serializes a config back to the file format (used to record the effective
/// configuration of a run).
std::string dump_config(const PipelineConfig& cfg);

}  // namespace phycr
