#pragma once

#include <string>

#include "phycr/raster.hpp"

namespace phycr {

/// Where the cloud-removal candidate comes from: a file produced offline or a
/// remote image-editing endpoint.
struct PriorSpec {
    enum class Mode { File, Remote };

    Mode mode = Mode::File;
    std::string path;                  // file mode
    std::string endpoint;              // remote mode, e.g. http://host:port/edit
    std::string prompt = "remove cloud";
    double timeout_seconds = 60.0;
    std::string auth_token;            // optional bearer token for the endpoint

    void validate() const;
};

class PriorError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Fetches the candidate raster and guarantees it matches the cloudy image's
/// pixel grid: file payloads must match exactly, remote payloads are
/// bilinearly resampled when the service returns a different size. Values are
/// clamped to [0,1]. Band-count mismatch is an error in both modes.
Raster acquire_prior(const PriorSpec& spec, const Raster& cloudy);

}  // namespace phycr
