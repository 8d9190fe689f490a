#include "phycr/prior_source.hpp"

#include <algorithm>
#include <filesystem>

#include <httplib.h>

#include "phycr/image_io.hpp"

namespace phycr {

void PriorSpec::validate() const {
    if (mode == Mode::File) {
        if (path.empty()) throw std::invalid_argument("PriorSpec: file mode needs a path");
        if (!endpoint.empty()) throw std::invalid_argument("PriorSpec: file mode must not set an endpoint");
    } else {
        if (endpoint.empty()) throw std::invalid_argument("PriorSpec: remote mode needs an endpoint");
        if (!path.empty()) throw std::invalid_argument("PriorSpec: remote mode must not set a path");
    }
    if (timeout_seconds <= 0.0) throw std::invalid_argument("PriorSpec: timeout must be > 0");
}

namespace {

Raster clamp_unit(Raster img) {
    for (std::size_t i = 0; i < img.size(); ++i) img[i] = std::clamp(img[i], 0.0, 1.0);
    return img;
}

// Splits http://host[:port]/path into a httplib base and request path.
std::pair<std::string, std::string> split_endpoint(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw PriorError("prior endpoint is not a URL: " + url);
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

Raster fetch_remote(const PriorSpec& spec, const Raster& cloudy) {
    const auto [base, request_path] = split_endpoint(spec.endpoint);
    httplib::Client client(base);
    const auto secs = static_cast<time_t>(spec.timeout_seconds);
    const auto usecs = static_cast<time_t>((spec.timeout_seconds - static_cast<double>(secs)) * 1e6);
    client.set_connection_timeout(secs, usecs);
    client.set_read_timeout(secs, usecs);
    client.set_write_timeout(secs, usecs);
    if (!spec.auth_token.empty()) client.set_bearer_token_auth(spec.auth_token);

    const auto png = io::encode_png(cloudy, 16);
    httplib::MultipartFormDataItems items{
        {"image", std::string(png.begin(), png.end()), "image.png", "image/png"},
        {"prompt", spec.prompt, "", "text/plain"},
    };
    auto res = client.Post(request_path, items);
    if (!res) {
        throw PriorError("prior endpoint unreachable: " + spec.endpoint + " (" +
                         httplib::to_string(res.error()) + ")");
    }
    if (res->status < 200 || res->status >= 300) {
        throw PriorError("prior endpoint returned HTTP " + std::to_string(res->status) +
                         " for " + spec.endpoint);
    }

    std::vector<std::uint8_t> payload(res->body.begin(), res->body.end());
    Raster img = [&] {
        try {
            if (payload.size() >= 4 && (payload[0] == 'I' || payload[0] == 'M')) {
                return io::decode_tiff(payload);
            }
            return io::decode_png(payload);
        } catch (const io::IoError& e) {
            throw PriorError(std::string("undecodable prior payload: ") + e.what());
        }
    }();

    if (img.width() != cloudy.width() || img.height() != cloudy.height()) {
        img = io::resample_bilinear(img, cloudy.width(), cloudy.height());
    }
    return img;
}

}  // namespace

Raster acquire_prior(const PriorSpec& spec, const Raster& cloudy) {
    spec.validate();

    Raster img = [&] {
        if (spec.mode == PriorSpec::Mode::File) {
            if (!std::filesystem::exists(spec.path)) {
                throw PriorError("prior file not found: " + spec.path);
            }
            try {
                return io::read_image(spec.path);
            } catch (const io::IoError& e) {
                throw PriorError(std::string("undecodable prior file: ") + e.what());
            }
        }
        return fetch_remote(spec, cloudy);
    }();

    if (img.width() != cloudy.width() || img.height() != cloudy.height()) {
        throw PriorError("prior dimensions do not match the cloudy image");
    }
    if (img.bands() != cloudy.bands()) {
        throw PriorError("prior band count (" + std::to_string(img.bands()) +
                         ") does not match the cloudy image (" +
                         std::to_string(cloudy.bands()) + ")");
    }
    return clamp_unit(std::move(img));
}

}  // namespace phycr
