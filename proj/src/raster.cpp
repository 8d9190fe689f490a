#include "phycr/raster.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace phycr {

namespace {

void sanitize(std::vector<double>& data, NanPolicy policy, const char* what) {
    for (double& v : data) {
        if (!std::isfinite(v)) {
            if (policy == NanPolicy::Reject) {
                throw std::invalid_argument(std::string(what) + ": non-finite sample");
            }
            v = 0.0;
        }
    }
}

void check_dims(int width, int height, const char* what) {
    if (width < 1 || height < 1) {
        throw std::invalid_argument(std::string(what) + ": width and height must be >= 1");
    }
}

}  // namespace

ScalarField::ScalarField(int width, int height, double fill)
    : width_(width), height_(height),
      data_(static_cast<std::size_t>(width) * height, fill) {
    check_dims(width, height, "ScalarField");
    if (!std::isfinite(fill)) throw std::invalid_argument("ScalarField: non-finite fill");
}

ScalarField::ScalarField(int width, int height, std::vector<double> data, NanPolicy policy)
    : width_(width), height_(height), data_(std::move(data)) {
    check_dims(width, height, "ScalarField");
    if (data_.size() != static_cast<std::size_t>(width) * height) {
        throw std::invalid_argument("ScalarField: data length != width * height");
    }
    sanitize(data_, policy, "ScalarField");
}

Raster::Raster(int width, int height, int bands, double fill)
    : width_(width), height_(height), bands_(bands),
      data_(static_cast<std::size_t>(width) * height * bands, fill) {
    check_dims(width, height, "Raster");
    if (bands < 1) throw std::invalid_argument("Raster: bands must be >= 1");
    if (!std::isfinite(fill)) throw std::invalid_argument("Raster: non-finite fill");
}

Raster::Raster(int width, int height, int bands, std::vector<double> data, NanPolicy policy)
    : width_(width), height_(height), bands_(bands), data_(std::move(data)) {
    check_dims(width, height, "Raster");
    if (bands < 1) throw std::invalid_argument("Raster: bands must be >= 1");
    if (data_.size() != static_cast<std::size_t>(width) * height * bands) {
        throw std::invalid_argument("Raster: data length != width * height * bands");
    }
    sanitize(data_, policy, "Raster");
}

ScalarField Raster::band(int b) const {
    if (b < 0 || b >= bands_) throw std::out_of_range("Raster::band: index out of range");
    std::vector<double> out(pixels());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = data_[i * bands_ + b];
    }
    return ScalarField(width_, height_, std::move(out));
}

AtmosphericLight::AtmosphericLight(std::vector<double> v) : values(std::move(v)) {
    if (values.empty()) throw std::invalid_argument("AtmosphericLight: empty vector");
    for (double a : values) {
        if (!std::isfinite(a) || a < 0.0 || a > 1.0) {
            throw std::invalid_argument("AtmosphericLight: values must be finite and in [0,1]");
        }
    }
}

ScalarField brightness(const Raster& img) {
    ScalarField out(img.width(), img.height());
    const int c = img.bands();
    for (std::size_t i = 0; i < img.pixels(); ++i) {
        double m = img[i * c];
        for (int b = 1; b < c; ++b) m = std::max(m, img[i * c + b]);
        out[i] = m;
    }
    return out;
}

ScalarField saturation(const Raster& img, double delta) {
    ScalarField out(img.width(), img.height());
    const int c = img.bands();
    if (c == 1) return out;  // achromatic by convention
    for (std::size_t i = 0; i < img.pixels(); ++i) {
        double mx = img[i * c];
        double mn = mx;
        for (int b = 1; b < c; ++b) {
            mx = std::max(mx, img[i * c + b]);
            mn = std::min(mn, img[i * c + b]);
        }
        out[i] = (mx < delta) ? 0.0 : (mx - mn) / mx;
    }
    return out;
}

double percentile(const std::vector<double>& values, double p) {
    if (values.empty()) throw std::invalid_argument("percentile: empty data");
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("percentile: p outside [0,1]");
    std::vector<double> sorted(values);
    std::sort(sorted.begin(), sorted.end());
    const auto n = sorted.size();
    const auto rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(n - 1)));
    return sorted[std::min(rank, n - 1)];
}

double percentile(const ScalarField& field, double p) {
    return percentile(field.data(), p);
}

}  // namespace phycr
