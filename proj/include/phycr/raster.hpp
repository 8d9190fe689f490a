#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace phycr {

// Policy applied to non-finite samples at construction time.
enum class NanPolicy { Reject, ClampToZero };

/// Single-channel field of dimensionless values, row-major.
class ScalarField {
public:
    ScalarField() = default;
    ScalarField(int width, int height, double fill = 0.0);
    ScalarField(int width, int height, std::vector<double> data,
                NanPolicy policy = NanPolicy::Reject);

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t size() const { return data_.size(); }

    double at(int x, int y) const { return data_[static_cast<std::size_t>(y) * width_ + x]; }
    double& at(int x, int y) { return data_[static_cast<std::size_t>(y) * width_ + x]; }
    double operator[](std::size_t i) const { return data_[i]; }
    double& operator[](std::size_t i) { return data_[i]; }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    bool same_shape(const ScalarField& other) const {
        return width_ == other.width_ && height_ == other.height_;
    }

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<double> data_;
};

/// Multi-band reflectance image in [0,1], row-major, band-interleaved:
/// sample (x, y, b) lives at ((y*width + x)*bands + b).
class Raster {
public:
    Raster() = default;
    Raster(int width, int height, int bands, double fill = 0.0);
    Raster(int width, int height, int bands, std::vector<double> data,
           NanPolicy policy = NanPolicy::Reject);

    int width() const { return width_; }
    int height() const { return height_; }
    int bands() const { return bands_; }
    std::size_t size() const { return data_.size(); }
    std::size_t pixels() const { return static_cast<std::size_t>(width_) * height_; }

    double at(int x, int y, int b) const {
        return data_[(static_cast<std::size_t>(y) * width_ + x) * bands_ + b];
    }
    double& at(int x, int y, int b) {
        return data_[(static_cast<std::size_t>(y) * width_ + x) * bands_ + b];
    }
    double operator[](std::size_t i) const { return data_[i]; }
    double& operator[](std::size_t i) { return data_[i]; }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    bool same_shape(const Raster& other) const {
        return width_ == other.width_ && height_ == other.height_ && bands_ == other.bands_;
    }

    /// Extracts one band as a ScalarField.
    ScalarField band(int b) const;

private:
    int width_ = 0;
    int height_ = 0;
    int bands_ = 0;
    std::vector<double> data_;
};

/// Global atmospheric light, one value per band, each in [0,1].
struct AtmosphericLight {
    std::vector<double> values;

    AtmosphericLight() = default;
    explicit AtmosphericLight(std::vector<double> v);

    int bands() const { return static_cast<int>(values.size()); }
    double operator[](int b) const { return values[static_cast<std::size_t>(b)]; }
};

/// Per-pixel maximum over bands (HSV value convention).
ScalarField brightness(const Raster& img);

/// Per-pixel (max - min) / max over bands; 0 where max < delta (dark-pixel guard)
/// and identically 0 for single-band rasters.
ScalarField saturation(const Raster& img, double delta = 1e-6);

/// Nearest-rank percentile with lower interpolation: value at sorted index
/// ceil(p * (N - 1)). p = 0 gives the minimum, p = 1 the maximum.
double percentile(const ScalarField& field, double p);
double percentile(const std::vector<double>& values, double p);

}  // namespace phycr
