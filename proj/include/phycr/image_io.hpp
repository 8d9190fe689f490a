#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <vector>

#include "phycr/raster.hpp"

namespace phycr::io {

/// Thrown for unreadable, undecodable or unsupported image payloads.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// PNG: 8/16-bit, 1 (gray), 3 (RGB) or 4 (RGBA) channels. Integer samples are
// rescaled to reflectance by 1/(2^depth - 1).
Raster decode_png(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> encode_png(const Raster& img, int bit_depth = 16);

// TIFF: uncompressed little-endian baseline, contiguous planar layout,
// uint8/uint16/float32 samples, any band count. Float samples pass through
// unscaled; integer samples are rescaled to [0,1].
Raster decode_tiff(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> encode_tiff_f32(const Raster& img);
std::vector<std::uint8_t> encode_tiff_u16(const Raster& img);

// File-level helpers; read_image dispatches on the magic bytes.
Raster read_image(const std::filesystem::path& path);
void write_image(const std::filesystem::path& path, const Raster& img);

ScalarField read_field(const std::filesystem::path& path);
void write_field(const std::filesystem::path& path, const ScalarField& field);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);

/// Bilinear resampling to a new pixel grid (half-pixel centers).
Raster resample_bilinear(const Raster& img, int width, int height);

}  // namespace phycr::io
