#include "phycr/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

namespace phycr::io {

namespace {

// ---------------------------------------------------------------------------
// PNG via libpng with memory-buffer read/write callbacks.
// ---------------------------------------------------------------------------

struct PngReadState {
    const std::uint8_t* data;
    std::size_t size;
    std::size_t pos;
};

void png_read_cb(png_structp png, png_bytep out, png_size_t len) {
    auto* state = static_cast<PngReadState*>(png_get_io_ptr(png));
    if (state->pos + len > state->size) {
        png_error(png, "truncated PNG stream");
    }
    std::memcpy(out, state->data + state->pos, len);
    state->pos += len;
}

void png_write_cb(png_structp png, png_bytep data, png_size_t len) {
    auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
    out->insert(out->end(), data, data + len);
}

void png_flush_cb(png_structp) {}

// ---------------------------------------------------------------------------
// Minimal baseline TIFF (little-endian, uncompressed, contiguous planar).
// ---------------------------------------------------------------------------

constexpr std::uint16_t kTagWidth = 256;
constexpr std::uint16_t kTagLength = 257;
constexpr std::uint16_t kTagBitsPerSample = 258;
constexpr std::uint16_t kTagCompression = 259;
constexpr std::uint16_t kTagPhotometric = 262;
constexpr std::uint16_t kTagStripOffsets = 273;
constexpr std::uint16_t kTagSamplesPerPixel = 277;
constexpr std::uint16_t kTagRowsPerStrip = 278;
constexpr std::uint16_t kTagStripByteCounts = 279;
constexpr std::uint16_t kTagPlanarConfig = 284;
constexpr std::uint16_t kTagSampleFormat = 339;

class ByteReader {
public:
    explicit ByteReader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

    std::uint16_t u16(std::size_t at) const {
        check(at, 2);
        return static_cast<std::uint16_t>(bytes_[at] | (bytes_[at + 1] << 8));
    }
    std::uint32_t u32(std::size_t at) const {
        check(at, 4);
        return static_cast<std::uint32_t>(bytes_[at]) |
               (static_cast<std::uint32_t>(bytes_[at + 1]) << 8) |
               (static_cast<std::uint32_t>(bytes_[at + 2]) << 16) |
               (static_cast<std::uint32_t>(bytes_[at + 3]) << 24);
    }
    float f32(std::size_t at) const {
        const std::uint32_t bits = u32(at);
        float f;
        std::memcpy(&f, &bits, 4);
        return f;
    }
    std::size_t size() const { return bytes_.size(); }

private:
    void check(std::size_t at, std::size_t n) const {
        if (at + n > bytes_.size()) throw IoError("TIFF: truncated stream");
    }
    const std::vector<std::uint8_t>& bytes_;
};

struct TiffField {
    std::uint16_t type = 0;
    std::uint32_t count = 0;
    std::uint32_t value_or_offset = 0;
};

std::uint32_t field_scalar(const ByteReader& r, const TiffField& f, std::uint32_t index = 0) {
    const std::size_t type_size = (f.type == 3) ? 2 : 4;  // SHORT or LONG
    std::size_t at;
    if (f.count * type_size <= 4) {
        // Inline values: recompute from the raw offset field position is not
        // possible here, so the caller stored the absolute position instead.
        at = f.value_or_offset + index * type_size;
        // value_or_offset holds an absolute position in the inline case too
        // (set up by the parser below).
    } else {
        at = f.value_or_offset + index * type_size;
    }
    return (f.type == 3) ? r.u16(at) : r.u32(at);
}

void push_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void push_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
    out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xFF));
    out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xFF));
    out.push_back(static_cast<std::uint8_t>((v >> 24) & 0xFF));
}

struct TiffEntry {
    std::uint16_t tag;
    std::uint16_t type;  // 3 = SHORT, 4 = LONG
    std::uint32_t count;
    std::uint32_t value;  // inline value or offset
};

std::vector<std::uint8_t> encode_tiff_impl(const Raster& img, bool as_float) {
    const std::uint32_t w = static_cast<std::uint32_t>(img.width());
    const std::uint32_t h = static_cast<std::uint32_t>(img.height());
    const std::uint32_t c = static_cast<std::uint32_t>(img.bands());
    const std::uint32_t sample_bytes = as_float ? 4 : 2;
    const std::uint32_t strip_bytes = w * h * c * sample_bytes;

    std::vector<TiffEntry> entries;
    const bool inline_bits = c <= 2;
    // Layout: 8-byte header, IFD, extra arrays (BitsPerSample/SampleFormat
    // when c > 2), then pixel data.
    const std::uint32_t n_entries = 11;
    const std::uint32_t ifd_size = 2 + n_entries * 12 + 4;
    std::uint32_t extra_at = 8 + ifd_size;
    std::uint32_t bits_offset = 0, fmt_offset = 0;
    std::uint32_t extra_bytes = 0;
    if (!inline_bits) {
        bits_offset = extra_at;
        fmt_offset = extra_at + 2 * c;
        extra_bytes = 4 * c;
        if (extra_bytes % 2 != 0) ++extra_bytes;
    }
    const std::uint32_t data_offset = extra_at + extra_bytes;

    const std::uint16_t bits = static_cast<std::uint16_t>(sample_bytes * 8);
    const std::uint16_t fmt = as_float ? 3 : 1;
    entries.push_back({kTagWidth, 4, 1, w});
    entries.push_back({kTagLength, 4, 1, h});
    entries.push_back({kTagBitsPerSample, 3, c,
                       inline_bits ? (c == 1 ? bits : (bits | (static_cast<std::uint32_t>(bits) << 16)))
                                   : bits_offset});
    entries.push_back({kTagCompression, 3, 1, 1});
    entries.push_back({kTagPhotometric, 3, 1, static_cast<std::uint32_t>(c >= 3 ? 2 : 1)});
    entries.push_back({kTagStripOffsets, 4, 1, data_offset});
    entries.push_back({kTagSamplesPerPixel, 3, 1, c});
    entries.push_back({kTagRowsPerStrip, 4, 1, h});
    entries.push_back({kTagStripByteCounts, 4, 1, strip_bytes});
    entries.push_back({kTagPlanarConfig, 3, 1, 1});
    entries.push_back({kTagSampleFormat, 3, c,
                       inline_bits ? (c == 1 ? fmt : (fmt | (static_cast<std::uint32_t>(fmt) << 16)))
                                   : fmt_offset});

    std::vector<std::uint8_t> out;
    out.reserve(data_offset + strip_bytes);
    out.push_back('I');
    out.push_back('I');
    push_u16(out, 42);
    push_u32(out, 8);  // first IFD offset

    push_u16(out, static_cast<std::uint16_t>(entries.size()));
    for (const TiffEntry& e : entries) {
        push_u16(out, e.tag);
        push_u16(out, e.type);
        push_u32(out, e.count);
        push_u32(out, e.value);
    }
    push_u32(out, 0);  // no next IFD

    if (!inline_bits) {
        for (std::uint32_t i = 0; i < c; ++i) push_u16(out, bits);
        for (std::uint32_t i = 0; i < c; ++i) push_u16(out, fmt);
        while (out.size() < data_offset) out.push_back(0);
    }

    if (as_float) {
        for (std::size_t i = 0; i < img.size(); ++i) {
            const float f = static_cast<float>(img[i]);
            std::uint32_t bits32;
            std::memcpy(&bits32, &f, 4);
            push_u32(out, bits32);
        }
    } else {
        for (std::size_t i = 0; i < img.size(); ++i) {
            const double v = std::clamp(img[i], 0.0, 1.0);
            push_u16(out, static_cast<std::uint16_t>(std::lround(v * 65535.0)));
        }
    }
    return out;
}

}  // namespace

Raster decode_png(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) {
        throw IoError("PNG: bad signature");
    }
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png_create_info_struct(png);
    if (!png || !info) throw IoError("PNG: allocation failure");

    std::vector<png_bytep> row_ptrs;
    std::vector<std::uint8_t> pixels;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("PNG: decode failure");
    }

    PngReadState state{bytes.data(), bytes.size(), 0};
    png_set_read_fn(png, &state, png_read_cb);
    png_read_info(png, info);

    const png_uint_32 w = png_get_image_width(png, info);
    const png_uint_32 h = png_get_image_height(png, info);
    int depth = png_get_bit_depth(png, info);
    const int color = png_get_color_type(png, info);

    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    png_read_update_info(png, info);

    depth = png_get_bit_depth(png, info);
    const int channels = png_get_channels(png, info);
    const std::size_t row_bytes = png_get_rowbytes(png, info);

    pixels.resize(row_bytes * h);
    row_ptrs.resize(h);
    for (png_uint_32 y = 0; y < h; ++y) row_ptrs[y] = pixels.data() + y * row_bytes;
    png_read_image(png, row_ptrs.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    const double scale = (depth == 16) ? 1.0 / 65535.0 : 1.0 / 255.0;
    std::vector<double> data(static_cast<std::size_t>(w) * h * channels);
    if (depth == 16) {
        // PNG stores 16-bit samples big-endian.
        for (std::size_t i = 0; i < data.size(); ++i) {
            data[i] = scale * ((pixels[2 * i] << 8) | pixels[2 * i + 1]);
        }
    } else {
        for (std::size_t i = 0; i < data.size(); ++i) data[i] = scale * pixels[i];
    }
    return Raster(static_cast<int>(w), static_cast<int>(h), channels, std::move(data));
}

std::vector<std::uint8_t> encode_png(const Raster& img, int bit_depth) {
    if (bit_depth != 8 && bit_depth != 16) throw IoError("PNG: bit depth must be 8 or 16");
    int color;
    switch (img.bands()) {
        case 1: color = PNG_COLOR_TYPE_GRAY; break;
        case 3: color = PNG_COLOR_TYPE_RGB; break;
        case 4: color = PNG_COLOR_TYPE_RGBA; break;
        default: throw IoError("PNG: band count must be 1, 3 or 4 (use TIFF for others)");
    }

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png_create_info_struct(png);
    if (!png || !info) throw IoError("PNG: allocation failure");

    std::vector<std::uint8_t> out;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("PNG: encode failure");
    }
    png_set_write_fn(png, &out, png_write_cb, png_flush_cb);
    png_set_IHDR(png, info, static_cast<png_uint_32>(img.width()),
                 static_cast<png_uint_32>(img.height()), bit_depth, color,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    const int c = img.bands();
    const std::size_t row_samples = static_cast<std::size_t>(img.width()) * c;
    std::vector<std::uint8_t> row(row_samples * (bit_depth / 8));
    const double peak = (bit_depth == 16) ? 65535.0 : 255.0;
    for (int y = 0; y < img.height(); ++y) {
        for (std::size_t i = 0; i < row_samples; ++i) {
            const double v = std::clamp(img[static_cast<std::size_t>(y) * row_samples + i], 0.0, 1.0);
            const auto q = static_cast<std::uint32_t>(std::lround(v * peak));
            if (bit_depth == 16) {
                row[2 * i] = static_cast<std::uint8_t>(q >> 8);
                row[2 * i + 1] = static_cast<std::uint8_t>(q & 0xFF);
            } else {
                row[i] = static_cast<std::uint8_t>(q);
            }
        }
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return out;
}

Raster decode_tiff(const std::vector<std::uint8_t>& bytes) {
    ByteReader r(bytes);
    if (bytes.size() < 8) throw IoError("TIFF: truncated header");
    if (bytes[0] != 'I' || bytes[1] != 'I') {
        throw IoError("TIFF: only little-endian (II) files are supported");
    }
    if (r.u16(2) != 42) throw IoError("TIFF: bad magic");

    const std::uint32_t ifd = r.u32(4);
    const std::uint16_t n_entries = r.u16(ifd);

    std::uint32_t width = 0, height = 0, spp = 1, rows_per_strip = 0xFFFFFFFF;
    std::uint16_t compression = 1;
    TiffField bits_field, fmt_field, offsets_field, counts_field;
    std::uint16_t planar = 1;

    for (std::uint16_t i = 0; i < n_entries; ++i) {
        const std::size_t at = ifd + 2 + static_cast<std::size_t>(i) * 12;
        const std::uint16_t tag = r.u16(at);
        TiffField f;
        f.type = r.u16(at + 2);
        f.count = r.u32(at + 4);
        const std::size_t type_size = (f.type == 3) ? 2 : 4;
        // Store an absolute position whether the payload is inline or not.
        f.value_or_offset = (f.count * type_size <= 4) ? static_cast<std::uint32_t>(at + 8)
                                                       : r.u32(at + 8);
        switch (tag) {
            case kTagWidth: width = field_scalar(r, f); break;
            case kTagLength: height = field_scalar(r, f); break;
            case kTagBitsPerSample: bits_field = f; break;
            case kTagCompression: compression = static_cast<std::uint16_t>(field_scalar(r, f)); break;
            case kTagStripOffsets: offsets_field = f; break;
            case kTagSamplesPerPixel: spp = field_scalar(r, f); break;
            case kTagRowsPerStrip: rows_per_strip = field_scalar(r, f); break;
            case kTagStripByteCounts: counts_field = f; break;
            case kTagPlanarConfig: planar = static_cast<std::uint16_t>(field_scalar(r, f)); break;
            case kTagSampleFormat: fmt_field = f; break;
            default: break;
        }
    }

    if (width == 0 || height == 0) throw IoError("TIFF: missing dimensions");
    if (compression != 1) throw IoError("TIFF: only uncompressed data is supported");
    if (planar != 1) throw IoError("TIFF: only contiguous planar layout is supported");
    if (offsets_field.count == 0) throw IoError("TIFF: missing strip offsets");

    const std::uint32_t bits = bits_field.count ? field_scalar(r, bits_field) : 1;
    const std::uint32_t fmt = fmt_field.count ? field_scalar(r, fmt_field) : 1;
    if (!((bits == 8 && fmt == 1) || (bits == 16 && fmt == 1) || (bits == 32 && fmt == 3))) {
        throw IoError("TIFF: unsupported sample type (need uint8, uint16 or float32)");
    }
    const std::uint32_t sample_bytes = bits / 8;

    // Gather strip data in order.
    std::vector<std::uint8_t> strip_data;
    strip_data.reserve(static_cast<std::size_t>(width) * height * spp * sample_bytes);
    const std::uint32_t n_strips = offsets_field.count;
    for (std::uint32_t s = 0; s < n_strips; ++s) {
        const std::uint32_t off = field_scalar(r, offsets_field, s);
        const std::uint32_t cnt = counts_field.count
            ? field_scalar(r, counts_field, s)
            : static_cast<std::uint32_t>(width) * std::min(rows_per_strip, height) * spp * sample_bytes;
        if (off + cnt > bytes.size()) throw IoError("TIFF: strip out of range");
        strip_data.insert(strip_data.end(), bytes.begin() + off, bytes.begin() + off + cnt);
    }

    const std::size_t n_samples = static_cast<std::size_t>(width) * height * spp;
    if (strip_data.size() < n_samples * sample_bytes) throw IoError("TIFF: pixel data truncated");

    std::vector<double> data(n_samples);
    ByteReader sr(strip_data);
    if (bits == 8) {
        for (std::size_t i = 0; i < n_samples; ++i) data[i] = strip_data[i] / 255.0;
    } else if (bits == 16) {
        for (std::size_t i = 0; i < n_samples; ++i) data[i] = sr.u16(2 * i) / 65535.0;
    } else {
        for (std::size_t i = 0; i < n_samples; ++i) data[i] = sr.f32(4 * i);
    }
    return Raster(static_cast<int>(width), static_cast<int>(height), static_cast<int>(spp),
                  std::move(data), NanPolicy::ClampToZero);
}

std::vector<std::uint8_t> encode_tiff_f32(const Raster& img) { return encode_tiff_impl(img, true); }
std::vector<std::uint8_t> encode_tiff_u16(const Raster& img) { return encode_tiff_impl(img, false); }

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open file: " + path.string());
    return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(f),
                                     std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open file for writing: " + path.string());
    f.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
    if (!f) throw IoError("write failure: " + path.string());
}

Raster read_image(const std::filesystem::path& path) {
    const auto bytes = read_file(path);
    if (bytes.size() >= 8 && png_sig_cmp(bytes.data(), 0, 8) == 0) return decode_png(bytes);
    if (bytes.size() >= 4 && ((bytes[0] == 'I' && bytes[1] == 'I') ||
                              (bytes[0] == 'M' && bytes[1] == 'M'))) {
        return decode_tiff(bytes);
    }
    throw IoError("unrecognized image format: " + path.string());
}

void write_image(const std::filesystem::path& path, const Raster& img) {
    const auto ext = path.extension().string();
    if (ext == ".png") {
        write_file(path, encode_png(img, 16));
    } else if (ext == ".tif" || ext == ".tiff") {
        write_file(path, encode_tiff_f32(img));
    } else {
        throw IoError("unsupported output extension: " + path.string());
    }
}

ScalarField read_field(const std::filesystem::path& path) {
    const Raster img = read_image(path);
    if (img.bands() != 1) throw IoError("expected single-band image: " + path.string());
    return img.band(0);
}

void write_field(const std::filesystem::path& path, const ScalarField& field) {
    Raster img(field.width(), field.height(), 1, field.data());
    write_file(path, encode_tiff_f32(img));
}

Raster resample_bilinear(const Raster& img, int width, int height) {
    if (width < 1 || height < 1) throw std::invalid_argument("resample_bilinear: bad target size");
    if (width == img.width() && height == img.height()) return img;
    const int c = img.bands();
    Raster out(width, height, c);
    const double sx = static_cast<double>(img.width()) / width;
    const double sy = static_cast<double>(img.height()) / height;
    for (int y = 0; y < height; ++y) {
        const double fy = (y + 0.5) * sy - 0.5;
        const int y0 = std::clamp(static_cast<int>(std::floor(fy)), 0, img.height() - 1);
        const int y1 = std::min(y0 + 1, img.height() - 1);
        const double wy = std::clamp(fy - y0, 0.0, 1.0);
        for (int x = 0; x < width; ++x) {
            const double fx = (x + 0.5) * sx - 0.5;
            const int x0 = std::clamp(static_cast<int>(std::floor(fx)), 0, img.width() - 1);
            const int x1 = std::min(x0 + 1, img.width() - 1);
            const double wx = std::clamp(fx - x0, 0.0, 1.0);
            for (int b = 0; b < c; ++b) {
                const double top = (1.0 - wx) * img.at(x0, y0, b) + wx * img.at(x1, y0, b);
                const double bot = (1.0 - wx) * img.at(x0, y1, b) + wx * img.at(x1, y1, b);
                out.at(x, y, b) = (1.0 - wy) * top + wy * bot;
            }
        }
    }
    return out;
}

}  // namespace phycr::io
