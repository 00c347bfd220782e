#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "edgema/error.hpp"

namespace edgema {

struct Rgb {
    std::uint8_t r = 0, g = 0, b = 0;
    friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Row-major 8-bit colour raster.
class RgbFrame {
public:
    RgbFrame() = default;
    RgbFrame(int width, int height, std::vector<Rgb> pixels)
        : width_(width), height_(height), pixels_(std::move(pixels)) {
        detail::require(width > 0 && height > 0, "RgbFrame: dimensions must be positive");
        detail::require(pixels_.size() == std::size_t(width) * std::size_t(height),
                        "RgbFrame: pixel count != width*height");
    }
    RgbFrame(int width, int height, Rgb fill = {})
        : RgbFrame(width, height, std::vector<Rgb>(std::size_t(width) * std::size_t(height), fill)) {}

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::span<const Rgb> pixels() const noexcept { return pixels_; }
    Rgb& at(int row, int col) { return pixels_[std::size_t(row) * width_ + col]; }
    const Rgb& at(int row, int col) const { return pixels_[std::size_t(row) * width_ + col]; }

    friend bool operator==(const RgbFrame&, const RgbFrame&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<Rgb> pixels_;
};

/// Row-major 8-bit intensity raster. After quantization the values lie in [0, levels).
class GrayFrame {
public:
    GrayFrame() = default;
    GrayFrame(int width, int height, std::vector<std::uint8_t> intensities)
        : width_(width), height_(height), data_(std::move(intensities)) {
        detail::require(width > 0 && height > 0, "GrayFrame: dimensions must be positive");
        detail::require(data_.size() == std::size_t(width) * std::size_t(height),
                        "GrayFrame: intensity count != width*height");
    }
    GrayFrame(int width, int height, std::uint8_t fill = 0)
        : GrayFrame(width, height, std::vector<std::uint8_t>(std::size_t(width) * std::size_t(height), fill)) {}

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t size() const noexcept { return data_.size(); }
    std::span<const std::uint8_t> intensities() const noexcept { return data_; }
    std::span<std::uint8_t> intensities() noexcept { return data_; }
    std::uint8_t& at(int row, int col) { return data_[std::size_t(row) * width_ + col]; }
    std::uint8_t at(int row, int col) const { return data_[std::size_t(row) * width_ + col]; }

    friend bool operator==(const GrayFrame&, const GrayFrame&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> data_;
};

namespace detail {

// Skips whitespace and '#' comments between header tokens.
inline void skip_pnm_space(std::istream& in) {
    for (;;) {
        int c = in.peek();
        if (c == '#') {
            std::string discard;
            std::getline(in, discard);
        } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
            in.get();
        } else {
            return;
        }
    }
}

inline int read_pnm_int(std::istream& in, const std::string& path) {
    skip_pnm_space(in);
    int value = -1;
    if (!(in >> value) || value < 0) throw IoError("malformed PNM header: " + path);
    return value;
}

struct PnmHeader {
    int width, height;
};

inline PnmHeader read_pnm_header(std::istream& in, const char* magic, const std::string& path) {
    char m[2] = {};
    if (!in.read(m, 2) || m[0] != magic[0] || m[1] != magic[1])
        throw IoError(std::string("expected ") + magic + " image: " + path);
    PnmHeader h{};
    h.width = read_pnm_int(in, path);
    h.height = read_pnm_int(in, path);
    int maxval = read_pnm_int(in, path);
    if (maxval != 255) throw IoError("only 8-bit (maxval 255) images are supported: " + path);
    if (h.width <= 0 || h.height <= 0) throw IoError("empty image: " + path);
    // Exactly one whitespace byte separates the header from the raster.
    in.get();
    return h;
}

}  // namespace detail

inline GrayFrame read_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    auto h = detail::read_pnm_header(in, "P5", path.string());
    std::vector<std::uint8_t> data(std::size_t(h.width) * std::size_t(h.height));
    if (!in.read(reinterpret_cast<char*>(data.data()), std::streamsize(data.size())))
        throw IoError("truncated raster: " + path.string());
    return GrayFrame(h.width, h.height, std::move(data));
}

inline RgbFrame read_ppm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    auto h = detail::read_pnm_header(in, "P6", path.string());
    std::vector<std::uint8_t> raw(std::size_t(h.width) * std::size_t(h.height) * 3);
    if (!in.read(reinterpret_cast<char*>(raw.data()), std::streamsize(raw.size())))
        throw IoError("truncated raster: " + path.string());
    std::vector<Rgb> px(std::size_t(h.width) * std::size_t(h.height));
    for (std::size_t i = 0; i < px.size(); ++i) px[i] = {raw[3 * i], raw[3 * i + 1], raw[3 * i + 2]};
    return RgbFrame(h.width, h.height, std::move(px));
}

inline void write_pgm(const std::filesystem::path& path, const GrayFrame& frame) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << "P5\n" << frame.width() << ' ' << frame.height() << "\n255\n";
    auto px = frame.intensities();
    out.write(reinterpret_cast<const char*>(px.data()), std::streamsize(px.size()));
    if (!out) throw IoError("write failed: " + path.string());
}

inline void write_ppm(const std::filesystem::path& path, const RgbFrame& frame) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << "P6\n" << frame.width() << ' ' << frame.height() << "\n255\n";
    for (const Rgb& p : frame.pixels()) {
        const char bytes[3] = {char(p.r), char(p.g), char(p.b)};
        out.write(bytes, 3);
    }
    if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace edgema
