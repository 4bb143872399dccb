#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace skelevo {

/// One grayscale time step, row-major, values in [0, 255].
struct Frame {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> values;
    int index = 0;

    std::uint8_t at(int x, int y) const {
        return values[static_cast<std::size_t>(y) * width + x];
    }
};

struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<std::array<std::uint8_t, 3>> pixels;  // row-major

    RgbImage() = default;
    RgbImage(int w, int h, std::array<std::uint8_t, 3> fill)
        : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

    std::array<std::uint8_t, 3>& at(int x, int y) {
        return pixels[static_cast<std::size_t>(y) * width + x];
    }
    const std::array<std::uint8_t, 3>& at(int x, int y) const {
        return pixels[static_cast<std::size_t>(y) * width + x];
    }
};

/// Binary (P5) PGM with maxval <= 255. Throws InputError naming the file.
Frame read_pgm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const Frame& frame);

/// PNG of any color type; color and alpha are reduced to 8-bit gray.
Frame read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const Frame& frame);
void write_png(const std::filesystem::path& path, const RgbImage& image);
RgbImage read_png_rgb(const std::filesystem::path& path);

}  // namespace skelevo
