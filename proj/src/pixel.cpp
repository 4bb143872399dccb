#include "skelevo/pixel.hpp"

#include <algorithm>
#include <string>

#include "skelevo/errors.hpp"

namespace skelevo {

namespace {

std::string describe(Pixel p) {
    return "(" + std::to_string(p.x) + ", " + std::to_string(p.y) + ")";
}

void check_dimensions(int width, int height) {
    if (width < 0 || height < 0) {
        throw InputError("negative frame dimensions " + std::to_string(width) + "x" +
                         std::to_string(height));
    }
}

}  // namespace

PixelSet::PixelSet(int width, int height, std::vector<Pixel> pixels, int index)
    : width_(width), height_(height), index_(index), pixels_(std::move(pixels)) {
    check_dimensions(width, height);
    std::sort(pixels_.begin(), pixels_.end());
    for (std::size_t i = 0; i < pixels_.size(); ++i) {
        if (!in_bounds(pixels_[i])) {
            throw InputError("pixel " + describe(pixels_[i]) + " outside " +
                             std::to_string(width) + "x" + std::to_string(height) + " frame");
        }
        if (i > 0 && pixels_[i] == pixels_[i - 1]) {
            throw InputError("duplicate pixel " + describe(pixels_[i]));
        }
    }
}

PixelSet PixelSet::from_unsorted(int width, int height, std::vector<Pixel> pixels, int index) {
    std::sort(pixels.begin(), pixels.end());
    pixels.erase(std::unique(pixels.begin(), pixels.end()), pixels.end());
    return PixelSet(width, height, std::move(pixels), index);
}

std::optional<std::size_t> PixelSet::find(Pixel p) const {
    auto it = std::lower_bound(pixels_.begin(), pixels_.end(), p);
    if (it == pixels_.end() || *it != p) return std::nullopt;
    return static_cast<std::size_t>(it - pixels_.begin());
}

PixelLookup::PixelLookup(const PixelSet& set)
    : width_(set.width()),
      height_(set.height()),
      slots_(static_cast<std::size_t>(set.width()) * set.height(), -1) {
    const auto pixels = set.pixels();
    for (std::size_t i = 0; i < pixels.size(); ++i) {
        slots_[static_cast<std::size_t>(pixels[i].y) * width_ + pixels[i].x] = static_cast<int>(i);
    }
}

}  // namespace skelevo
