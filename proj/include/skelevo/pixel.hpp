#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace skelevo {

/// Integer raster coordinate. Ordering is row-major: (y, x) lexicographic.
/// Every tie-break in the library uses this ordering.
struct Pixel {
    int x = 0;
    int y = 0;

    friend constexpr bool operator==(Pixel, Pixel) = default;
    friend constexpr std::strong_ordering operator<=>(Pixel a, Pixel b) {
        if (auto c = a.y <=> b.y; c != 0) return c;
        return a.x <=> b.x;
    }
};

/// Exact squared Euclidean distance.
constexpr std::int64_t squared_distance(Pixel a, Pixel b) {
    const std::int64_t dx = a.x - b.x;
    const std::int64_t dy = a.y - b.y;
    return dx * dx + dy * dy;
}

/// True when a and b are distinct 8-neighbors (Chebyshev distance 1).
constexpr bool are_8_neighbors(Pixel a, Pixel b) {
    const int dx = a.x > b.x ? a.x - b.x : b.x - a.x;
    const int dy = a.y > b.y ? a.y - b.y : b.y - a.y;
    return (dx | dy) != 0 && dx <= 1 && dy <= 1;
}

/// Offsets of the 8-neighborhood in row-major order.
inline constexpr Pixel kNeighborOffsets[8] = {
    {-1, -1}, {0, -1}, {1, -1}, {-1, 0}, {1, 0}, {-1, 1}, {0, 1}, {1, 1}};

/// Skeleton pixels of one time step. Pixels are kept sorted and unique, so a
/// pixel's position in `pixels()` doubles as its stable vertex id.
class PixelSet {
public:
    PixelSet() = default;

    /// Throws InputError on out-of-bounds or duplicate pixels.
    PixelSet(int width, int height, std::vector<Pixel> pixels, int index = 0);

    /// Like the constructor but silently drops duplicates.
    static PixelSet from_unsorted(int width, int height, std::vector<Pixel> pixels,
                                  int index = 0);

    int width() const { return width_; }
    int height() const { return height_; }
    int index() const { return index_; }
    void set_index(int index) { index_ = index; }

    std::size_t size() const { return pixels_.size(); }
    bool empty() const { return pixels_.empty(); }
    std::span<const Pixel> pixels() const { return pixels_; }
    Pixel operator[](std::size_t i) const { return pixels_[i]; }

    bool in_bounds(Pixel p) const {
        return p.x >= 0 && p.y >= 0 && p.x < width_ && p.y < height_;
    }
    bool contains(Pixel p) const { return find(p).has_value(); }
    /// Position of p in pixels(), if present.
    std::optional<std::size_t> find(Pixel p) const;

    friend bool operator==(const PixelSet&, const PixelSet&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    int index_ = 0;
    std::vector<Pixel> pixels_;
};

/// Dense width*height lookup from pixel to its position in a PixelSet
/// (-1 where absent). Built once per frame for O(1) neighbor queries.
class PixelLookup {
public:
    explicit PixelLookup(const PixelSet& set);

    int at(Pixel p) const {
        if (p.x < 0 || p.y < 0 || p.x >= width_ || p.y >= height_) return -1;
        return slots_[static_cast<std::size_t>(p.y) * width_ + p.x];
    }

private:
    int width_;
    int height_;
    std::vector<int> slots_;
};

}  // namespace skelevo

template <>
struct std::hash<skelevo::Pixel> {
    std::size_t operator()(skelevo::Pixel p) const noexcept {
        return std::hash<std::uint64_t>{}((static_cast<std::uint64_t>(static_cast<std::uint32_t>(p.y)) << 32) |
                                          static_cast<std::uint32_t>(p.x));
    }
};
