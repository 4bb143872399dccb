#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "skelevo/pixel.hpp"
#include "skelevo/skeletonize.hpp"

namespace testing {

using skelevo::Pixel;
using skelevo::PixelSet;

inline PixelSet make_set(std::vector<Pixel> pts, int w = 64, int h = 64, int index = 0) {
    return PixelSet::from_unsorted(w, h, std::move(pts), index);
}

/// Rows of '#' (foreground) and '.' (background).
inline PixelSet from_art(const std::vector<std::string>& rows, int index = 0) {
    std::vector<Pixel> pts;
    for (std::size_t y = 0; y < rows.size(); ++y) {
        for (std::size_t x = 0; x < rows[y].size(); ++x) {
            if (rows[y][x] == '#') pts.push_back({static_cast<int>(x), static_cast<int>(y)});
        }
    }
    return make_set(std::move(pts), static_cast<int>(rows.empty() ? 0 : rows[0].size()),
                    static_cast<int>(rows.size()), index);
}

inline std::vector<Pixel> to_vector(const PixelSet& s) { return {s.pixels().begin(), s.pixels().end()}; }

inline PixelSet random_set(std::mt19937_64& rng, int w, int h, int count, int index = 0) {
    std::vector<Pixel> pts;
    for (int i = 0; i < count; ++i) {
        pts.push_back({static_cast<int>(rng() % static_cast<unsigned>(w)), static_cast<int>(rng() % static_cast<unsigned>(h))});
    }
    return make_set(std::move(pts), w, h, index);
}

/// Random blobby mask: a few filled rectangles and disks plus salt noise.
inline oracle::Grid random_grid(std::mt19937_64& rng, int w, int h) {
    oracle::Grid g(static_cast<std::size_t>(h), std::vector<int>(static_cast<std::size_t>(w), 0));
    auto r = [&](int n) { return static_cast<int>(rng() % static_cast<unsigned>(std::max(n, 1))); };
    const int shapes = 1 + r(6);
    for (int s = 0; s < shapes; ++s) {
        const int cx = r(w), cy = r(h), rx = 1 + r(w / 3 + 1), ry = 1 + r(h / 3 + 1);
        const bool disk = r(2) == 0;
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                const bool in = disk ? (x - cx) * (x - cx) * ry * ry + (y - cy) * (y - cy) * rx * rx <= rx * rx * ry * ry
                                     : std::abs(x - cx) <= rx && std::abs(y - cy) <= ry;
                if (in) g[static_cast<std::size_t>(y)][static_cast<std::size_t>(x)] = 1;
            }
        }
    }
    const int salt = r(w * h / 20 + 1);
    for (int i = 0; i < salt; ++i) g[static_cast<std::size_t>(r(h))][static_cast<std::size_t>(r(w))] = 1;
    return g;
}

inline skelevo::BinaryMask to_mask(const oracle::Grid& g) {
    const int h = static_cast<int>(g.size());
    const int w = h ? static_cast<int>(g[0].size()) : 0;
    skelevo::BinaryMask m(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) m.set(x, y, g[static_cast<std::size_t>(y)][static_cast<std::size_t>(x)] != 0);
    }
    return m;
}

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("skelevo_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

/// Relative path -> contents for every regular file below root.
inline std::vector<std::pair<std::string, std::string>> tree_contents(const std::filesystem::path& root,
                                                                      const std::set<std::string>& skip = {}) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& e : std::filesystem::recursive_directory_iterator(root)) {
        if (!e.is_regular_file()) continue;
        const std::string rel = std::filesystem::relative(e.path(), root).generic_string();
        if (skip.contains(rel)) continue;
        out.emplace_back(rel, slurp(e.path()));
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace testing
