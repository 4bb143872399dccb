#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "skelevo/pixel.hpp"

namespace skelevo {

enum class PixelClass : std::uint8_t { known, growth, decay, irregular };

std::string_view to_string(PixelClass c);

/// Nearest-neighbor matches between two consecutive steps. Pixels are
/// referred to by their position in the respective PixelSet.
struct MatchSet {
    int from_index = 0;
    int to_index = 1;
    std::size_t prev_size = 0;
    std::size_t next_size = 0;
    std::vector<int> forward;    ///< prev id -> next id; empty if either side is empty
    std::vector<int> backward;   ///< next id -> prev id; empty if either side is empty
    std::vector<PixelClass> classification;  ///< per next id
    std::vector<int> forward_in;             ///< number of forward matches arriving at each next id

    bool degenerate() const { return prev_size == 0 || next_size == 0; }

    friend bool operator==(const MatchSet&, const MatchSet&) = default;
};

/// Uniform-grid bucket index answering exact nearest-neighbor queries with
/// squared integer distances. Equidistant candidates resolve to the
/// row-major smallest pixel (equivalently, the smallest id).
class GridIndex {
public:
    explicit GridIndex(const PixelSet& targets, int cell_size = 8);

    /// Id of the nearest target to q, or -1 when there are no targets.
    int nearest(Pixel q) const;

private:
    int nearest_scan(Pixel q) const;

    const PixelSet* targets_;
    int cell_size_;
    int min_x_ = 0;
    int min_y_ = 0;
    int cols_ = 0;
    int rows_ = 0;
    std::vector<int> cell_start_;
    std::vector<int> cell_items_;
};

/// Forward and backward maps plus classification. Either set may be empty,
/// producing a degenerate MatchSet in which every pixel of `next` is growth.
MatchSet match(const PixelSet& prev, const PixelSet& next);

/// Fills `classification` and `forward_in` from the forward/backward maps.
void classify(MatchSet& matches);

/// One MatchSet per consecutive pair, pairs processed on up to `jobs` threads.
/// Throws InputError for fewer than two steps.
std::vector<MatchSet> match_all(std::span<const PixelSet> sequence, int jobs = 1);

/// Debug exports.
std::string matches_csv(const PixelSet& prev, const PixelSet& next, const MatchSet& matches);
std::string classification_csv(const PixelSet& next, const MatchSet& matches);

}  // namespace skelevo
