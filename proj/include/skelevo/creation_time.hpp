#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "skelevo/pixel.hpp"
#include "skelevo/skeleton_graph.hpp"
#include "skelevo/temporal_match.hpp"

namespace skelevo {

/// Creation time of every pixel of one step, indexed by vertex id.
struct CreationTimeField {
    int index = 0;
    std::vector<int> times;

    friend bool operator==(const CreationTimeField&, const CreationTimeField&) = default;
};

/// Where the neighborhood mode filter sits relative to propagation.
enum class SmoothingPlacement {
    inline_step,  ///< smoothed times of step i feed step i+1 (default)
    at_export,    ///< propagate unsmoothed, smooth every step afterwards
    none,
};

SmoothingPlacement parse_smoothing_placement(std::string_view text);
std::string_view to_string(SmoothingPlacement placement);

/// Times for step i+1 given the times of step i and the matches between them.
CreationTimeField propagate_step(const CreationTimeField& prev, const MatchSet& matches);

/// Unsmoothed propagation over a whole sequence; step 0 is all zeros.
/// Throws InputError when matches do not line up with the sequence.
std::vector<CreationTimeField> propagate(std::span<const PixelSet> sequence,
                                         std::span<const MatchSet> matches);

/// One simultaneous pass of the mode filter over the growth pixels in
/// `matches`. A pixel is replaced by the mode of its skeleton neighbors'
/// times (smallest on ties) when strictly more than half of them differ.
CreationTimeField smooth(const CreationTimeField& field, const SkeletonGraph& graph,
                         const MatchSet& matches);

struct CreationTimes {
    std::vector<CreationTimeField> unsmoothed;  ///< direct propagation output per step
    std::vector<CreationTimeField> final;       ///< after the configured smoothing
};

/// Propagation with smoothing at the requested placement. `graphs` and
/// `sequence` have one entry per step, `matches` one per consecutive pair.
CreationTimes compute_creation_times(std::span<const PixelSet> sequence,
                                     std::span<const SkeletonGraph> graphs,
                                     std::span<const MatchSet> matches,
                                     SmoothingPlacement placement = SmoothingPlacement::inline_step,
                                     int jobs = 1);

/// Export, header "x,y,creation_time".
std::string creation_time_csv(const PixelSet& pixels, const CreationTimeField& field);

}  // namespace skelevo
