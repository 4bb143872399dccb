#include "skelevo/creation_time.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <sstream>

#include "skelevo/errors.hpp"
#include "skelevo/parallel.hpp"

namespace skelevo {

SmoothingPlacement parse_smoothing_placement(std::string_view text) {
    if (text == "inline") return SmoothingPlacement::inline_step;
    if (text == "export") return SmoothingPlacement::at_export;
    if (text == "none") return SmoothingPlacement::none;
    throw ParameterError("unknown smoothing placement '" + std::string(text) +
                         "' (expected inline, export or none)");
}

std::string_view to_string(SmoothingPlacement placement) {
    switch (placement) {
        case SmoothingPlacement::inline_step: return "inline";
        case SmoothingPlacement::at_export: return "export";
        case SmoothingPlacement::none: return "none";
    }
    return "inline";
}

CreationTimeField propagate_step(const CreationTimeField& prev, const MatchSet& m) {
    if (prev.times.size() != m.prev_size) {
        throw InputError("creation times of step " + std::to_string(prev.index) + " cover " +
                         std::to_string(prev.times.size()) + " pixels but the matches expect " +
                         std::to_string(m.prev_size));
    }
    CreationTimeField out;
    out.index = m.to_index;
    out.times.assign(m.next_size, m.to_index);
    if (m.degenerate()) return out;

    constexpr int kNone = std::numeric_limits<int>::max();
    std::vector<int> min_incoming(m.next_size, kNone);
    for (std::size_t p = 0; p < m.forward.size(); ++p) {
        int& slot = min_incoming[static_cast<std::size_t>(m.forward[p])];
        slot = std::min(slot, prev.times[p]);
    }

    for (std::size_t q = 0; q < m.next_size; ++q) {
        const int partner_time = prev.times[static_cast<std::size_t>(m.backward[q])];
        switch (m.classification[q]) {
            case PixelClass::known:
                out.times[q] = partner_time;
                break;
            case PixelClass::growth:
                out.times[q] = m.forward_in[q] == 0 ? m.to_index : partner_time;
                break;
            case PixelClass::decay:
            case PixelClass::irregular:
                out.times[q] = std::min(partner_time, min_incoming[q]);
                break;
        }
    }
    return out;
}

namespace {

void check_alignment(std::span<const PixelSet> sequence, std::span<const MatchSet> matches) {
    if (sequence.empty()) throw InputError("empty sequence");
    if (matches.size() + 1 != sequence.size()) {
        throw InputError("expected " + std::to_string(sequence.size() - 1) + " match sets for " +
                         std::to_string(sequence.size()) + " steps, got " + std::to_string(matches.size()));
    }
    for (std::size_t i = 0; i < matches.size(); ++i) {
        if (matches[i].prev_size != sequence[i].size() || matches[i].next_size != sequence[i + 1].size()) {
            throw InputError("match set " + std::to_string(i) + " does not belong to steps " +
                             std::to_string(i) + " and " + std::to_string(i + 1));
        }
    }
}

CreationTimeField initial_field(const PixelSet& first) {
    return CreationTimeField{first.index(), std::vector<int>(first.size(), 0)};
}

}  // namespace

std::vector<CreationTimeField> propagate(std::span<const PixelSet> sequence, std::span<const MatchSet> matches) {
    check_alignment(sequence, matches);
    std::vector<CreationTimeField> fields;
    fields.reserve(sequence.size());
    fields.push_back(initial_field(sequence[0]));
    for (const auto& m : matches) fields.push_back(propagate_step(fields.back(), m));
    return fields;
}

CreationTimeField smooth(const CreationTimeField& field, const SkeletonGraph& graph, const MatchSet& m) {
    CreationTimeField out = field;
    std::map<int, int> counts;
    for (std::size_t v = 0; v < m.classification.size(); ++v) {
        if (m.classification[v] != PixelClass::growth) continue;
        const auto nb = graph.neighbors(static_cast<int>(v));
        if (nb.empty()) continue;

        const int own = field.times[v];
        counts.clear();
        int differing = 0;
        for (int u : nb) {
            const int t = field.times[static_cast<std::size_t>(u)];
            ++counts[t];
            if (t != own) ++differing;
        }
        if (2 * differing <= static_cast<int>(nb.size())) continue;

        // std::map iterates ascending, so the first maximum is the smallest mode.
        int mode = own;
        int best = 0;
        for (const auto& [t, n] : counts) {
            if (n > best) {
                best = n;
                mode = t;
            }
        }
        out.times[v] = mode;
    }
    return out;
}

CreationTimes compute_creation_times(std::span<const PixelSet> sequence, std::span<const SkeletonGraph> graphs,
                                     std::span<const MatchSet> matches, SmoothingPlacement placement, int jobs) {
    check_alignment(sequence, matches);
    if (graphs.size() != sequence.size()) {
        throw InputError("expected one skeleton graph per step");
    }

    CreationTimes result;
    result.unsmoothed.reserve(sequence.size());
    result.unsmoothed.push_back(initial_field(sequence[0]));
    if (placement == SmoothingPlacement::inline_step) {
        result.final.push_back(result.unsmoothed.back());
        for (std::size_t i = 0; i < matches.size(); ++i) {
            result.unsmoothed.push_back(propagate_step(result.final.back(), matches[i]));
            result.final.push_back(smooth(result.unsmoothed.back(), graphs[i + 1], matches[i]));
        }
        return result;
    }

    for (const auto& m : matches) result.unsmoothed.push_back(propagate_step(result.unsmoothed.back(), m));
    result.final = result.unsmoothed;
    if (placement == SmoothingPlacement::at_export) {
        parallel_for(matches.size(), jobs, [&](std::size_t i) {
            result.final[i + 1] = smooth(result.unsmoothed[i + 1], graphs[i + 1], matches[i]);
        });
    }
    return result;
}

std::string creation_time_csv(const PixelSet& pixels, const CreationTimeField& field) {
    std::ostringstream out;
    out << "x,y,creation_time\n";
    for (std::size_t i = 0; i < pixels.size(); ++i) {
        out << pixels[i].x << ',' << pixels[i].y << ',' << field.times[i] << '\n';
    }
    return out.str();
}

}  // namespace skelevo
