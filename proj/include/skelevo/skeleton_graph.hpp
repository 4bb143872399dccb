#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "skelevo/pixel.hpp"

namespace skelevo {

enum class DegreeClass : std::uint8_t {
    isolated,  ///< d = 0
    endpoint,  ///< d = 1
    regular,   ///< d = 2
    branch,    ///< d >= 3
};

std::string_view to_string(DegreeClass c);
DegreeClass classify_degree(int degree);

/// A maximal run of regular pixels plus the non-regular pixels bounding it.
///
/// Interior order starts at the row-major smaller endpoint. Pure cycles have
/// no endpoints and start at their row-major first pixel. Two adjacent
/// non-regular pixels are linked by a segment with an empty interior.
struct Segment {
    int id = 0;
    std::vector<Pixel> interior;
    std::vector<Pixel> endpoints;      ///< sorted, unique; 0, 1 or 2 entries
    std::vector<int> interior_ids;     ///< vertex ids parallel to interior
    std::vector<int> endpoint_ids;     ///< vertex ids parallel to endpoints

    bool is_cycle() const { return endpoints.empty(); }
};

/// 8-connectivity graph over one frame's skeleton pixels. Vertex ids are
/// positions in the underlying PixelSet. Immutable once built.
class SkeletonGraph {
public:
    SkeletonGraph() = default;
    explicit SkeletonGraph(PixelSet pixels);

    const PixelSet& pixels() const { return pixels_; }
    int index() const { return pixels_.index(); }
    std::size_t vertex_count() const { return pixels_.size(); }
    Pixel pixel(int v) const { return pixels_[static_cast<std::size_t>(v)]; }

    /// Vertex id of p; throws LookupError when p is not a skeleton pixel.
    int vertex(Pixel p) const;

    std::span<const int> neighbors(int v) const {
        const auto b = static_cast<std::size_t>(offsets_[static_cast<std::size_t>(v)]);
        const auto e = static_cast<std::size_t>(offsets_[static_cast<std::size_t>(v) + 1]);
        return std::span<const int>(adjacency_).subspan(b, e - b);
    }
    int degree(int v) const { return static_cast<int>(neighbors(v).size()); }
    DegreeClass degree_class(int v) const { return classes_[static_cast<std::size_t>(v)]; }

    const std::vector<Segment>& segments() const { return segments_; }

    /// Segment whose interior holds vertex v, or -1 for non-regular vertices.
    int interior_segment(int v) const { return interior_segment_[static_cast<std::size_t>(v)]; }

    /// Segments bounded by non-regular vertex v (empty for regular vertices).
    std::span<const int> incident_segments(int v) const {
        const auto b = static_cast<std::size_t>(incidence_offsets_[static_cast<std::size_t>(v)]);
        const auto e = static_cast<std::size_t>(incidence_offsets_[static_cast<std::size_t>(v) + 1]);
        return std::span<const int>(incidence_).subspan(b, e - b);
    }

    /// Every segment containing v, as interior or as bounding pixel.
    std::vector<int> segments_containing(int v) const;

private:
    void build_adjacency();
    void extract_segments();

    PixelSet pixels_;
    std::vector<int> offsets_{0};
    std::vector<int> adjacency_;
    std::vector<DegreeClass> classes_;
    std::vector<Segment> segments_;
    std::vector<int> interior_segment_;
    std::vector<int> incidence_offsets_{0};
    std::vector<int> incidence_;
};

SkeletonGraph build_graph(PixelSet pixels);

/// Pixels of degree >= 3, row-major order.
std::vector<Pixel> branch_points(const SkeletonGraph& graph);

/// Segment whose interior contains p, or nullptr for non-regular pixels.
/// Throws LookupError when p is not in the graph.
const Segment* segment_of(const SkeletonGraph& graph, Pixel p);

/// Debug export, header "x,y,degree_class,segment_id"; segment_id is -1 for
/// non-regular pixels.
std::string graph_csv(const SkeletonGraph& graph);

}  // namespace skelevo
