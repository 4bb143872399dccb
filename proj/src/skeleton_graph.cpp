#include "skelevo/skeleton_graph.hpp"

#include <algorithm>
#include <sstream>

#include "skelevo/errors.hpp"

namespace skelevo {

std::string_view to_string(DegreeClass c) {
    switch (c) {
        case DegreeClass::isolated: return "isolated";
        case DegreeClass::endpoint: return "endpoint";
        case DegreeClass::regular: return "regular";
        case DegreeClass::branch: return "branch";
    }
    return "isolated";
}

DegreeClass classify_degree(int degree) {
    if (degree <= 0) return DegreeClass::isolated;
    if (degree == 1) return DegreeClass::endpoint;
    if (degree == 2) return DegreeClass::regular;
    return DegreeClass::branch;
}

SkeletonGraph::SkeletonGraph(PixelSet pixels) : pixels_(std::move(pixels)) {
    build_adjacency();
    extract_segments();
}

int SkeletonGraph::vertex(Pixel p) const {
    if (auto i = pixels_.find(p)) return static_cast<int>(*i);
    throw LookupError("pixel (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                      ") is not part of the skeleton of step " + std::to_string(index()));
}

void SkeletonGraph::build_adjacency() {
    const std::size_t n = pixels_.size();
    offsets_.assign(1, 0);
    offsets_.reserve(n + 1);
    adjacency_.clear();
    classes_.resize(n);
    if (n == 0) return;

    const PixelLookup lookup(pixels_);
    for (std::size_t v = 0; v < n; ++v) {
        const Pixel p = pixels_[v];
        // kNeighborOffsets is row-major, so neighbor lists come out sorted.
        for (Pixel off : kNeighborOffsets) {
            const int u = lookup.at({p.x + off.x, p.y + off.y});
            if (u >= 0) adjacency_.push_back(u);
        }
        offsets_.push_back(static_cast<int>(adjacency_.size()));
        classes_[v] = classify_degree(offsets_[v + 1] - offsets_[v]);
    }
}

void SkeletonGraph::extract_segments() {
    const int n = static_cast<int>(pixels_.size());
    interior_segment_.assign(static_cast<std::size_t>(n), -1);
    segments_.clear();

    auto is_regular = [&](int v) { return classes_[static_cast<std::size_t>(v)] == DegreeClass::regular; };
    auto other_neighbor = [&](int v, int from) {
        const auto nb = neighbors(v);
        return nb[0] == from ? nb[1] : nb[0];
    };
    auto finish = [&](std::vector<int> interior, std::vector<int> ends) {
        Segment seg;
        seg.id = static_cast<int>(segments_.size());
        std::sort(ends.begin(), ends.end());
        ends.erase(std::unique(ends.begin(), ends.end()), ends.end());
        for (int v : interior) interior_segment_[static_cast<std::size_t>(v)] = seg.id;
        seg.interior_ids = std::move(interior);
        seg.endpoint_ids = std::move(ends);
        for (int v : seg.interior_ids) seg.interior.push_back(pixel(v));
        for (int v : seg.endpoint_ids) seg.endpoints.push_back(pixel(v));
        segments_.push_back(std::move(seg));
    };

    for (int u = 0; u < n; ++u) {
        if (is_regular(u)) continue;
        for (int v : neighbors(u)) {
            if (!is_regular(v)) {
                if (u < v) finish({}, {u, v});
                continue;
            }
            if (interior_segment_[static_cast<std::size_t>(v)] >= 0) continue;

            std::vector<int> interior{v};
            interior_segment_[static_cast<std::size_t>(v)] = static_cast<int>(segments_.size());
            int prev = u;
            int cur = v;
            int next = other_neighbor(cur, prev);
            while (is_regular(next)) {
                interior.push_back(next);
                interior_segment_[static_cast<std::size_t>(next)] = static_cast<int>(segments_.size());
                prev = cur;
                cur = next;
                next = other_neighbor(cur, prev);
            }
            // Walked from u; orient from the smaller bounding pixel.
            if (next < u) std::reverse(interior.begin(), interior.end());
            finish(std::move(interior), {u, next});
        }
    }

    // Whatever regular pixels remain lie on closed loops without branch points.
    for (int s = 0; s < n; ++s) {
        if (!is_regular(s) || interior_segment_[static_cast<std::size_t>(s)] >= 0) continue;
        std::vector<int> interior{s};
        interior_segment_[static_cast<std::size_t>(s)] = static_cast<int>(segments_.size());
        int prev = s;
        int cur = neighbors(s)[0];
        while (cur != s) {
            interior.push_back(cur);
            interior_segment_[static_cast<std::size_t>(cur)] = static_cast<int>(segments_.size());
            const int next = other_neighbor(cur, prev);
            prev = cur;
            cur = next;
        }
        finish(std::move(interior), {});
    }

    std::vector<std::vector<int>> incident(static_cast<std::size_t>(n));
    for (const auto& seg : segments_) {
        for (int v : seg.endpoint_ids) incident[static_cast<std::size_t>(v)].push_back(seg.id);
    }
    incidence_offsets_.assign(1, 0);
    incidence_.clear();
    for (const auto& list : incident) {
        incidence_.insert(incidence_.end(), list.begin(), list.end());
        incidence_offsets_.push_back(static_cast<int>(incidence_.size()));
    }
}

std::vector<int> SkeletonGraph::segments_containing(int v) const {
    if (const int s = interior_segment(v); s >= 0) return {s};
    const auto inc = incident_segments(v);
    return {inc.begin(), inc.end()};
}

SkeletonGraph build_graph(PixelSet pixels) { return SkeletonGraph(std::move(pixels)); }

std::vector<Pixel> branch_points(const SkeletonGraph& graph) {
    std::vector<Pixel> out;
    for (int v = 0; v < static_cast<int>(graph.vertex_count()); ++v) {
        if (graph.degree_class(v) == DegreeClass::branch) out.push_back(graph.pixel(v));
    }
    return out;
}

const Segment* segment_of(const SkeletonGraph& graph, Pixel p) {
    const int s = graph.interior_segment(graph.vertex(p));
    return s >= 0 ? &graph.segments()[static_cast<std::size_t>(s)] : nullptr;
}

std::string graph_csv(const SkeletonGraph& graph) {
    std::ostringstream out;
    out << "x,y,degree_class,segment_id\n";
    for (int v = 0; v < static_cast<int>(graph.vertex_count()); ++v) {
        const Pixel p = graph.pixel(v);
        out << p.x << ',' << p.y << ',' << to_string(graph.degree_class(v)) << ','
            << graph.interior_segment(v) << '\n';
    }
    return out.str();
}

}  // namespace skelevo
