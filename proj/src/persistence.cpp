#include "skelevo/persistence.hpp"

#include <algorithm>
#include <sstream>

#include "skelevo/errors.hpp"

namespace skelevo {

std::string_view to_string(DiagramKind kind) {
    return kind == DiagramKind::branch_inconsistency ? "branch_inconsistency" : "age_persistence";
}

namespace {

void check_field(const SkeletonGraph& graph, const CreationTimeField& field) {
    if (field.times.size() != graph.vertex_count()) {
        throw InputError("creation-time field of step " + std::to_string(field.index) + " has " +
                         std::to_string(field.times.size()) + " entries for " +
                         std::to_string(graph.vertex_count()) + " skeleton pixels");
    }
}

int time_of(const CreationTimeField& field, int v) { return field.times[static_cast<std::size_t>(v)]; }

/// Pixel of `seg` next to bounding vertex `b`.
int first_adjacent(const Segment& seg, int b) {
    const bool at_front = seg.endpoint_ids.front() == b;
    if (!seg.interior_ids.empty()) return at_front ? seg.interior_ids.front() : seg.interior_ids.back();
    return at_front ? seg.endpoint_ids.back() : seg.endpoint_ids.front();
}

int interior_max(const Segment& seg, const CreationTimeField& field) {
    int best = 0;
    if (seg.interior_ids.empty()) {
        for (int v : seg.endpoint_ids) best = std::max(best, time_of(field, v));
    } else {
        for (int v : seg.interior_ids) best = std::max(best, time_of(field, v));
    }
    return best;
}

template <typename Death>
PersistenceDiagram build_diagram(DiagramKind kind, const SkeletonGraph& graph, const CreationTimeField& field,
                                 Death death) {
    check_field(graph, field);
    PersistenceDiagram d{kind, graph.index(), {}};
    for (int b = 0; b < static_cast<int>(graph.vertex_count()); ++b) {
        if (graph.degree_class(b) != DegreeClass::branch) continue;
        for (int s : graph.incident_segments(b)) {
            const Segment& seg = graph.segments()[static_cast<std::size_t>(s)];
            d.points.push_back({time_of(field, b), death(seg, b), s, graph.pixel(b)});
        }
    }
    return d;
}

}  // namespace

PersistenceDiagram branch_inconsistency_diagram(const SkeletonGraph& graph, const CreationTimeField& field) {
    return build_diagram(DiagramKind::branch_inconsistency, graph, field,
                         [&](const Segment& seg, int b) { return time_of(field, first_adjacent(seg, b)); });
}

PersistenceDiagram age_persistence_diagram(const SkeletonGraph& graph, const CreationTimeField& field) {
    return build_diagram(DiagramKind::age_persistence, graph, field,
                         [&](const Segment& seg, int) { return interior_max(seg, field); });
}

GrowthField growth_persistence(const SkeletonGraph& graph, const CreationTimeField& field, int step) {
    check_field(graph, field);
    GrowthField g{step, {}};
    g.pers_g.reserve(graph.segments().size());
    for (const auto& seg : graph.segments()) {
        int newest = 0;
        for (int v : seg.interior_ids) newest = std::max(newest, time_of(field, v));
        for (int v : seg.endpoint_ids) newest = std::max(newest, time_of(field, v));
        g.pers_g.push_back(step - newest);
    }
    return g;
}

SkeletonGraph remove_segments(const SkeletonGraph& graph, const std::vector<bool>& removed) {
    const auto& segments = graph.segments();
    if (removed.size() != segments.size()) {
        throw InputError("segment removal mask has " + std::to_string(removed.size()) + " entries for " +
                         std::to_string(segments.size()) + " segments");
    }
    std::vector<Pixel> kept;
    kept.reserve(graph.vertex_count());
    for (int v = 0; v < static_cast<int>(graph.vertex_count()); ++v) {
        const auto owners = graph.segments_containing(v);
        const bool keep = owners.empty() || std::any_of(owners.begin(), owners.end(), [&](int s) {
                              return !removed[static_cast<std::size_t>(s)];
                          });
        if (keep) kept.push_back(graph.pixel(v));
    }
    const PixelSet& src = graph.pixels();
    return SkeletonGraph(PixelSet(src.width(), src.height(), std::move(kept), src.index()));
}

SkeletonGraph filter_by_inconsistency(const SkeletonGraph& graph, const PersistenceDiagram& bi, int threshold) {
    std::vector<bool> removed(graph.segments().size(), false);
    for (const auto& p : bi.points) {
        if (p.persistence() >= threshold) removed[static_cast<std::size_t>(p.segment_id)] = true;
    }
    return remove_segments(graph, removed);
}

SkeletonGraph filter_combined(const SkeletonGraph& graph, const PersistenceDiagram& bi,
                              const PersistenceDiagram& age, int bi_threshold, int age_threshold) {
    if (bi.points.size() != age.points.size()) {
        throw InputError("branch-inconsistency and age diagrams have different point counts");
    }
    std::vector<bool> removed(graph.segments().size(), false);
    for (std::size_t k = 0; k < bi.points.size(); ++k) {
        const auto& pb = bi.points[k];
        const auto& pa = age.points[k];
        if (pb.segment_id != pa.segment_id || pb.branch != pa.branch) {
            throw InputError("branch-inconsistency and age diagrams describe different incidences");
        }
        const int age_persistence = pa.death - pa.birth;
        const bool keep = age_persistence > age_threshold || pb.persistence() < bi_threshold;
        if (!keep) removed[static_cast<std::size_t>(pb.segment_id)] = true;
    }
    return remove_segments(graph, removed);
}

std::string diagram_csv_header() { return "kind,step,birth,death,branch_x,branch_y,segment_id\n"; }

std::string diagram_csv_rows(const PersistenceDiagram& d) {
    std::ostringstream out;
    for (const auto& p : d.points) {
        out << to_string(d.kind) << ',' << d.step << ',' << p.birth << ',' << p.death << ',' << p.branch.x << ','
            << p.branch.y << ',' << p.segment_id << '\n';
    }
    return out.str();
}

std::string growth_csv(const GrowthField& g) {
    std::ostringstream out;
    out << "step,segment_id,pers_g\n";
    for (std::size_t s = 0; s < g.pers_g.size(); ++s) out << g.step << ',' << s << ',' << g.pers_g[s] << '\n';
    return out.str();
}

}  // namespace skelevo
