#pragma once

#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "skelevo/creation_time.hpp"
#include "skelevo/skeleton_graph.hpp"

namespace skelevo {

enum class DiagramKind { branch_inconsistency, age_persistence };

std::string_view to_string(DiagramKind kind);

struct DiagramPoint {
    int birth = 0;       ///< creation time of the branch point
    int death = 0;       ///< companion time (first adjacent pixel, or segment maximum)
    int segment_id = 0;
    Pixel branch;

    int persistence() const { return death >= birth ? death - birth : birth - death; }

    friend bool operator==(const DiagramPoint&, const DiagramPoint&) = default;
};

/// One point per (branch point, incident segment) pair of a step. Points are
/// ordered by branch pixel, then by segment id.
struct PersistenceDiagram {
    DiagramKind kind = DiagramKind::branch_inconsistency;
    int step = 0;
    std::vector<DiagramPoint> points;
};

PersistenceDiagram branch_inconsistency_diagram(const SkeletonGraph& graph, const CreationTimeField& field);
PersistenceDiagram age_persistence_diagram(const SkeletonGraph& graph, const CreationTimeField& field);

/// persG per segment id: step minus the newest creation time on the segment,
/// bounding pixels included.
struct GrowthField {
    int step = 0;
    std::vector<int> pers_g;
};

GrowthField growth_persistence(const SkeletonGraph& graph, const CreationTimeField& field, int step);

/// Rebuilds the graph without the flagged segments. Interior pixels of a
/// removed segment are dropped, as are bounding pixels all of whose segments
/// are removed. Pixels belonging to no segment are kept.
SkeletonGraph remove_segments(const SkeletonGraph& graph, const std::vector<bool>& removed);

/// Removes every segment with an incident point of inconsistency >= threshold.
SkeletonGraph filter_by_inconsistency(const SkeletonGraph& graph, const PersistenceDiagram& bi_diagram,
                                      int threshold);

inline constexpr int kUnboundedAge = std::numeric_limits<int>::max();

/// An incidence passes when its age persistence exceeds age_threshold or its
/// inconsistency is below bi_threshold. A segment with any failing incidence
/// is removed. Throws InputError if the diagrams do not describe the same
/// incidences.
SkeletonGraph filter_combined(const SkeletonGraph& graph, const PersistenceDiagram& bi_diagram,
                              const PersistenceDiagram& age_diagram, int bi_threshold, int age_threshold);

/// Header "kind,step,birth,death,branch_x,branch_y,segment_id".
std::string diagram_csv_header();
std::string diagram_csv_rows(const PersistenceDiagram& diagram);

/// Header "step,segment_id,pers_g".
std::string growth_csv(const GrowthField& field);

}  // namespace skelevo
