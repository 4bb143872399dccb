#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "skelevo/creation_time.hpp"
#include "skelevo/persistence.hpp"
#include "skelevo/skeleton_graph.hpp"
#include "skelevo/temporal_match.hpp"

namespace skelevo {

/// Labeled time series. Steps strictly increase; a step may be missing (gap).
struct ActivityCurve {
    std::string label;
    std::vector<std::pair<int, double>> samples;

    std::vector<double> values() const;
    friend bool operator==(const ActivityCurve&, const ActivityCurve&) = default;
};

inline constexpr std::string_view kBranchInconsistencyCurve = "branch_inconsistency_total";
inline constexpr std::string_view kAgePersistenceCurve = "age_persistence_total";
inline constexpr std::string_view kVivacityCurve = "vivacity";

/// Sum over points of |death - birth|^order. Throws ParameterError for order <= 0.
double persistence_power_sum(const PersistenceDiagram& diagram, double order = 2.0);

/// (sum |death - birth|^order)^(1/order). Throws ParameterError for order <= 0.
double total_persistence(const PersistenceDiagram& diagram, double order = 2.0);

enum class VivacityMode {
    segment_of_pixel,  ///< each growth pixel tested against its segment's persG (default)
    pixel_own,         ///< each growth pixel tested against step minus its own time
    per_segment,       ///< fraction of segments holding a growth pixel and having persG <= t_G
};

VivacityMode parse_vivacity_mode(std::string_view text);
std::string_view to_string(VivacityMode mode);

/// persG of every pixel: the smallest persG among segments containing it;
/// pixels on no segment use step minus their own creation time.
std::vector<int> pixel_growth_persistence(const SkeletonGraph& graph, const GrowthField& growth,
                                          const CreationTimeField& field);

/// Fraction of pixels that are classified growth and have persG <= t_G.
/// Returns nothing for an empty step.
std::optional<double> vivacity(const SkeletonGraph& graph, std::span<const PixelClass> classes,
                               const GrowthField& growth, const CreationTimeField& field, int t_g,
                               VivacityMode mode = VivacityMode::segment_of_pixel);

/// Classical DTW with |a_i - b_j| cost and no window. Throws InputError on
/// an empty input.
double dtw_distance(std::span<const double> a, std::span<const double> b);
double dtw_distance(const ActivityCurve& a, const ActivityCurve& b);

/// Scalar summaries of one step.
struct StepIndicators {
    int step = 0;
    double bi_total = 0.0;
    double bi_power_sum = 0.0;
    double age_total = 0.0;
    double age_power_sum = 0.0;
    std::optional<double> vivacity;
};

/// The three standard curves: branch-inconsistency total persistence, age
/// total persistence and vivacity (with gaps where vivacity is undefined).
std::vector<ActivityCurve> curve_suite(std::span<const StepIndicators> steps);

/// "step,value" rows.
std::string curve_csv(const ActivityCurve& curve);
nlohmann::json curves_to_json(std::span<const ActivityCurve> curves);
std::vector<ActivityCurve> curves_from_json(const nlohmann::json& doc);

/// Shortest decimal text that parses back to the same double.
std::string format_number(double value);

}  // namespace skelevo
