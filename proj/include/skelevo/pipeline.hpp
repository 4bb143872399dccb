#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "skelevo/creation_time.hpp"
#include "skelevo/image_io.hpp"
#include "skelevo/indicators.hpp"
#include "skelevo/persistence.hpp"
#include "skelevo/skeleton_graph.hpp"
#include "skelevo/skeletonize.hpp"
#include "skelevo/temporal_match.hpp"

namespace skelevo {

enum class FilterMode { none, inconsistency, combined };

FilterMode parse_filter_mode(std::string_view text);
std::string_view to_string(FilterMode mode);

enum class RenderMode { creation_time, pixel_class, growth, inconsistency };

RenderMode parse_render_mode(std::string_view text);
std::string_view to_string(RenderMode mode);

struct PipelineConfig {
    std::filesystem::path input;
    InputFormat format = InputFormat::automatic;
    BinarizeConfig binarize;
    SmoothingPlacement smoothing = SmoothingPlacement::inline_step;
    int bi_threshold = 5;
    int age_threshold = 5;
    int t_g = 10;
    FilterMode filter = FilterMode::combined;
    VivacityMode vivacity_mode = VivacityMode::segment_of_pixel;
    double order = 2.0;
    std::filesystem::path out = "out";
    bool export_matches = false;
    bool export_graph = false;
    bool export_unsmoothed = false;
    std::vector<RenderMode> render;
    int jobs = 1;

    /// Throws ParameterError on negative thresholds, non-positive order or jobs.
    void validate() const;
};

/// Reads keys mirroring the CLI flags on top of `base`.
PipelineConfig config_from_json(const nlohmann::json& doc, PipelineConfig base = {});
nlohmann::json config_to_json(const PipelineConfig& config);

struct StepResult {
    SkeletonGraph graph;
    std::optional<MatchSet> incoming;  ///< matches from the previous step
    CreationTimeField unsmoothed;
    CreationTimeField times;
    PersistenceDiagram bi;
    PersistenceDiagram age;
    GrowthField growth;
    SkeletonGraph filtered;
    StepIndicators indicators;
};

struct StageTiming {
    std::string stage;
    double seconds = 0.0;
};

struct AnalysisResult {
    std::vector<StepResult> steps;
    std::vector<ActivityCurve> curves;
    std::vector<int> degenerate_steps;
    std::vector<StageTiming> timings;
};

/// Runs every stage after skeleton extraction on an in-memory sequence.
AnalysisResult analyze(std::vector<PixelSet> frames, const PipelineConfig& config);

/// Writes the artifact tree for a finished analysis into config.out.
void write_artifacts(const AnalysisResult& result, const PipelineConfig& config);

/// Full pipeline: load, analyze, export. Returns the process exit status
/// (0 success, 1 input or parameter error, 2 stage failure) and records the
/// outcome in the manifest; progress lines go to `log`.
int run(const PipelineConfig& config, std::ostream& log);

struct CurveDistance {
    std::string a;
    std::string b;
    double distance = 0.0;
};

/// DTW distance between same-labelled curves of two artifact trees.
/// Throws InputError when a run lacks curves.
std::vector<CurveDistance> compare(const std::filesystem::path& run_a, const std::filesystem::path& run_b);
nlohmann::json distances_to_json(const std::vector<CurveDistance>& distances);

/// Skeleton pixels colored over a white background: a white-to-red ramp over
/// the observed value range, or a fixed palette for the class mode.
RgbImage render_overlay(const StepResult& step, RenderMode mode);

/// Re-renders a step of an existing artifact tree.
RgbImage render_from_run(const std::filesystem::path& run_dir, int step, RenderMode mode);

}  // namespace skelevo
