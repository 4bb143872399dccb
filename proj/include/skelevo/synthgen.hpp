#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "skelevo/pixel.hpp"

namespace skelevo {

/// A polyline skeleton branch present from step 0. Its first `length`
/// pixels run from `start` along `direction` and all have creation time 0.
struct FingerSeed {
    std::string name;
    Pixel start;
    Pixel direction{0, -1};
    int length = 1;
};

enum class EventKind { extend_tip, spawn_branch, inject_noise_spur, delete_segment };

EventKind parse_event_kind(std::string_view text);
std::string_view to_string(EventKind kind);

enum class Side { left, right };

struct ScriptEvent {
    int step = 1;
    EventKind kind = EventKind::extend_tip;
    std::string finger;  ///< finger the event acts on

    // extend-tip
    int pixels = 2;                  ///< pixels added per step
    std::optional<int> until;        ///< repeat every step through this one
    std::vector<Pixel> path;         ///< per-pixel directions, consumed in order
    bool allow_merge = false;        ///< the last pixel may touch other pixels

    // spawn-branch / inject-noise-spur / delete-segment
    int at = -1;                     ///< index along the finger; negative counts from the tip
    Side side = Side::left;
    std::string name;                ///< new finger name, or spur label
    int length = 2;                  ///< initial arm or spur length
    int duration = 0;                ///< delete-segment: 0 is permanent, else steps hidden
};

struct GrowthScript {
    std::uint64_t seed = 0;
    int width = 64;
    int height = 64;
    int steps = 1;
    std::vector<FingerSeed> fingers;
    std::vector<ScriptEvent> events;
};

struct SpurLabel {
    std::string label;
    std::vector<Pixel> pixels;
};

struct GroundTruthStep {
    std::vector<int> times;          ///< parallel to the step's PixelSet
    std::vector<SpurLabel> spurs;    ///< noise spurs present at this step
};

struct GroundTruth {
    std::vector<GroundTruthStep> steps;
};

struct GeneratedSequence {
    std::vector<PixelSet> frames;
    GroundTruth truth;
};

/// Deterministic evolving skeleton. Events of one step run in script order.
/// Throws GenerationError naming the offending event when growth would leave
/// the frame, overlap existing pixels or break thinness.
GeneratedSequence generate(const GrowthScript& script);

GrowthScript script_from_json(const nlohmann::json& doc);
nlohmann::json script_to_json(const GrowthScript& script);
nlohmann::json ground_truth_to_json(const GrowthScript& script, const GeneratedSequence& sequence);

/// Writes frames/NNNN.txt in the coordinate format plus ground_truth.json.
void write_generated(const std::filesystem::path& dir, const GrowthScript& script,
                     const GeneratedSequence& sequence);

/// Many vertical fingers in separate lanes, each with a random start length,
/// growth rate (1 or 2 px per step) and active interval drawn from `seed`.
GrowthScript random_script(std::uint64_t seed, int width, int height, int steps, int fingers);

/// Built-in scripts: "branching" (three fingers, two branch events, two noise
/// spurs, 40 steps), "stalled" (same layout, growth stops halfway),
/// "disappearance" (branching with a one-frame loss of both arms at step 25),
/// "loop" (an arm that grows back into its trunk).
GrowthScript preset_script(std::string_view name);
std::vector<std::string> preset_names();

}  // namespace skelevo
