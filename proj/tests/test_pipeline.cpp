#include <doctest.h>

#include <cmath>
#include <sstream>

#include "helpers.hpp"
#include "skelevo/errors.hpp"
#include "skelevo/pipeline.hpp"
#include "skelevo/synthgen.hpp"

using namespace skelevo;
namespace fs = std::filesystem;

namespace {

using Rgb = std::array<std::uint8_t, 3>;

const ActivityCurve& curve(const AnalysisResult& r, std::string_view label) {
    for (const auto& c : r.curves) {
        if (c.label == label) return c;
    }
    FAIL("missing curve " << label);
    return r.curves.front();
}

/// Synthesises a preset into dir/frames and returns a config reading it.
PipelineConfig synth_run(const std::string& name, const std::string& preset) {
    const auto dir = testing::scratch_dir(name);
    const auto script = preset_script(preset);
    write_generated(dir, script, generate(script));
    PipelineConfig c;
    c.input = dir / "frames";
    c.out = dir / "out";
    return c;
}

std::vector<PixelSet> frames_of(const std::string& preset) { return generate(preset_script(preset)).frames; }

std::vector<PixelSet> growing_line(int steps) {
    std::vector<PixelSet> frames;
    for (int t = 0; t < steps; ++t) {
        std::vector<Pixel> pts;
        for (int x = 0; x <= 2 + 2 * t; ++x) pts.push_back({x + 1, 3});
        frames.push_back(testing::make_set(pts, 40, 8, t));
    }
    return frames;
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("analysis produces every per-step output and stage timing") {
    const auto r = analyze(frames_of("branching"), PipelineConfig{});
    REQUIRE(r.steps.size() == 40);
    CHECK(r.curves.size() == 3);
    CHECK_FALSE(r.steps[0].incoming.has_value());
    CHECK(r.steps[5].incoming.has_value());
    CHECK(r.degenerate_steps.empty());
    std::vector<std::string> stages;
    for (const auto& t : r.timings) {
        stages.push_back(t.stage);
        CHECK(t.seconds >= 0.0);
    }
    CHECK(stages == std::vector<std::string>{"graph", "match", "propagate", "persistence", "indicators"});
    for (std::size_t i = 0; i < r.steps.size(); ++i) {
        const auto& s = r.steps[i];
        CHECK(s.indicators.step == static_cast<int>(i));
        CHECK(s.indicators.bi_total == doctest::Approx(total_persistence(s.bi)));
        CHECK(s.indicators.age_power_sum == doctest::Approx(persistence_power_sum(s.age)));
        CHECK(s.growth.pers_g.size() == s.graph.segments().size());
    }
}

TEST_CASE("filter modes") {
    PipelineConfig c;
    c.filter = FilterMode::none;
    const auto frames = frames_of("branching");
    const auto none = analyze(frames, c);
    for (const auto& s : none.steps) CHECK(s.filtered.pixels() == s.graph.pixels());
    c.filter = FilterMode::inconsistency;
    const auto bi = analyze(frames, c);
    for (const auto& s : bi.steps) {
        CHECK(s.filtered.pixels() == filter_by_inconsistency(s.graph, s.bi, 5).pixels());
    }
    CHECK(parse_filter_mode("combined") == FilterMode::combined);
    CHECK_THROWS_AS(parse_filter_mode("all"), ParameterError);
}

TEST_CASE("analysis is deterministic across thread counts") {
    const auto frames = frames_of("disappearance");
    PipelineConfig one, many;
    many.jobs = 4;
    const auto a = analyze(frames, one);
    const auto b = analyze(frames, many);
    CHECK(a.curves == b.curves);
    for (std::size_t i = 0; i < a.steps.size(); ++i) {
        CHECK(a.steps[i].times == b.steps[i].times);
        CHECK(a.steps[i].filtered.pixels() == b.steps[i].filtered.pixels());
    }
}

TEST_CASE("static sequences give flat curves") {
    const auto s = testing::from_art({"#.....#", ".#...#.", "..#.#..", "...#...", "...#...", "...#..."});
    const auto r = analyze({s, s, s, s}, PipelineConfig{});
    for (const auto& c : r.curves) {
        const auto v = c.values();
        for (double x : v) CHECK(x == v.front());
    }
    CHECK(curve(r, kVivacityCurve).samples.front().first == 1);
    CHECK(curve(r, kVivacityCurve).values() == std::vector<double>{0.0, 0.0, 0.0});
}

TEST_CASE("a stalled sequence separates from a growing one") {
    const auto grow = analyze(frames_of("branching"), PipelineConfig{});
    const auto stalled = generate(preset_script("stalled"));
    const auto stall = analyze(stalled.frames, PipelineConfig{});
    const auto& v = curve(stall, kVivacityCurve);
    for (const auto& [step, value] : v.samples) {
        // Only the one-frame noise spur still counts as growth after step 20.
        const bool spur = !stalled.truth.steps[static_cast<std::size_t>(step)].spurs.empty();
        if (step > 20) CHECK((value == 0.0) != spur);
    }
    CHECK(curve(grow, kVivacityCurve).samples.back().second > 0.0);
    CHECK(dtw_distance(curve(grow, kVivacityCurve), v) > 0.0);
}

TEST_CASE("empty steps become gaps and blank renders") {
    auto frames = growing_line(5);
    frames[2] = testing::make_set({}, 40, 8, 2);
    const auto r = analyze(frames, PipelineConfig{});
    CHECK(r.degenerate_steps == std::vector<int>{2, 3});
    std::vector<int> steps;
    for (const auto& [step, value] : curve(r, kVivacityCurve).samples) steps.push_back(step);
    CHECK(steps == std::vector<int>{1, 3, 4});
    for (auto mode : {RenderMode::creation_time, RenderMode::pixel_class, RenderMode::growth, RenderMode::inconsistency}) {
        const auto img = render_overlay(r.steps[2], mode);
        for (const auto& px : img.pixels) CHECK(px == Rgb{255, 255, 255});
    }
    // Everything after the gap is new again.
    for (int t : r.steps[3].times.times) CHECK(t == 3);
}

TEST_CASE("renders map values onto the white-to-red ramp") {
    const auto r = analyze(growing_line(4), PipelineConfig{});
    const auto& s = r.steps[3];
    const auto img = render_overlay(s, RenderMode::creation_time);
    CHECK(img.width == 40);
    CHECK(img.at(0, 0) == Rgb{255, 255, 255});
    CHECK(img.at(1, 3) == Rgb{255, 217, 217});
    CHECK(img.at(9, 3) == Rgb{255, 0, 0});

    const auto classes = render_overlay(s, RenderMode::pixel_class);
    CHECK(classes.at(1, 3) == Rgb{90, 90, 90});
    CHECK(classes.at(9, 3) == Rgb{220, 30, 30});
    CHECK(render_overlay(r.steps[0], RenderMode::pixel_class).at(1, 3) == Rgb{150, 150, 150});
    // A uniform value range collapses to the lightest shade.
    CHECK(render_overlay(r.steps[0], RenderMode::creation_time).at(1, 3) == Rgb{255, 217, 217});

    CHECK(parse_render_mode("class") == RenderMode::pixel_class);
    CHECK(to_string(RenderMode::creation_time) == "creation-time");
    CHECK_THROWS_AS(parse_render_mode("heat"), ParameterError);
}

TEST_CASE("config files and validation") {
    const auto doc = nlohmann::json::parse(R"({
        "input": "frames", "format": "coords", "threshold": 40, "polarity": "below",
        "smoothing": "export", "bi_threshold": 3, "age_threshold": 7, "t_g": 12,
        "filter": "inconsistency", "vivacity_mode": "pixel", "order": 1.5,
        "out": "results", "jobs": 3, "render": ["class", "growth"],
        "export": {"matches": true, "graph": true, "unsmoothed": true}})");
    const auto c = config_from_json(doc);
    CHECK(c.input == "frames");
    CHECK(c.format == InputFormat::coords);
    CHECK(c.binarize.threshold == 40);
    CHECK(c.binarize.polarity == Polarity::below);
    CHECK(c.smoothing == SmoothingPlacement::at_export);
    CHECK(c.bi_threshold == 3);
    CHECK(c.age_threshold == 7);
    CHECK(c.t_g == 12);
    CHECK(c.filter == FilterMode::inconsistency);
    CHECK(c.vivacity_mode == VivacityMode::pixel_own);
    CHECK(c.order == 1.5);
    CHECK(c.jobs == 3);
    CHECK(c.render == std::vector<RenderMode>{RenderMode::pixel_class, RenderMode::growth});
    CHECK((c.export_matches && c.export_graph && c.export_unsmoothed));
    CHECK(config_to_json(config_from_json(config_to_json(c))) == config_to_json(c));

    PipelineConfig base;
    base.t_g = 4;
    CHECK(config_from_json(nlohmann::json::parse(R"({"jobs": 2})"), base).t_g == 4);
    CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"filter": "maybe"})")), ParameterError);

    PipelineConfig bad;
    bad.jobs = 0;
    CHECK_THROWS_AS(bad.validate(), ParameterError);
    bad = {};
    bad.order = 0.0;
    CHECK_THROWS_AS(bad.validate(), ParameterError);
    bad = {};
    bad.bi_threshold = -1;
    CHECK_THROWS_AS(bad.validate(), ParameterError);
}

TEST_CASE("run writes the artifact tree") {
    auto c = synth_run("pipeline_tree", "branching");
    c.render = {RenderMode::creation_time, RenderMode::pixel_class};
    c.export_matches = c.export_graph = c.export_unsmoothed = true;
    std::ostringstream log;
    REQUIRE(run(c, log) == 0);
    CHECK(log.str().find("loaded 40 frames") != std::string::npos);

    const auto manifest = nlohmann::json::parse(testing::slurp(c.out / "manifest.json"));
    CHECK(manifest.at("status") == "ok");
    CHECK(manifest.at("steps") == 40);
    CHECK(manifest.at("variants").at("smoothing") == "inline");
    CHECK_FALSE(manifest.at("config").contains("jobs"));
    const auto timings = nlohmann::json::parse(testing::slurp(c.out / "timings.json"));
    CHECK(timings.at("stages").size() == 7);

    for (const char* f : {"stats.csv", "curves.json", "curve_vivacity.csv", "curve_branch_inconsistency_total.csv",
                          "curve_age_persistence_total.csv"}) {
        CHECK(fs::exists(c.out / f));
    }
    const auto step0 = c.out / "steps" / "0000";
    CHECK_FALSE(fs::exists(step0 / "classification.csv"));
    CHECK_FALSE(fs::exists(step0 / "matches.csv"));
    const auto step9 = c.out / "steps" / "0009";
    for (const char* f : {"skeleton.txt", "creation_time.csv", "creation_time_unsmoothed.csv", "classification.csv",
                          "matches.csv", "graph.csv", "diagrams.csv", "growth.csv", "filtered.txt",
                          "render_creation-time.png", "render_class.png"}) {
        CHECK(fs::exists(step9 / f));
    }
    CHECK(testing::slurp(c.out / "stats.csv").rfind("step,pixels,branch_points,segments,known,growth,decay,", 0) == 0);
    CHECK(read_coords(step9 / "skeleton.txt") == read_coords(c.input / "0009.txt"));

    const auto png = read_png_rgb(step9 / "render_class.png");
    for (auto mode : {RenderMode::creation_time, RenderMode::pixel_class, RenderMode::growth, RenderMode::inconsistency}) {
        const auto again = render_from_run(c.out, 9, mode);
        if (mode == RenderMode::pixel_class) CHECK(again.pixels == png.pixels);
    }
    const auto r = analyze(load_sequence(c.input, {}), c);
    for (auto mode : {RenderMode::creation_time, RenderMode::growth, RenderMode::inconsistency}) {
        CHECK(render_from_run(c.out, 17, mode).pixels == render_overlay(r.steps[17], mode).pixels);
    }
    CHECK_THROWS_AS(render_from_run(c.out, 99, RenderMode::growth), InputError);

    const auto curves = curves_from_json(nlohmann::json::parse(testing::slurp(c.out / "curves.json")));
    CHECK(curves == r.curves);
}

TEST_CASE("rerunning into the same directory replaces stale steps") {
    auto c = synth_run("pipeline_rerun", "loop");
    std::ostringstream log;
    REQUIRE(run(c, log) == 0);
    const auto frames = load_sequence(c.input, {});
    const auto short_dir = c.input.parent_path() / "short";
    fs::create_directories(short_dir);
    for (int i = 0; i < 5; ++i) write_coords(short_dir / (std::to_string(i) + ".txt"), frames[static_cast<std::size_t>(i)]);
    c.input = short_dir;
    REQUIRE(run(c, log) == 0);
    std::size_t dirs = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(c.out / "steps")) ++dirs;
    CHECK(dirs == 5);
}

TEST_CASE("failures are reported in the manifest") {
    const auto dir = testing::scratch_dir("pipeline_fail");
    PipelineConfig c;
    c.input = dir / "missing";
    c.out = dir / "out";
    std::ostringstream log;
    CHECK(run(c, log) == 1);
    auto manifest = nlohmann::json::parse(testing::slurp(c.out / "manifest.json"));
    CHECK(manifest.at("status") == "FAILED");
    CHECK(manifest.at("failed_stage") == "load");
    CHECK(manifest.at("error").get<std::string>().find("missing") != std::string::npos);
    CHECK(log.str().find("failed") != std::string::npos);

    c.jobs = -2;
    CHECK(run(c, log) == 1);
    manifest = nlohmann::json::parse(testing::slurp(c.out / "manifest.json"));
    CHECK(manifest.at("failed_stage") == "config");
}

TEST_CASE("comparing runs") {
    auto a = synth_run("pipeline_cmp_a", "branching");
    auto b = synth_run("pipeline_cmp_b", "stalled");
    std::ostringstream log;
    REQUIRE(run(a, log) == 0);
    REQUIRE(run(b, log) == 0);

    const auto self = compare(a.out, a.out);
    REQUIRE(self.size() == 3);
    for (const auto& d : self) CHECK(d.distance == 0.0);
    CHECK(self[0].a.find(":branch_inconsistency_total") != std::string::npos);

    const auto other = compare(a.out, b.out);
    double sum = 0.0;
    for (const auto& d : other) {
        CHECK(std::isfinite(d.distance));
        CHECK(d.distance >= 0.0);
        sum += d.distance;
    }
    CHECK(sum > 0.0);
    const auto json = distances_to_json(other);
    CHECK(json.size() == 3);

    // Runs of different length still compare.
    auto c = synth_run("pipeline_cmp_c", "loop");
    REQUIRE(run(c, log) == 0);
    for (const auto& d : compare(a.out, c.out)) CHECK(std::isfinite(d.distance));
    CHECK_THROWS_AS(compare(a.out, a.out.parent_path() / "nowhere"), InputError);
}

}  // TEST_SUITE
