#include "skelevo/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "skelevo/errors.hpp"
#include "skelevo/parallel.hpp"

namespace skelevo {

namespace fs = std::filesystem;

FilterMode parse_filter_mode(std::string_view text) {
    if (text == "none") return FilterMode::none;
    if (text == "inconsistency") return FilterMode::inconsistency;
    if (text == "combined") return FilterMode::combined;
    throw ParameterError("unknown filter mode '" + std::string(text) + "' (expected none, inconsistency or combined)");
}

std::string_view to_string(FilterMode mode) {
    switch (mode) {
        case FilterMode::none: return "none";
        case FilterMode::inconsistency: return "inconsistency";
        case FilterMode::combined: return "combined";
    }
    return "combined";
}

RenderMode parse_render_mode(std::string_view text) {
    if (text == "creation-time") return RenderMode::creation_time;
    if (text == "class") return RenderMode::pixel_class;
    if (text == "growth") return RenderMode::growth;
    if (text == "inconsistency") return RenderMode::inconsistency;
    throw ParameterError("unknown render mode '" + std::string(text) +
                         "' (expected creation-time, class, growth or inconsistency)");
}

std::string_view to_string(RenderMode mode) {
    switch (mode) {
        case RenderMode::creation_time: return "creation-time";
        case RenderMode::pixel_class: return "class";
        case RenderMode::growth: return "growth";
        case RenderMode::inconsistency: return "inconsistency";
    }
    return "creation-time";
}

void PipelineConfig::validate() const {
    if (bi_threshold < 0 || age_threshold < 0 || t_g < 0) throw ParameterError("thresholds must be non-negative");
    if (!(order > 0.0) || !std::isfinite(order)) throw ParameterError("persistence order must be positive");
    if (jobs < 1) throw ParameterError("jobs must be at least 1");
    if (binarize.threshold < 0 || binarize.threshold > 255) {
        throw ParameterError("binarization threshold must lie in [0, 255]");
    }
}

PipelineConfig config_from_json(const nlohmann::json& doc, PipelineConfig c) {
    if (!doc.is_object()) throw InputError("pipeline config must be a JSON object");
    try {
        if (doc.contains("input")) c.input = doc.at("input").get<std::string>();
        if (doc.contains("format")) c.format = parse_input_format(doc.at("format").get<std::string>());
        if (doc.contains("threshold")) c.binarize.threshold = doc.at("threshold").get<int>();
        if (doc.contains("polarity")) c.binarize.polarity = parse_polarity(doc.at("polarity").get<std::string>());
        if (doc.contains("smoothing")) c.smoothing = parse_smoothing_placement(doc.at("smoothing").get<std::string>());
        if (doc.contains("bi_threshold")) c.bi_threshold = doc.at("bi_threshold").get<int>();
        if (doc.contains("age_threshold")) c.age_threshold = doc.at("age_threshold").get<int>();
        if (doc.contains("t_g")) c.t_g = doc.at("t_g").get<int>();
        if (doc.contains("filter")) c.filter = parse_filter_mode(doc.at("filter").get<std::string>());
        if (doc.contains("vivacity_mode")) c.vivacity_mode = parse_vivacity_mode(doc.at("vivacity_mode").get<std::string>());
        if (doc.contains("order")) c.order = doc.at("order").get<double>();
        if (doc.contains("out")) c.out = doc.at("out").get<std::string>();
        if (doc.contains("jobs")) c.jobs = doc.at("jobs").get<int>();
        if (doc.contains("render")) {
            c.render.clear();
            for (const auto& m : doc.at("render")) c.render.push_back(parse_render_mode(m.get<std::string>()));
        }
        if (doc.contains("export")) {
            const auto& e = doc.at("export");
            c.export_matches = e.value("matches", c.export_matches);
            c.export_graph = e.value("graph", c.export_graph);
            c.export_unsmoothed = e.value("unsmoothed", c.export_unsmoothed);
        }
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("malformed pipeline config: ") + e.what());
    }
    return c;
}

nlohmann::json config_to_json(const PipelineConfig& c) {
    nlohmann::json render = nlohmann::json::array();
    for (auto m : c.render) render.push_back(to_string(m));
    return {{"input", c.input.generic_string()},
            {"format", to_string(c.format)},
            {"threshold", c.binarize.threshold},
            {"polarity", to_string(c.binarize.polarity)},
            {"smoothing", to_string(c.smoothing)},
            {"bi_threshold", c.bi_threshold},
            {"age_threshold", c.age_threshold},
            {"t_g", c.t_g},
            {"filter", to_string(c.filter)},
            {"vivacity_mode", to_string(c.vivacity_mode)},
            {"order", c.order},
            {"out", c.out.generic_string()},
            {"jobs", c.jobs},
            {"render", std::move(render)},
            {"export",
             {{"matches", c.export_matches}, {"graph", c.export_graph}, {"unsmoothed", c.export_unsmoothed}}}};
}

namespace {

class StageClock {
public:
    explicit StageClock(std::vector<StageTiming>& sink) : sink_(sink) {}

    template <typename Fn>
    void run(std::string name, Fn&& fn) {
        const auto start = std::chrono::steady_clock::now();
        fn();
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
        sink_.push_back({std::move(name), elapsed.count()});
    }

private:
    std::vector<StageTiming>& sink_;
};

std::string step_dir_name(int step) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d", step);
    return buf;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path.string());
    out << text;
    if (!out) throw InputError("failed writing " + path.string());
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

/// Largest inconsistency touching each pixel: over a branch point's own
/// incidences, or over the incidences of the segment holding a regular pixel.
std::vector<int> pixel_inconsistency(const SkeletonGraph& graph, const PersistenceDiagram& bi) {
    std::vector<int> per_segment(graph.segments().size(), 0);
    std::vector<int> out(graph.vertex_count(), 0);
    for (const auto& p : bi.points) {
        auto& s = per_segment[static_cast<std::size_t>(p.segment_id)];
        s = std::max(s, p.persistence());
        auto& b = out[static_cast<std::size_t>(graph.vertex(p.branch))];
        b = std::max(b, p.persistence());
    }
    for (int v = 0; v < static_cast<int>(graph.vertex_count()); ++v) {
        if (const int s = graph.interior_segment(v); s >= 0) {
            out[static_cast<std::size_t>(v)] = per_segment[static_cast<std::size_t>(s)];
        }
    }
    return out;
}

std::array<std::uint8_t, 3> ramp(double t) {
    const double s = 0.15 + 0.85 * std::clamp(t, 0.0, 1.0);
    const auto c = static_cast<std::uint8_t>(std::lround(255.0 * (1.0 - s)));
    return {255, c, c};
}

std::array<std::uint8_t, 3> class_color(std::optional<PixelClass> c) {
    if (!c) return {150, 150, 150};
    switch (*c) {
        case PixelClass::known: return {90, 90, 90};
        case PixelClass::growth: return {220, 30, 30};
        case PixelClass::decay: return {40, 80, 220};
        case PixelClass::irregular: return {240, 150, 20};
    }
    return {150, 150, 150};
}

StepResult analyze_step_outputs(StepResult step, const PipelineConfig& config) {
    const int index = step.graph.index();
    step.bi = branch_inconsistency_diagram(step.graph, step.times);
    step.age = age_persistence_diagram(step.graph, step.times);
    step.growth = growth_persistence(step.graph, step.times, index);
    switch (config.filter) {
        case FilterMode::none: step.filtered = step.graph; break;
        case FilterMode::inconsistency:
            step.filtered = filter_by_inconsistency(step.graph, step.bi, config.bi_threshold);
            break;
        case FilterMode::combined:
            step.filtered = filter_combined(step.graph, step.bi, step.age, config.bi_threshold, config.age_threshold);
            break;
    }
    auto& ind = step.indicators;
    ind.step = index;
    ind.bi_power_sum = persistence_power_sum(step.bi, config.order);
    ind.bi_total = total_persistence(step.bi, config.order);
    ind.age_power_sum = persistence_power_sum(step.age, config.order);
    ind.age_total = total_persistence(step.age, config.order);
    if (step.incoming) {
        ind.vivacity = vivacity(step.graph, step.incoming->classification, step.growth, step.times, config.t_g,
                                config.vivacity_mode);
    }
    return step;
}

}  // namespace

AnalysisResult analyze(std::vector<PixelSet> frames, const PipelineConfig& config) {
    config.validate();
    if (frames.empty()) throw InputError("the input sequence has no frames");
    for (std::size_t i = 0; i < frames.size(); ++i) frames[i].set_index(static_cast<int>(i));

    AnalysisResult result;
    StageClock clock(result.timings);
    const std::size_t n = frames.size();

    std::vector<SkeletonGraph> graphs(n);
    clock.run("graph", [&] {
        parallel_for(n, config.jobs, [&](std::size_t i) { graphs[i] = SkeletonGraph(frames[i]); });
    });

    std::vector<MatchSet> matches;
    clock.run("match", [&] {
        if (n >= 2) matches = match_all(frames, config.jobs);
    });
    for (const auto& m : matches) {
        if (m.degenerate()) result.degenerate_steps.push_back(m.to_index);
    }

    CreationTimes times;
    clock.run("propagate", [&] {
        times = compute_creation_times(frames, graphs, matches, config.smoothing, config.jobs);
    });

    result.steps.resize(n);
    clock.run("persistence", [&] {
        parallel_for(n, config.jobs, [&](std::size_t i) {
            StepResult step;
            step.graph = std::move(graphs[i]);
            if (i > 0) step.incoming = matches[i - 1];
            step.unsmoothed = std::move(times.unsmoothed[i]);
            step.times = std::move(times.final[i]);
            result.steps[i] = analyze_step_outputs(std::move(step), config);
        });
    });

    clock.run("indicators", [&] {
        std::vector<StepIndicators> ind;
        ind.reserve(n);
        for (const auto& s : result.steps) ind.push_back(s.indicators);
        result.curves = curve_suite(ind);
    });
    return result;
}

RgbImage render_overlay(const StepResult& step, RenderMode mode) {
    const PixelSet& pixels = step.graph.pixels();
    RgbImage image(pixels.width(), pixels.height(), {255, 255, 255});
    if (pixels.empty()) return image;

    if (mode == RenderMode::pixel_class) {
        for (std::size_t v = 0; v < pixels.size(); ++v) {
            std::optional<PixelClass> c;
            if (step.incoming) c = step.incoming->classification[v];
            image.at(pixels[v].x, pixels[v].y) = class_color(c);
        }
        return image;
    }

    std::vector<int> values;
    switch (mode) {
        case RenderMode::creation_time: values = step.times.times; break;
        case RenderMode::growth: values = pixel_growth_persistence(step.graph, step.growth, step.times); break;
        case RenderMode::inconsistency: values = pixel_inconsistency(step.graph, step.bi); break;
        case RenderMode::pixel_class: break;
    }
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    const double span = static_cast<double>(*hi - *lo);
    for (std::size_t v = 0; v < pixels.size(); ++v) {
        const double t = span > 0.0 ? (values[v] - *lo) / span : 0.0;
        image.at(pixels[v].x, pixels[v].y) = ramp(t);
    }
    return image;
}

void write_artifacts(const AnalysisResult& result, const PipelineConfig& config) {
    const fs::path& out = config.out;
    std::error_code ec;
    if (fs::exists(out / "manifest.json", ec)) fs::remove_all(out / "steps", ec);
    fs::create_directories(out / "steps", ec);
    if (ec) throw InputError("cannot create output directory " + out.string() + ": " + ec.message());

    parallel_for(result.steps.size(), config.jobs, [&](std::size_t i) {
        const StepResult& s = result.steps[i];
        const PixelSet& pixels = s.graph.pixels();
        const fs::path dir = out / "steps" / step_dir_name(static_cast<int>(i));
        std::error_code dir_ec;
        fs::create_directories(dir, dir_ec);
        if (dir_ec) throw InputError("cannot create " + dir.string() + ": " + dir_ec.message());

        write_text(dir / "skeleton.txt", format_coords(pixels));
        write_text(dir / "creation_time.csv", creation_time_csv(pixels, s.times));
        if (config.export_unsmoothed) {
            write_text(dir / "creation_time_unsmoothed.csv", creation_time_csv(pixels, s.unsmoothed));
        }
        if (s.incoming) {
            write_text(dir / "classification.csv", classification_csv(pixels, *s.incoming));
            if (config.export_matches) {
                const PixelSet& prev = result.steps[i - 1].graph.pixels();
                write_text(dir / "matches.csv", matches_csv(prev, pixels, *s.incoming));
            }
        }
        if (config.export_graph) write_text(dir / "graph.csv", graph_csv(s.graph));
        write_text(dir / "diagrams.csv", diagram_csv_header() + diagram_csv_rows(s.bi) + diagram_csv_rows(s.age));
        write_text(dir / "growth.csv", growth_csv(s.growth));
        write_text(dir / "filtered.txt", format_coords(s.filtered.pixels()));
        for (RenderMode mode : config.render) {
            write_png(dir / ("render_" + std::string(to_string(mode)) + ".png"), render_overlay(s, mode));
        }
    });

    for (const auto& curve : result.curves) write_text(out / ("curve_" + curve.label + ".csv"), curve_csv(curve));
    write_text(out / "curves.json", curves_to_json(result.curves).dump(1) + "\n");

    std::ostringstream stats;
    stats << "step,pixels,branch_points,segments,known,growth,decay,irregular,bi_total,bi_power_sum,age_total,"
             "age_power_sum,vivacity,filtered_pixels\n";
    for (const auto& s : result.steps) {
        std::size_t counts[4] = {0, 0, 0, 0};
        if (s.incoming) {
            for (PixelClass c : s.incoming->classification) ++counts[static_cast<std::size_t>(c)];
        }
        const auto& ind = s.indicators;
        stats << ind.step << ',' << s.graph.vertex_count() << ',' << branch_points(s.graph).size() << ','
              << s.graph.segments().size() << ',' << counts[0] << ',' << counts[1] << ',' << counts[2] << ','
              << counts[3] << ',' << format_number(ind.bi_total) << ',' << format_number(ind.bi_power_sum) << ','
              << format_number(ind.age_total) << ',' << format_number(ind.age_power_sum) << ','
              << (ind.vivacity ? format_number(*ind.vivacity) : std::string()) << ','
              << s.filtered.vertex_count() << '\n';
    }
    write_text(out / "stats.csv", stats.str());
}

namespace {

nlohmann::json manifest_json(const PipelineConfig& config, const AnalysisResult* result, const std::string& status,
                             const std::string& failed_stage, const std::string& error) {
    nlohmann::json cfg = config_to_json(config);
    // Neither the output location nor the thread count influences results.
    cfg.erase("out");
    cfg.erase("jobs");
    nlohmann::json doc{
        {"tool", "skelevo"},
        {"status", status},
        {"config", std::move(cfg)},
        {"variants",
         {{"smoothing", to_string(config.smoothing)},
          {"filter", to_string(config.filter)},
          {"vivacity", to_string(config.vivacity_mode)},
          {"persistence_order", config.order}}},
        {"tie_breaks",
         {{"nearest_neighbor", "smallest (y, x) among equidistant candidates"},
          {"smoothing_mode", "smallest creation time among equally frequent values"},
          {"segment_order", "discovery from non-regular pixels in (y, x) order"}}},
    };
    if (result) {
        const PixelSet& first = result->steps.front().graph.pixels();
        doc["frame"] = {{"width", first.width()}, {"height", first.height()}};
        doc["steps"] = result->steps.size();
        doc["degenerate_steps"] = result->degenerate_steps;
    }
    if (!failed_stage.empty()) doc["failed_stage"] = failed_stage;
    if (!error.empty()) doc["error"] = error;
    return doc;
}

void write_timings(const fs::path& out, const std::vector<StageTiming>& timings, int jobs) {
    nlohmann::json stages = nlohmann::json::array();
    for (const auto& t : timings) stages.push_back({{"stage", t.stage}, {"seconds", t.seconds}});
    write_text(out / "timings.json", nlohmann::json{{"jobs", jobs}, {"stages", std::move(stages)}}.dump(1) + "\n");
}

}  // namespace

int run(const PipelineConfig& config, std::ostream& log) {
    std::string stage = "config";
    std::vector<StageTiming> timings;
    std::optional<AnalysisResult> result;
    auto fail = [&](int code, const std::string& message) {
        log << "skelevo: stage '" << stage << "' failed: " << message << '\n';
        try {
            std::error_code ec;
            fs::create_directories(config.out, ec);
            write_text(config.out / "manifest.json",
                       manifest_json(config, nullptr, "FAILED", stage, message).dump(1) + "\n");
            write_timings(config.out, timings, config.jobs);
        } catch (const std::exception& e) {
            log << "skelevo: could not record failure: " << e.what() << '\n';
        }
        return code;
    };

    try {
        config.validate();
        stage = "load";
        std::vector<PixelSet> frames;
        StageClock(timings).run("load", [&] {
            LoadConfig load{config.format, config.binarize, config.jobs};
            frames = load_sequence(config.input, load);
        });
        log << "skelevo: loaded " << frames.size() << " frames from " << config.input.string() << '\n';

        stage = "analyze";
        result = analyze(std::move(frames), config);
        timings.insert(timings.end(), result->timings.begin(), result->timings.end());
        for (int s : result->degenerate_steps) log << "skelevo: step " << s << " is degenerate (empty neighbor)\n";

        stage = "export";
        StageClock(timings).run("export", [&] { write_artifacts(*result, config); });
        write_text(config.out / "manifest.json", manifest_json(config, &*result, "ok", "", "").dump(1) + "\n");
        write_timings(config.out, timings, config.jobs);
        log << "skelevo: wrote " << result->steps.size() << " steps to " << config.out.string() << '\n';
        return 0;
    } catch (const InputError& e) {
        return fail(1, e.what());
    } catch (const ParameterError& e) {
        return fail(1, e.what());
    } catch (const std::exception& e) {
        return fail(2, e.what());
    }
}

std::vector<CurveDistance> compare(const fs::path& run_a, const fs::path& run_b) {
    auto load = [](const fs::path& run) {
        const fs::path file = run / "curves.json";
        if (!fs::exists(file)) throw InputError("run " + run.string() + " has no curves.json");
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(read_text(file));
        } catch (const nlohmann::json::exception& e) {
            throw InputError(file.string() + ": " + e.what());
        }
        return curves_from_json(doc);
    };
    const auto a = load(run_a);
    const auto b = load(run_b);

    std::vector<CurveDistance> out;
    for (std::string_view label : {kBranchInconsistencyCurve, kAgePersistenceCurve, kVivacityCurve}) {
        auto find = [&](const std::vector<ActivityCurve>& curves, const fs::path& run) -> const ActivityCurve& {
            for (const auto& c : curves) {
                if (c.label == label) return c;
            }
            throw InputError("run " + run.string() + " lacks curve '" + std::string(label) + "'");
        };
        const ActivityCurve& ca = find(a, run_a);
        const ActivityCurve& cb = find(b, run_b);
        out.push_back({run_a.generic_string() + ":" + ca.label, run_b.generic_string() + ":" + cb.label,
                       dtw_distance(ca, cb)});
    }
    return out;
}

nlohmann::json distances_to_json(const std::vector<CurveDistance>& distances) {
    nlohmann::json doc = nlohmann::json::array();
    for (const auto& d : distances) doc.push_back({{"a", d.a}, {"b", d.b}, {"distance", d.distance}});
    return doc;
}

namespace {

/// Rows of a "x,y,<value>" export, checked against the step's pixel order.
std::vector<std::string> read_pixel_column(const fs::path& path, const PixelSet& pixels) {
    std::istringstream in(read_text(path));
    std::string line;
    std::getline(in, line);
    std::vector<std::string> values;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos) throw InputError(path.string() + ": malformed row");
        const std::size_t i = values.size();
        Pixel p;
        try {
            p = {std::stoi(line.substr(0, c1)), std::stoi(line.substr(c1 + 1, c2 - c1 - 1))};
        } catch (const std::exception&) {
            throw InputError(path.string() + ": malformed row '" + line + "'");
        }
        if (i >= pixels.size() || pixels[i] != p) throw InputError(path.string() + ": rows do not match skeleton.txt");
        values.push_back(line.substr(c2 + 1));
    }
    if (values.size() != pixels.size()) throw InputError(path.string() + ": rows do not match skeleton.txt");
    return values;
}

}  // namespace

RgbImage render_from_run(const fs::path& run_dir, int step, RenderMode mode) {
    const fs::path dir = run_dir / "steps" / step_dir_name(step);
    if (!fs::is_directory(dir)) throw InputError("run " + run_dir.string() + " has no step " + std::to_string(step));

    StepResult s;
    PixelSet pixels = read_coords(dir / "skeleton.txt", step);
    s.times.index = step;
    for (const auto& v : read_pixel_column(dir / "creation_time.csv", pixels)) {
        try {
            s.times.times.push_back(std::stoi(v));
        } catch (const std::exception&) {
            throw InputError((dir / "creation_time.csv").string() + ": bad creation time '" + v + "'");
        }
    }
    if (fs::exists(dir / "classification.csv")) {
        MatchSet m;
        m.to_index = step;
        for (const auto& v : read_pixel_column(dir / "classification.csv", pixels)) {
            if (v == "known") m.classification.push_back(PixelClass::known);
            else if (v == "growth") m.classification.push_back(PixelClass::growth);
            else if (v == "decay") m.classification.push_back(PixelClass::decay);
            else if (v == "irregular") m.classification.push_back(PixelClass::irregular);
            else throw InputError((dir / "classification.csv").string() + ": unknown class '" + v + "'");
        }
        s.incoming = std::move(m);
    }
    s.graph = SkeletonGraph(std::move(pixels));
    s.bi = branch_inconsistency_diagram(s.graph, s.times);
    s.growth = growth_persistence(s.graph, s.times, step);
    return render_overlay(s, mode);
}

}  // namespace skelevo
