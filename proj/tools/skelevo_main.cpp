#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "skelevo/errors.hpp"
#include "skelevo/pipeline.hpp"
#include "skelevo/synthgen.hpp"

namespace {

using namespace skelevo;

nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw InputError(path + ": " + e.what());
    }
}

struct AnalyzeFlags {
    std::string config_file;
    std::string input;
    std::string format;
    int threshold = 128;
    std::string polarity;
    bool no_smooth = false;
    bool smooth_at_export = false;
    int bi_threshold = 5;
    int age_threshold = 5;
    int t_g = 10;
    std::string filter;
    std::string vivacity_mode;
    double order = 2.0;
    std::string out;
    int jobs = 1;
    std::vector<std::string> render;
    bool export_matches = false;
    bool export_graph = false;
    bool export_unsmoothed = false;
};

PipelineConfig build_config(const AnalyzeFlags& f, const CLI::App& cmd) {
    PipelineConfig c;
    if (!f.config_file.empty()) c = config_from_json(read_json_file(f.config_file), c);
    auto given = [&](const char* name) { return cmd.count(name) > 0; };
    if (given("--input")) c.input = f.input;
    if (given("--format")) c.format = parse_input_format(f.format);
    if (given("--threshold")) c.binarize.threshold = f.threshold;
    if (given("--polarity")) c.binarize.polarity = parse_polarity(f.polarity);
    if (f.no_smooth && f.smooth_at_export) throw ParameterError("--no-smooth and --smooth-at-export exclude each other");
    if (f.no_smooth) c.smoothing = SmoothingPlacement::none;
    if (f.smooth_at_export) c.smoothing = SmoothingPlacement::at_export;
    if (given("--bi-threshold")) c.bi_threshold = f.bi_threshold;
    if (given("--age-threshold")) c.age_threshold = f.age_threshold;
    if (given("--t-g")) c.t_g = f.t_g;
    if (given("--filter")) c.filter = parse_filter_mode(f.filter);
    if (given("--vivacity-mode")) c.vivacity_mode = parse_vivacity_mode(f.vivacity_mode);
    if (given("--order")) c.order = f.order;
    if (given("--out")) c.out = f.out;
    if (given("--jobs")) c.jobs = f.jobs;
    if (given("--render")) {
        c.render.clear();
        for (const auto& m : f.render) c.render.push_back(parse_render_mode(m));
    }
    if (f.export_matches) c.export_matches = true;
    if (f.export_graph) c.export_graph = true;
    if (f.export_unsmoothed) c.export_unsmoothed = true;
    if (c.input.empty()) throw InputError("no input given (use --input or a config file)");
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Temporal analysis of evolving skeletons"};
    app.require_subcommand(1);

    AnalyzeFlags af;
    auto* analyze = app.add_subcommand("analyze", "Run the full pipeline on an image or coordinate sequence");
    analyze->add_option("--config", af.config_file, "JSON config file; flags override its values");
    analyze->add_option("--input", af.input, "Directory, JSON manifest or single file");
    analyze->add_option("--format", af.format, "auto, png, pgm or coords");
    analyze->add_option("--threshold", af.threshold, "Binarization threshold in [0, 255]");
    analyze->add_option("--polarity", af.polarity, "above (foreground > threshold) or below");
    analyze->add_flag("--no-smooth", af.no_smooth, "Disable the creation-time mode filter");
    analyze->add_flag("--smooth-at-export", af.smooth_at_export, "Smooth after propagation instead of per step");
    analyze->add_option("--bi-threshold", af.bi_threshold, "Branch inconsistency filter threshold");
    analyze->add_option("--age-threshold", af.age_threshold, "Age persistence filter threshold");
    analyze->add_option("--t-g", af.t_g, "Vivacity growth threshold");
    analyze->add_option("--filter", af.filter, "none, inconsistency or combined");
    analyze->add_option("--vivacity-mode", af.vivacity_mode, "segment, pixel or per-segment");
    analyze->add_option("--order", af.order, "Total persistence order");
    analyze->add_option("--out", af.out, "Output directory");
    analyze->add_option("--jobs", af.jobs, "Worker threads");
    analyze->add_option("--render", af.render, "Overlay modes: creation-time, class, growth, inconsistency");
    analyze->add_flag("--export-matches", af.export_matches, "Write matches.csv per step");
    analyze->add_flag("--export-graph", af.export_graph, "Write graph.csv per step");
    analyze->add_flag("--export-unsmoothed", af.export_unsmoothed, "Write pre-smoothing creation times");

    std::string run_a, run_b, compare_out;
    auto* cmp = app.add_subcommand("compare", "DTW distances between the curves of two runs");
    cmp->add_option("run_a", run_a, "First artifact tree")->required();
    cmp->add_option("run_b", run_b, "Second artifact tree")->required();
    cmp->add_option("--out", compare_out, "Write the report here instead of stdout");

    std::string preset, script_file, synth_out;
    bool print_script = false;
    auto* synth = app.add_subcommand("synth", "Generate a synthetic sequence with ground truth");
    synth->add_option("--preset", preset, "Built-in script name");
    synth->add_option("--script", script_file, "Growth script JSON");
    synth->add_option("--out", synth_out, "Output directory");
    synth->add_flag("--print-script", print_script, "Print the script as JSON and exit");

    std::string render_run, render_mode, render_out;
    int render_step = 0;
    auto* render = app.add_subcommand("render", "Render one step of a run as a PNG overlay");
    render->add_option("--run", render_run, "Artifact tree")->required();
    render->add_option("--step", render_step, "Step index")->required();
    render->add_option("--mode", render_mode, "creation-time, class, growth or inconsistency")->required();
    render->add_option("--out", render_out, "PNG path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (analyze->parsed()) {
            return run(build_config(af, *analyze), std::cerr);
        }
        if (cmp->parsed()) {
            const std::string report = distances_to_json(compare(run_a, run_b)).dump(1) + "\n";
            if (compare_out.empty()) {
                std::cout << report;
            } else {
                std::ofstream out(compare_out, std::ios::binary);
                if (!out) throw InputError("cannot write " + compare_out);
                out << report;
            }
            return 0;
        }
        if (synth->parsed()) {
            if (preset.empty() == script_file.empty()) throw ParameterError("give exactly one of --preset or --script");
            const GrowthScript script =
                preset.empty() ? script_from_json(read_json_file(script_file)) : preset_script(preset);
            if (print_script) {
                std::cout << script_to_json(script).dump(1) << '\n';
                return 0;
            }
            if (synth_out.empty()) throw ParameterError("--out is required unless --print-script is given");
            const GeneratedSequence seq = generate(script);
            write_generated(synth_out, script, seq);
            std::cerr << "skelevo: wrote " << seq.frames.size() << " frames to " << synth_out << "/frames\n";
            return 0;
        }
        if (render->parsed()) {
            write_png(render_out, render_from_run(render_run, render_step, parse_render_mode(render_mode)));
            return 0;
        }
    } catch (const InputError& e) {
        std::cerr << "skelevo: " << e.what() << '\n';
        return 1;
    } catch (const ParameterError& e) {
        std::cerr << "skelevo: " << e.what() << '\n';
        return 1;
    } catch (const GenerationError& e) {
        std::cerr << "skelevo: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "skelevo: internal error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
