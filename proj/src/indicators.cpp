#include "skelevo/indicators.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "skelevo/errors.hpp"

namespace skelevo {

std::vector<double> ActivityCurve::values() const {
    std::vector<double> v;
    v.reserve(samples.size());
    for (const auto& s : samples) v.push_back(s.second);
    return v;
}

namespace {

void check_order(double order) {
    if (!(order > 0.0) || !std::isfinite(order)) {
        throw ParameterError("total persistence order must be a positive finite number");
    }
}

}  // namespace

double persistence_power_sum(const PersistenceDiagram& diagram, double order) {
    check_order(order);
    double sum = 0.0;
    for (const auto& p : diagram.points) sum += std::pow(static_cast<double>(p.persistence()), order);
    return sum;
}

double total_persistence(const PersistenceDiagram& diagram, double order) {
    const double sum = persistence_power_sum(diagram, order);
    if (sum == 0.0) return 0.0;
    if (order == 2.0) return std::sqrt(sum);
    if (order == 1.0) return sum;
    return std::pow(sum, 1.0 / order);
}

VivacityMode parse_vivacity_mode(std::string_view text) {
    if (text == "segment") return VivacityMode::segment_of_pixel;
    if (text == "pixel") return VivacityMode::pixel_own;
    if (text == "per-segment") return VivacityMode::per_segment;
    throw ParameterError("unknown vivacity mode '" + std::string(text) + "' (expected segment, pixel or per-segment)");
}

std::string_view to_string(VivacityMode mode) {
    switch (mode) {
        case VivacityMode::segment_of_pixel: return "segment";
        case VivacityMode::pixel_own: return "pixel";
        case VivacityMode::per_segment: return "per-segment";
    }
    return "segment";
}

std::vector<int> pixel_growth_persistence(const SkeletonGraph& graph, const GrowthField& growth,
                                          const CreationTimeField& field) {
    std::vector<int> out(graph.vertex_count());
    for (int v = 0; v < static_cast<int>(graph.vertex_count()); ++v) {
        const auto owners = graph.segments_containing(v);
        int best = growth.step - field.times[static_cast<std::size_t>(v)];
        if (!owners.empty()) {
            best = std::numeric_limits<int>::max();
            for (int s : owners) best = std::min(best, growth.pers_g[static_cast<std::size_t>(s)]);
        }
        out[static_cast<std::size_t>(v)] = best;
    }
    return out;
}

std::optional<double> vivacity(const SkeletonGraph& graph, std::span<const PixelClass> classes,
                               const GrowthField& growth, const CreationTimeField& field, int t_g,
                               VivacityMode mode) {
    const std::size_t n = graph.vertex_count();
    if (n == 0) return std::nullopt;
    if (classes.size() != n || field.times.size() != n) {
        throw InputError("vivacity inputs disagree on the pixel count of step " + std::to_string(growth.step));
    }

    if (mode == VivacityMode::per_segment) {
        const auto& segments = graph.segments();
        if (segments.empty()) return std::nullopt;
        std::size_t active = 0;
        for (const auto& seg : segments) {
            if (growth.pers_g[static_cast<std::size_t>(seg.id)] > t_g) continue;
            auto is_growth = [&](int v) { return classes[static_cast<std::size_t>(v)] == PixelClass::growth; };
            if (std::any_of(seg.interior_ids.begin(), seg.interior_ids.end(), is_growth) ||
                std::any_of(seg.endpoint_ids.begin(), seg.endpoint_ids.end(), is_growth)) {
                ++active;
            }
        }
        return static_cast<double>(active) / static_cast<double>(segments.size());
    }

    std::vector<int> pers;
    if (mode == VivacityMode::segment_of_pixel) pers = pixel_growth_persistence(graph, growth, field);
    std::size_t count = 0;
    for (std::size_t v = 0; v < n; ++v) {
        if (classes[v] != PixelClass::growth) continue;
        const int value = mode == VivacityMode::pixel_own ? growth.step - field.times[v] : pers[v];
        if (value <= t_g) ++count;
    }
    return static_cast<double>(count) / static_cast<double>(n);
}

double dtw_distance(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw InputError("DTW needs two non-empty curves");
    constexpr double kInf = std::numeric_limits<double>::infinity();
    std::vector<double> prev(b.size() + 1, kInf);
    std::vector<double> cur(b.size() + 1, kInf);
    prev[0] = 0.0;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = kInf;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const double cost = std::abs(a[i - 1] - b[j - 1]);
            cur[j] = cost + std::min({prev[j - 1], prev[j], cur[j - 1]});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

double dtw_distance(const ActivityCurve& a, const ActivityCurve& b) {
    if (a.samples.empty() || b.samples.empty()) {
        throw InputError("DTW needs two non-empty curves ('" + a.label + "', '" + b.label + "')");
    }
    const auto va = a.values();
    const auto vb = b.values();
    return dtw_distance(va, vb);
}

std::vector<ActivityCurve> curve_suite(std::span<const StepIndicators> steps) {
    std::vector<ActivityCurve> curves{{std::string(kBranchInconsistencyCurve), {}},
                                      {std::string(kAgePersistenceCurve), {}},
                                      {std::string(kVivacityCurve), {}}};
    for (const auto& s : steps) {
        curves[0].samples.emplace_back(s.step, s.bi_total);
        curves[1].samples.emplace_back(s.step, s.age_total);
        if (s.vivacity) curves[2].samples.emplace_back(s.step, *s.vivacity);
    }
    return curves;
}

std::string format_number(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

std::string curve_csv(const ActivityCurve& curve) {
    std::ostringstream out;
    out << "step,value\n";
    for (const auto& [step, value] : curve.samples) out << step << ',' << format_number(value) << '\n';
    return out.str();
}

nlohmann::json curves_to_json(std::span<const ActivityCurve> curves) {
    auto doc = nlohmann::json::array();
    for (const auto& c : curves) {
        auto samples = nlohmann::json::array();
        for (const auto& [step, value] : c.samples) samples.push_back({step, value});
        doc.push_back({{"label", c.label}, {"samples", std::move(samples)}});
    }
    return doc;
}

std::vector<ActivityCurve> curves_from_json(const nlohmann::json& doc) {
    if (!doc.is_array()) throw InputError("curve document must be a JSON array");
    std::vector<ActivityCurve> out;
    try {
        for (const auto& entry : doc) {
            ActivityCurve c;
            c.label = entry.at("label").get<std::string>();
            for (const auto& s : entry.at("samples")) {
                c.samples.emplace_back(s.at(0).get<int>(), s.at(1).get<double>());
            }
            out.push_back(std::move(c));
        }
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("malformed curve document: ") + e.what());
    }
    return out;
}

}  // namespace skelevo
