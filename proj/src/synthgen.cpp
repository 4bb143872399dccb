#include "skelevo/synthgen.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <utility>

#include "skelevo/errors.hpp"
#include "skelevo/skeletonize.hpp"

namespace skelevo {

EventKind parse_event_kind(std::string_view text) {
    if (text == "extend-tip") return EventKind::extend_tip;
    if (text == "spawn-branch") return EventKind::spawn_branch;
    if (text == "inject-noise-spur") return EventKind::inject_noise_spur;
    if (text == "delete-segment") return EventKind::delete_segment;
    throw ParameterError("unknown event kind '" + std::string(text) + "'");
}

std::string_view to_string(EventKind kind) {
    switch (kind) {
        case EventKind::extend_tip: return "extend-tip";
        case EventKind::spawn_branch: return "spawn-branch";
        case EventKind::inject_noise_spur: return "inject-noise-spur";
        case EventKind::delete_segment: return "delete-segment";
    }
    return "extend-tip";
}

namespace {

constexpr int kNever = -1;

Pixel rotate(Pixel d, Side side) {
    return side == Side::left ? Pixel{d.y, -d.x} : Pixel{-d.y, d.x};
}

struct Finger {
    int root = -1;            ///< pixel the finger hangs off, -1 for seeds
    std::vector<int> path;    ///< own pixel ids, base to tip
    Pixel direction;
};

class Generator {
public:
    explicit Generator(const GrowthScript& script)
        : script_(script),
          owner_(static_cast<std::size_t>(script.width) * static_cast<std::size_t>(std::max(script.height, 0)), -1),
          spur_owner_(owner_.size(), false),
          cursors_(script.events.size(), 0) {}

    GeneratedSequence run() {
        if (script_.width <= 0 || script_.height <= 0) throw GenerationError("frame dimensions must be positive");
        if (script_.steps < 1) throw GenerationError("a script needs at least one step");
        place_seeds();
        GeneratedSequence out;
        emit(0, {}, out);
        for (int t = 1; t < script_.steps; ++t) {
            std::vector<SpurLabel> spurs;
            for (std::size_t e = 0; e < script_.events.size(); ++e) {
                const ScriptEvent& ev = script_.events[e];
                if (!active(ev, t, e)) continue;
                apply(ev, e, t, spurs);
            }
            emit(t, spurs, out);
            for (const auto& s : spurs) {
                for (Pixel p : s.pixels) spur_owner_[slot(p)] = false;
            }
        }
        return out;
    }

private:
    std::string describe(std::size_t e) const {
        const ScriptEvent& ev = script_.events[e];
        return "event #" + std::to_string(e) + " (" + std::string(to_string(ev.kind)) + " at step " +
               std::to_string(ev.step) + ", finger '" + ev.finger + "')";
    }

    bool active(const ScriptEvent& ev, int t, std::size_t e) const {
        if (ev.step < 1 || ev.step >= script_.steps) {
            throw GenerationError(describe(e) + ": step outside [1, " + std::to_string(script_.steps - 1) + "]");
        }
        if (ev.kind == EventKind::extend_tip) {
            const int last = ev.until.value_or(ev.step);
            if (last < ev.step || last >= script_.steps) {
                throw GenerationError(describe(e) + ": 'until' must lie in [step, " +
                                      std::to_string(script_.steps - 1) + "]");
            }
            return ev.step <= t && t <= last;
        }
        return ev.step == t;
    }

    std::size_t slot(Pixel p) const {
        return static_cast<std::size_t>(p.y) * static_cast<std::size_t>(script_.width) +
               static_cast<std::size_t>(p.x);
    }
    bool in_bounds(Pixel p) const { return p.x >= 0 && p.y >= 0 && p.x < script_.width && p.y < script_.height; }

    /// Throws unless p is free and touches nothing but `allowed` (or anything, if `merge`).
    void check_free(Pixel p, int allowed, bool merge, const std::string& who) const {
        const std::string where = "(" + std::to_string(p.x) + ", " + std::to_string(p.y) + ")";
        if (!in_bounds(p)) throw GenerationError(who + ": pixel " + where + " leaves the frame");
        if (owner_[slot(p)] >= 0 || spur_owner_[slot(p)]) {
            throw GenerationError(who + ": pixel " + where + " is already occupied");
        }
        for (Pixel off : kNeighborOffsets) {
            const Pixel n{p.x + off.x, p.y + off.y};
            if (!in_bounds(n)) continue;
            if (spur_owner_[slot(n)]) throw GenerationError(who + ": pixel " + where + " touches a noise spur");
            const int id = owner_[slot(n)];
            if (id >= 0 && id != allowed && !merge) {
                throw GenerationError(who + ": pixel " + where + " would touch another branch");
            }
        }
    }

    int add_pixel(Pixel p, int time) {
        const int id = static_cast<int>(pixels_.size());
        pixels_.push_back(p);
        born_.push_back(time);
        hidden_until_.push_back(0);
        removed_.push_back(false);
        owner_[slot(p)] = id;
        return id;
    }

    void place_seeds() {
        for (std::size_t f = 0; f < script_.fingers.size(); ++f) {
            const FingerSeed& seed = script_.fingers[f];
            const std::string who = "finger '" + seed.name + "'";
            if (fingers_.contains(seed.name)) throw GenerationError(who + " is defined twice");
            if (seed.length < 1) throw GenerationError(who + ": length must be at least 1");
            Finger finger;
            finger.direction = seed.direction;
            Pixel p = seed.start;
            for (int k = 0; k < seed.length; ++k) {
                check_free(p, finger.path.empty() ? kNever : finger.path.back(), false, who);
                finger.path.push_back(add_pixel(p, 0));
                p = {p.x + seed.direction.x, p.y + seed.direction.y};
            }
            fingers_.emplace(seed.name, std::move(finger));
        }
    }

    Finger& finger(const ScriptEvent& ev, std::size_t e) {
        auto it = fingers_.find(ev.finger);
        if (it == fingers_.end()) throw GenerationError(describe(e) + ": unknown finger");
        return it->second;
    }

    /// Position along a finger; negative counts from the tip.
    int resolve_index(const Finger& f, int at, std::size_t e) const {
        const int n = static_cast<int>(f.path.size());
        const int idx = at < 0 ? n + at : at;
        if (idx < 0 || idx >= n) {
            throw GenerationError(describe(e) + ": index " + std::to_string(at) + " is outside the finger (" +
                                  std::to_string(n) + " pixels)");
        }
        return idx;
    }

    Pixel local_direction(const Finger& f, int idx) const {
        auto pos = [&](int i) { return pixels_[static_cast<std::size_t>(f.path[static_cast<std::size_t>(i)])]; };
        if (idx > 0) return {pos(idx).x - pos(idx - 1).x, pos(idx).y - pos(idx - 1).y};
        if (f.path.size() > 1) return {pos(1).x - pos(0).x, pos(1).y - pos(0).y};
        if (f.root >= 0) {
            const Pixel r = pixels_[static_cast<std::size_t>(f.root)];
            return {pos(0).x - r.x, pos(0).y - r.y};
        }
        return f.direction;
    }

    void apply(const ScriptEvent& ev, std::size_t e, int t, std::vector<SpurLabel>& spurs) {
        switch (ev.kind) {
            case EventKind::extend_tip: extend(ev, e, t); break;
            case EventKind::spawn_branch: spawn(ev, e, t); break;
            case EventKind::inject_noise_spur: spur(ev, e, spurs); break;
            case EventKind::delete_segment: erase(ev, e, t); break;
        }
    }

    void extend(const ScriptEvent& ev, std::size_t e, int t) {
        Finger& f = finger(ev, e);
        if (ev.pixels < 1) throw GenerationError(describe(e) + ": pixels per step must be at least 1");
        int tip = f.path.empty() ? f.root : f.path.back();
        if (tip < 0) throw GenerationError(describe(e) + ": finger has no pixels");
        if (hidden_until_[static_cast<std::size_t>(tip)] > t || removed_[static_cast<std::size_t>(tip)]) {
            throw GenerationError(describe(e) + ": finger tip is currently deleted");
        }
        for (int k = 0; k < ev.pixels; ++k) {
            if (cursors_[e] < ev.path.size()) f.direction = ev.path[cursors_[e]++];
            const Pixel at = pixels_[static_cast<std::size_t>(tip)];
            const Pixel p{at.x + f.direction.x, at.y + f.direction.y};
            check_free(p, tip, ev.allow_merge, describe(e));
            tip = add_pixel(p, t);
            f.path.push_back(tip);
        }
    }

    void spawn(const ScriptEvent& ev, std::size_t e, int t) {
        Finger& parent = finger(ev, e);
        if (ev.name.empty() || fingers_.contains(ev.name)) {
            throw GenerationError(describe(e) + ": new finger needs a fresh name");
        }
        if (ev.length < 1) throw GenerationError(describe(e) + ": arm length must be at least 1");
        const int idx = resolve_index(parent, ev.at, e);
        Finger arm;
        arm.root = parent.path[static_cast<std::size_t>(idx)];
        arm.direction = rotate(local_direction(parent, idx), ev.side);
        int prev = arm.root;
        for (int k = 0; k < ev.length; ++k) {
            const Pixel at = pixels_[static_cast<std::size_t>(prev)];
            const Pixel p{at.x + arm.direction.x, at.y + arm.direction.y};
            check_free(p, prev, false, describe(e));
            prev = add_pixel(p, t);
            arm.path.push_back(prev);
        }
        fingers_.emplace(ev.name, std::move(arm));
    }

    void spur(const ScriptEvent& ev, std::size_t e, std::vector<SpurLabel>& spurs) {
        const Finger& f = finger(ev, e);
        if (ev.length < 1) throw GenerationError(describe(e) + ": spur length must be at least 1");
        const int idx = resolve_index(f, ev.at, e);
        const int anchor = f.path[static_cast<std::size_t>(idx)];
        const Pixel d = rotate(local_direction(f, idx), ev.side);
        SpurLabel label{ev.name.empty() ? "spur" + std::to_string(e) : ev.name, {}};
        Pixel at = pixels_[static_cast<std::size_t>(anchor)];
        for (int k = 0; k < ev.length; ++k) {
            const Pixel p{at.x + d.x, at.y + d.y};
            // Earlier spur pixels are flagged one step late so p may touch its predecessor only.
            check_free(p, k == 0 ? anchor : kNever, false, describe(e));
            if (!label.pixels.empty()) spur_owner_[slot(label.pixels.back())] = true;
            label.pixels.push_back(p);
            at = p;
        }
        for (Pixel p : label.pixels) spur_owner_[slot(p)] = true;
        spurs.push_back(std::move(label));
    }

    void erase(const ScriptEvent& ev, std::size_t e, int t) {
        Finger& f = finger(ev, e);
        const int from = resolve_index(f, ev.at, e);
        if (ev.duration < 0) throw GenerationError(describe(e) + ": duration must be non-negative");
        for (std::size_t k = static_cast<std::size_t>(from); k < f.path.size(); ++k) {
            const auto id = static_cast<std::size_t>(f.path[k]);
            if (ev.duration == 0) {
                removed_[id] = true;
                owner_[slot(pixels_[id])] = -1;
            } else {
                hidden_until_[id] = std::max(hidden_until_[id], t + ev.duration);
            }
        }
        if (ev.duration == 0) f.path.resize(static_cast<std::size_t>(from));
    }

    void emit(int t, const std::vector<SpurLabel>& spurs, GeneratedSequence& out) const {
        std::vector<std::pair<Pixel, int>> items;
        for (std::size_t id = 0; id < pixels_.size(); ++id) {
            if (!removed_[id] && hidden_until_[id] <= t) items.emplace_back(pixels_[id], born_[id]);
        }
        for (const auto& s : spurs) {
            for (Pixel p : s.pixels) items.emplace_back(p, t);
        }
        std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        std::vector<Pixel> pts;
        GroundTruthStep truth;
        pts.reserve(items.size());
        truth.times.reserve(items.size());
        for (const auto& [p, time] : items) {
            pts.push_back(p);
            truth.times.push_back(time);
        }
        truth.spurs = spurs;
        out.frames.emplace_back(script_.width, script_.height, std::move(pts), t);
        out.truth.steps.push_back(std::move(truth));
    }

    const GrowthScript& script_;
    std::vector<int> owner_;
    std::vector<bool> spur_owner_;
    std::vector<std::size_t> cursors_;
    std::vector<Pixel> pixels_;
    std::vector<int> born_;
    std::vector<int> hidden_until_;
    std::vector<bool> removed_;
    std::map<std::string, Finger> fingers_;
};

nlohmann::json pixel_json(Pixel p) { return nlohmann::json::array({p.x, p.y}); }

Pixel pixel_from(const nlohmann::json& j) { return {j.at(0).get<int>(), j.at(1).get<int>()}; }

}  // namespace

GeneratedSequence generate(const GrowthScript& script) { return Generator(script).run(); }

GrowthScript script_from_json(const nlohmann::json& doc) {
    GrowthScript s;
    try {
        s.seed = doc.value("seed", std::uint64_t{0});
        s.width = doc.at("width").get<int>();
        s.height = doc.at("height").get<int>();
        s.steps = doc.at("steps").get<int>();
        for (const auto& f : doc.at("fingers")) {
            FingerSeed seed;
            seed.name = f.at("name").get<std::string>();
            seed.start = pixel_from(f.at("start"));
            if (f.contains("direction")) seed.direction = pixel_from(f.at("direction"));
            seed.length = f.value("length", 1);
            s.fingers.push_back(std::move(seed));
        }
        for (const auto& j : doc.value("events", nlohmann::json::array())) {
            ScriptEvent ev;
            ev.step = j.at("step").get<int>();
            ev.kind = parse_event_kind(j.at("kind").get<std::string>());
            ev.finger = j.at("finger").get<std::string>();
            ev.pixels = j.value("pixels", 2);
            if (j.contains("until")) ev.until = j.at("until").get<int>();
            for (const auto& d : j.value("path", nlohmann::json::array())) ev.path.push_back(pixel_from(d));
            ev.allow_merge = j.value("allow_merge", false);
            const int default_at = ev.kind == EventKind::spawn_branch ? -1 : 0;
            ev.at = j.value("at", default_at);
            const std::string side = j.value("side", std::string("left"));
            if (side != "left" && side != "right") throw ParameterError("side must be 'left' or 'right'");
            ev.side = side == "left" ? Side::left : Side::right;
            ev.name = j.value("name", std::string());
            ev.length = j.value("length", ev.kind == EventKind::spawn_branch ? 1 : 2);
            ev.duration = j.value("duration", 0);
            s.events.push_back(std::move(ev));
        }
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("malformed growth script: ") + e.what());
    }
    return s;
}

nlohmann::json script_to_json(const GrowthScript& s) {
    nlohmann::json fingers = nlohmann::json::array();
    for (const auto& f : s.fingers) {
        fingers.push_back({{"name", f.name},
                           {"start", pixel_json(f.start)},
                           {"direction", pixel_json(f.direction)},
                           {"length", f.length}});
    }
    nlohmann::json events = nlohmann::json::array();
    for (const auto& ev : s.events) {
        nlohmann::json j{{"step", ev.step}, {"kind", to_string(ev.kind)}, {"finger", ev.finger}};
        switch (ev.kind) {
            case EventKind::extend_tip: {
                j["pixels"] = ev.pixels;
                if (ev.until) j["until"] = *ev.until;
                if (!ev.path.empty()) {
                    auto path = nlohmann::json::array();
                    for (Pixel d : ev.path) path.push_back(pixel_json(d));
                    j["path"] = std::move(path);
                }
                if (ev.allow_merge) j["allow_merge"] = true;
                break;
            }
            case EventKind::spawn_branch:
            case EventKind::inject_noise_spur:
                j["at"] = ev.at;
                j["side"] = ev.side == Side::left ? "left" : "right";
                j["name"] = ev.name;
                j["length"] = ev.length;
                break;
            case EventKind::delete_segment:
                j["at"] = ev.at;
                j["duration"] = ev.duration;
                break;
        }
        events.push_back(std::move(j));
    }
    return {{"seed", s.seed}, {"width", s.width}, {"height", s.height}, {"steps", s.steps},
            {"fingers", std::move(fingers)}, {"events", std::move(events)}};
}

nlohmann::json ground_truth_to_json(const GrowthScript& script, const GeneratedSequence& seq) {
    nlohmann::json steps = nlohmann::json::array();
    for (std::size_t t = 0; t < seq.frames.size(); ++t) {
        const PixelSet& frame = seq.frames[t];
        const GroundTruthStep& truth = seq.truth.steps[t];
        nlohmann::json pixels = nlohmann::json::array();
        for (std::size_t i = 0; i < frame.size(); ++i) {
            pixels.push_back({frame[i].x, frame[i].y, truth.times[i]});
        }
        nlohmann::json spurs = nlohmann::json::array();
        for (const auto& s : truth.spurs) {
            nlohmann::json pts = nlohmann::json::array();
            for (Pixel p : s.pixels) pts.push_back(pixel_json(p));
            spurs.push_back({{"label", s.label}, {"pixels", std::move(pts)}});
        }
        steps.push_back({{"step", t}, {"pixels", std::move(pixels)}, {"spurs", std::move(spurs)}});
    }
    return {{"script", script_to_json(script)}, {"steps", std::move(steps)}};
}

void write_generated(const std::filesystem::path& dir, const GrowthScript& script, const GeneratedSequence& seq) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir / "frames", ec);
    if (ec) throw InputError("cannot create " + (dir / "frames").string() + ": " + ec.message());
    for (std::size_t t = 0; t < seq.frames.size(); ++t) {
        char name[32];
        std::snprintf(name, sizeof name, "%04zu.txt", t);
        write_coords(dir / "frames" / name, seq.frames[t]);
    }
    std::ofstream out(dir / "ground_truth.json", std::ios::binary);
    if (!out) throw InputError("cannot write " + (dir / "ground_truth.json").string());
    out << ground_truth_to_json(script, seq).dump(1) << '\n';
}

GrowthScript random_script(std::uint64_t seed, int width, int height, int steps, int fingers) {
    if (fingers * 4 + 2 > width) throw ParameterError("frame too narrow for the requested number of fingers");
    if (height < 32 || steps < 2) throw ParameterError("random scripts need height >= 32 and steps >= 2");
    std::mt19937_64 rng(seed);
    auto draw = [&](int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); };

    GrowthScript s;
    s.seed = seed;
    s.width = width;
    s.height = height;
    s.steps = steps;
    for (int i = 0; i < fingers; ++i) {
        FingerSeed f;
        f.name = "f" + std::to_string(i);
        f.start = {3 + 4 * i, height - 1 - draw(8)};
        f.direction = {0, -1};
        f.length = 1 + draw(20);
        const int rate = 1 + draw(2);
        const int from = 1 + draw(std::max(1, steps / 4));
        int until = std::min(steps - 1, from + draw(steps));
        const int room = f.start.y - 1 - (f.length - 1);
        until = std::min(until, from + room / rate - 1);
        s.fingers.push_back(f);
        if (from < steps && until >= from) {
            ScriptEvent ev;
            ev.step = from;
            ev.until = until;
            ev.kind = EventKind::extend_tip;
            ev.finger = f.name;
            ev.pixels = rate;
            s.events.push_back(std::move(ev));
        }
    }
    return s;
}

namespace {

ScriptEvent extend_event(std::string finger, int step, int until, int pixels = 2) {
    ScriptEvent ev;
    ev.kind = EventKind::extend_tip;
    ev.finger = std::move(finger);
    ev.step = step;
    ev.until = until;
    ev.pixels = pixels;
    return ev;
}

ScriptEvent side_event(EventKind kind, std::string finger, int step, int at, Side side, std::string name,
                       int length) {
    ScriptEvent ev;
    ev.kind = kind;
    ev.finger = std::move(finger);
    ev.step = step;
    ev.at = at;
    ev.side = side;
    ev.name = std::move(name);
    ev.length = length;
    return ev;
}

ScriptEvent hide_event(std::string finger, int step, int duration) {
    ScriptEvent ev;
    ev.kind = EventKind::delete_segment;
    ev.finger = std::move(finger);
    ev.step = step;
    ev.at = 0;
    ev.duration = duration;
    return ev;
}

GrowthScript branching(int growth_until, bool disappear) {
    GrowthScript s;
    s.seed = 1;
    s.width = 320;
    s.height = 320;
    s.steps = 40;
    s.fingers = {{"a", {40, 300}, {1, -1}, 6}, {"b", {160, 300}, {0, -1}, 6}, {"c", {280, 300}, {-1, -1}, 6}};
    const int last = s.steps - 1;
    s.events.push_back(extend_event("a", 1, std::min(last, growth_until)));
    s.events.push_back(extend_event("b", 1, std::min(last, growth_until)));
    s.events.push_back(extend_event("c", 1, std::min(last, growth_until)));
    s.events.push_back(side_event(EventKind::inject_noise_spur, "a", 8, 2, Side::right, "spur-a", 2));
    s.events.push_back(side_event(EventKind::spawn_branch, "a", 10, -2, Side::left, "a1", 1));
    s.events.push_back(side_event(EventKind::spawn_branch, "c", 16, -2, Side::right, "c1", 1));
    s.events.push_back(side_event(EventKind::inject_noise_spur, "c", 22, 3, Side::left, "spur-c", 2));
    if (disappear) {
        const int k = 25;
        s.events.push_back(extend_event("a1", 11, std::min(k - 1, growth_until)));
        s.events.push_back(extend_event("c1", 17, std::min(k - 1, growth_until)));
        s.events.push_back(hide_event("a1", k, 1));
        s.events.push_back(hide_event("c1", k, 1));
        if (growth_until > k) {
            s.events.push_back(extend_event("a1", k + 1, std::min(last, growth_until)));
            s.events.push_back(extend_event("c1", k + 1, std::min(last, growth_until)));
        }
    } else {
        if (growth_until >= 11) s.events.push_back(extend_event("a1", 11, std::min(last, growth_until)));
        if (growth_until >= 17) s.events.push_back(extend_event("c1", 17, std::min(last, growth_until)));
    }
    return s;
}

GrowthScript loop() {
    GrowthScript s;
    s.seed = 1;
    s.width = 96;
    s.height = 96;
    s.steps = 12;
    s.fingers = {{"trunk", {20, 20}, {1, 1}, 40}};
    s.events.push_back(side_event(EventKind::spawn_branch, "trunk", 5, 10, Side::left, "arm", 2));
    ScriptEvent arm = extend_event("arm", 6, 9);
    arm.path = {{1, -1}, {1, -1}, {1, 1}, {1, 1}, {1, 1}, {-1, 1}, {-1, 1}, {-1, 1}};
    arm.allow_merge = true;
    s.events.push_back(std::move(arm));
    return s;
}

}  // namespace

std::vector<std::string> preset_names() { return {"branching", "stalled", "disappearance", "loop"}; }

GrowthScript preset_script(std::string_view name) {
    if (name == "branching") return branching(39, false);
    if (name == "stalled") return branching(20, false);
    if (name == "disappearance") return branching(39, true);
    if (name == "loop") return loop();
    throw ParameterError("unknown preset '" + std::string(name) + "'");
}

}  // namespace skelevo
