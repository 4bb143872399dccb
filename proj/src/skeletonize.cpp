#include "skelevo/skeletonize.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "skelevo/errors.hpp"
#include "skelevo/parallel.hpp"

namespace skelevo {

std::size_t BinaryMask::count() const {
    return static_cast<std::size_t>(std::count(foreground.begin(), foreground.end(), 1));
}

Polarity parse_polarity(std::string_view text) {
    if (text == "above") return Polarity::above;
    if (text == "below") return Polarity::below;
    throw ParameterError("unknown polarity '" + std::string(text) + "' (expected above|below)");
}

std::string_view to_string(Polarity polarity) {
    return polarity == Polarity::above ? "above" : "below";
}

BinaryMask binarize(const Frame& frame, const BinarizeConfig& config) {
    if (config.threshold < 0 || config.threshold > 255) {
        throw ParameterError("threshold " + std::to_string(config.threshold) + " outside [0, 255]");
    }
    BinaryMask mask(frame.width, frame.height);
    for (std::size_t i = 0; i < frame.values.size(); ++i) {
        const int v = frame.values[i];
        const bool fg = config.polarity == Polarity::above ? v > config.threshold : v < config.threshold;
        mask.foreground[i] = fg ? 1 : 0;
    }
    return mask;
}

namespace {

constexpr std::uint8_t kBackground = 0;
constexpr std::uint8_t kForeground = 1;
constexpr std::uint8_t kMarked = 2;  // foreground scheduled for deletion

// Zero-padded copy of a mask so that every foreground pixel has 8 readable
// neighbors; the padding is the background ring outside the image.
class PaddedGrid {
public:
    explicit PaddedGrid(const BinaryMask& mask)
        : stride_(mask.width + 2),
          cells_(static_cast<std::size_t>(mask.width + 2) * (mask.height + 2), kBackground) {
        for (int y = 0; y < mask.height; ++y) {
            for (int x = 0; x < mask.width; ++x) {
                if (mask.at(x, y)) cells_[index(x, y)] = kForeground;
            }
        }
    }

    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y + 1) * stride_ + static_cast<std::size_t>(x + 1);
    }
    Pixel pixel(std::size_t i) const {
        return {static_cast<int>(i % stride_) - 1, static_cast<int>(i / stride_) - 1};
    }
    std::uint8_t& operator[](std::size_t i) { return cells_[i]; }
    std::uint8_t operator[](std::size_t i) const { return cells_[i]; }
    std::ptrdiff_t stride() const { return stride_; }

    // P2..P9 in the classical clockwise order starting north.
    std::array<std::ptrdiff_t, 8> ring() const {
        const std::ptrdiff_t s = stride_;
        return {-s, -s + 1, 1, s + 1, s, s - 1, -1, -s - 1};
    }

private:
    std::ptrdiff_t stride_;
    std::vector<std::uint8_t> cells_;
};

bool is_deletable(const PaddedGrid& grid, std::size_t i, int subiteration) {
    const auto ring = grid.ring();
    std::array<int, 8> p{};
    int neighbors = 0;
    for (int k = 0; k < 8; ++k) {
        p[k] = grid[i + ring[k]] != kBackground ? 1 : 0;
        neighbors += p[k];
    }
    if (neighbors < 2 || neighbors > 6) return false;
    int transitions = 0;
    for (int k = 0; k < 8; ++k) {
        if (p[k] == 0 && p[(k + 1) % 8] == 1) ++transitions;
    }
    if (transitions != 1) return false;
    // p[0]=P2 (N), p[2]=P4 (E), p[4]=P6 (S), p[6]=P8 (W)
    if (subiteration == 0) return p[0] * p[2] * p[4] == 0 && p[2] * p[4] * p[6] == 0;
    return p[0] * p[2] * p[6] == 0 && p[0] * p[4] * p[6] == 0;
}

// A marked pixel whose component contains no unmarked pixel would vanish.
// Keeps the component's row-major first pixel in that case.
void protect_vanishing_components(PaddedGrid& grid, const std::vector<std::size_t>& marked) {
    const auto ring = grid.ring();
    auto has_survivor_neighbor = [&](std::size_t i) {
        return std::any_of(ring.begin(), ring.end(), [&](auto off) { return grid[i + off] == kForeground; });
    };
    std::unordered_set<std::size_t> visited;
    std::vector<std::size_t> stack;
    for (std::size_t start : marked) {
        if (grid[start] != kMarked || has_survivor_neighbor(start)) continue;

        visited.clear();
        visited.insert(start);
        stack.assign(1, start);
        bool survives = false;
        while (!stack.empty() && !survives) {
            const std::size_t cur = stack.back();
            stack.pop_back();
            for (auto off : ring) {
                const std::size_t n = cur + off;
                if (grid[n] == kForeground) {
                    survives = true;
                    break;
                }
                if (grid[n] == kMarked && visited.insert(n).second) stack.push_back(n);
            }
        }
        if (!survives) {
            // Row-major first pixel is the smallest padded index.
            grid[*std::min_element(visited.begin(), visited.end())] = kForeground;
        }
    }
}

}  // namespace

PixelSet thin(const BinaryMask& mask, int index) {
    std::vector<Pixel> result;
    if (mask.width < 3 || mask.height < 3) {
        for (int y = 0; y < mask.height; ++y) {
            for (int x = 0; x < mask.width; ++x) {
                if (mask.at(x, y)) result.push_back({x, y});
            }
        }
        return PixelSet(mask.width, mask.height, std::move(result), index);
    }

    PaddedGrid grid(mask);
    std::vector<std::size_t> live;
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            if (mask.at(x, y)) live.push_back(grid.index(x, y));
        }
    }

    std::vector<std::size_t> marked;
    bool changed = true;
    while (changed) {
        changed = false;
        for (int sub = 0; sub < 2; ++sub) {
            marked.clear();
            for (std::size_t i : live) {
                if (is_deletable(grid, i, sub)) marked.push_back(i);
            }
            if (marked.empty()) continue;
            for (std::size_t i : marked) grid[i] = kMarked;
            protect_vanishing_components(grid, marked);
            std::size_t removed = 0;
            for (std::size_t i : marked) {
                if (grid[i] == kMarked) {
                    grid[i] = kBackground;
                    ++removed;
                }
            }
            if (removed == 0) continue;
            changed = true;
            std::erase_if(live, [&](std::size_t i) { return grid[i] == kBackground; });
        }
    }

    result.reserve(live.size());
    for (std::size_t i : live) result.push_back(grid.pixel(i));
    return PixelSet(mask.width, mask.height, std::move(result), index);
}

BinaryMask to_mask(const PixelSet& pixels) {
    BinaryMask mask(pixels.width(), pixels.height());
    for (Pixel p : pixels.pixels()) mask.set(p.x, p.y, true);
    return mask;
}

bool is_thin(const PixelSet& pixels) {
    return thin(to_mask(pixels), pixels.index()).pixels().size() == pixels.size();
}

std::size_t count_components(const BinaryMask& mask) {
    std::vector<std::uint8_t> seen(mask.foreground.size(), 0);
    std::vector<Pixel> stack;
    std::size_t components = 0;
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * mask.width + x;
            if (!mask.foreground[i] || seen[i]) continue;
            ++components;
            seen[i] = 1;
            stack.push_back({x, y});
            while (!stack.empty()) {
                const Pixel p = stack.back();
                stack.pop_back();
                for (Pixel off : kNeighborOffsets) {
                    const Pixel n{p.x + off.x, p.y + off.y};
                    if (n.x < 0 || n.y < 0 || n.x >= mask.width || n.y >= mask.height) continue;
                    const std::size_t j = static_cast<std::size_t>(n.y) * mask.width + n.x;
                    if (mask.foreground[j] && !seen[j]) {
                        seen[j] = 1;
                        stack.push_back(n);
                    }
                }
            }
        }
    }
    return components;
}

// --- sequences -------------------------------------------------------------

InputFormat parse_input_format(std::string_view text) {
    if (text == "auto") return InputFormat::automatic;
    if (text == "png") return InputFormat::png;
    if (text == "pgm") return InputFormat::pgm;
    if (text == "coords") return InputFormat::coords;
    throw ParameterError("unknown input format '" + std::string(text) + "' (expected png|pgm|coords)");
}

std::string_view to_string(InputFormat format) {
    switch (format) {
        case InputFormat::automatic: return "auto";
        case InputFormat::png: return "png";
        case InputFormat::pgm: return "pgm";
        case InputFormat::coords: return "coords";
    }
    return "auto";
}

namespace {

std::string lower_extension(const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext;
}

InputFormat format_from_extension(const std::filesystem::path& path) {
    const auto ext = lower_extension(path);
    if (ext == ".png") return InputFormat::png;
    if (ext == ".pgm") return InputFormat::pgm;
    if (ext == ".txt" || ext == ".coords") return InputFormat::coords;
    return InputFormat::automatic;
}

bool parse_int(std::string_view token, int& out) {
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
    return ec == std::errc{} && ptr == token.data() + token.size();
}

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        const std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
        if (i > start) tokens.push_back(line.substr(start, i - start));
    }
    return tokens;
}

}  // namespace

PixelSet read_coords(const std::filesystem::path& path, int index) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || line.empty() || line[0] != '#') {
        throw InputError(path.string() + ": missing '# width height' header");
    }
    const auto header = split_ws(std::string_view(line).substr(1));
    int width = 0;
    int height = 0;
    if (header.size() != 2 || !parse_int(header[0], width) || !parse_int(header[1], height) ||
        width <= 0 || height <= 0) {
        throw InputError(path.string() + ": malformed header '" + line + "'");
    }

    std::vector<Pixel> pixels;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        const auto tokens = split_ws(line);
        if (tokens.empty() || tokens[0].front() == '#') continue;
        Pixel p;
        if (tokens.size() != 2 || !parse_int(tokens[0], p.x) || !parse_int(tokens[1], p.y)) {
            throw InputError(path.string() + ":" + std::to_string(line_no) + ": expected 'x y'");
        }
        pixels.push_back(p);
    }
    try {
        return PixelSet(width, height, std::move(pixels), index);
    } catch (const InputError& e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

std::string format_coords(const PixelSet& pixels) {
    std::ostringstream out;
    out << "# " << pixels.width() << ' ' << pixels.height() << '\n';
    for (Pixel p : pixels.pixels()) out << p.x << ' ' << p.y << '\n';
    return out.str();
}

void write_coords(const std::filesystem::path& path, const PixelSet& pixels) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path.string());
    out << format_coords(pixels);
}

std::vector<std::filesystem::path> list_sequence(const std::filesystem::path& source,
                                                 InputFormat format) {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (!fs::exists(source, ec)) throw InputError("input " + source.string() + " does not exist");

    std::vector<fs::path> files;
    if (fs::is_directory(source)) {
        std::vector<fs::path> candidates[4];
        for (const auto& entry : fs::directory_iterator(source)) {
            if (!entry.is_regular_file()) continue;
            const auto kind = format_from_extension(entry.path());
            candidates[static_cast<int>(kind)].push_back(entry.path());
        }
        if (format == InputFormat::automatic) {
            int present = 0;
            for (auto kind : {InputFormat::png, InputFormat::pgm, InputFormat::coords}) {
                if (!candidates[static_cast<int>(kind)].empty()) {
                    format = kind;
                    ++present;
                }
            }
            if (present > 1) {
                throw InputError(source.string() + ": mixed frame formats; pass an explicit format");
            }
        }
        if (format != InputFormat::automatic) files = std::move(candidates[static_cast<int>(format)]);
        std::sort(files.begin(), files.end());
    } else if (lower_extension(source) == ".json") {
        std::ifstream in(source);
        if (!in) throw InputError("cannot open " + source.string());
        nlohmann::json manifest;
        try {
            in >> manifest;
        } catch (const nlohmann::json::exception& e) {
            throw InputError(source.string() + ": " + e.what());
        }
        if (!manifest.contains("frames") || !manifest["frames"].is_array()) {
            throw InputError(source.string() + ": manifest needs a \"frames\" array");
        }
        for (const auto& entry : manifest["frames"]) {
            if (!entry.is_string()) throw InputError(source.string() + ": frame entries must be strings");
            fs::path p = entry.get<std::string>();
            files.push_back(p.is_absolute() ? p : source.parent_path() / p);
        }
    } else {
        files.push_back(source);
    }
    if (files.empty()) throw InputError(source.string() + ": no frames found");
    return files;
}

std::vector<PixelSet> load_sequence(const std::filesystem::path& source, const LoadConfig& config) {
    const auto files = list_sequence(source, config.format);
    std::vector<PixelSet> sequence(files.size());
    parallel_for(files.size(), config.jobs, [&](std::size_t i) {
        const auto& file = files[i];
        InputFormat kind = config.format == InputFormat::automatic ? format_from_extension(file) : config.format;
        const int index = static_cast<int>(i);
        switch (kind) {
            case InputFormat::coords:
                sequence[i] = read_coords(file, index);
                break;
            case InputFormat::png:
            case InputFormat::pgm: {
                Frame frame = kind == InputFormat::png ? read_png(file) : read_pgm(file);
                frame.index = index;
                sequence[i] = thin(binarize(frame, config.binarize), index);
                break;
            }
            case InputFormat::automatic:
                throw InputError(file.string() + ": cannot infer frame format from extension");
        }
    });
    for (std::size_t i = 1; i < sequence.size(); ++i) {
        if (sequence[i].width() != sequence[0].width() || sequence[i].height() != sequence[0].height()) {
            throw InputError("dimension mismatch: " + files[i].string() + " is " +
                             std::to_string(sequence[i].width()) + "x" + std::to_string(sequence[i].height()) +
                             " but " + files[0].string() + " is " + std::to_string(sequence[0].width()) +
                             "x" + std::to_string(sequence[0].height()));
        }
    }
    return sequence;
}

}  // namespace skelevo
