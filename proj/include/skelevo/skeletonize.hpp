#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "skelevo/image_io.hpp"
#include "skelevo/pixel.hpp"

namespace skelevo {

struct BinaryMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> foreground;  // row-major, 0 or 1

    BinaryMask() = default;
    BinaryMask(int w, int h) : width(w), height(h), foreground(static_cast<std::size_t>(w) * h, 0) {}

    bool at(int x, int y) const { return foreground[static_cast<std::size_t>(y) * width + x] != 0; }
    void set(int x, int y, bool value) {
        foreground[static_cast<std::size_t>(y) * width + x] = value ? 1 : 0;
    }
    std::size_t count() const;
};

enum class Polarity {
    above,  ///< foreground where intensity > threshold
    below,  ///< foreground where intensity < threshold
};

Polarity parse_polarity(std::string_view text);
std::string_view to_string(Polarity polarity);

struct BinarizeConfig {
    int threshold = 128;
    Polarity polarity = Polarity::above;
};

/// Pointwise threshold. Throws ParameterError if threshold is outside [0, 255].
BinaryMask binarize(const Frame& frame, const BinarizeConfig& config);

/// Zhang-Suen thinning iterated to a fixed point. The result is a subset of
/// the foreground with the same number of 8-connected components: a component
/// that one parallel subiteration would erase entirely (the 2x2 block case)
/// keeps its row-major first pixel.
PixelSet thin(const BinaryMask& mask, int index = 0);

BinaryMask to_mask(const PixelSet& pixels);

/// True when the set is a fixed point of thin().
bool is_thin(const PixelSet& pixels);

/// Number of 8-connected foreground components.
std::size_t count_components(const BinaryMask& mask);

// --- sequences -------------------------------------------------------------

enum class InputFormat { automatic, png, pgm, coords };

InputFormat parse_input_format(std::string_view text);
std::string_view to_string(InputFormat format);

struct LoadConfig {
    InputFormat format = InputFormat::automatic;
    BinarizeConfig binarize;
    int jobs = 1;  ///< frames binarized and thinned in parallel
};

/// Reads the pre-skeletonized text format: a "# width height" header line
/// followed by one "x y" line per pixel.
PixelSet read_coords(const std::filesystem::path& path, int index = 0);
void write_coords(const std::filesystem::path& path, const PixelSet& pixels);
std::string format_coords(const PixelSet& pixels);

/// Files making up a sequence: a directory (lexicographic order, filtered by
/// extension) or a JSON manifest {"frames": [...]} with paths relative to it.
std::vector<std::filesystem::path> list_sequence(const std::filesystem::path& source,
                                                 InputFormat format);

/// One PixelSet per frame, indexed from 0. Raster frames are binarized and
/// thinned; coordinate files pass through unchanged. Throws InputError on
/// unreadable files or mismatched frame dimensions.
std::vector<PixelSet> load_sequence(const std::filesystem::path& source, const LoadConfig& config);

}  // namespace skelevo
