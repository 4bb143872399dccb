#include "skelevo/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <string>

#include "skelevo/errors.hpp"

namespace skelevo {

namespace {

// Reads the next header token of a PNM file, skipping whitespace and comments.
std::string next_token(std::istream& in) {
    std::string token;
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (!std::isspace(c)) {
            break;
        }
        c = in.get();
    }
    while (c != EOF && !std::isspace(c) && c != '#') {
        token.push_back(static_cast<char>(c));
        c = in.get();
    }
    // The single whitespace after maxval is consumed here, as the format requires.
    return token;
}

int parse_positive(const std::string& token, const std::filesystem::path& path, const char* what) {
    try {
        std::size_t used = 0;
        const int value = std::stoi(token, &used);
        if (used != token.size() || value <= 0) throw std::invalid_argument(what);
        return value;
    } catch (const std::logic_error&) {
        throw InputError(path.string() + ": invalid PGM " + what + " '" + token + "'");
    }
}

}  // namespace

Frame read_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path.string());
    if (next_token(in) != "P5") throw InputError(path.string() + ": not a binary (P5) PGM file");
    Frame frame;
    frame.width = parse_positive(next_token(in), path, "width");
    frame.height = parse_positive(next_token(in), path, "height");
    const int maxval = parse_positive(next_token(in), path, "maxval");
    if (maxval > 255) throw InputError(path.string() + ": 16-bit PGM is not supported");

    frame.values.resize(static_cast<std::size_t>(frame.width) * frame.height);
    in.read(reinterpret_cast<char*>(frame.values.data()),
            static_cast<std::streamsize>(frame.values.size()));
    if (in.gcount() != static_cast<std::streamsize>(frame.values.size())) {
        throw InputError(path.string() + ": truncated PGM pixel data");
    }
    if (maxval != 255) {
        for (auto& v : frame.values) {
            v = static_cast<std::uint8_t>(std::min<int>(v, maxval) * 255 / maxval);
        }
    }
    return frame;
}

void write_pgm(const std::filesystem::path& path, const Frame& frame) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path.string());
    out << "P5\n" << frame.width << ' ' << frame.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(frame.values.data()),
              static_cast<std::streamsize>(frame.values.size()));
}

namespace {

template <typename Pixels>
void read_png_as(const std::filesystem::path& path, png_uint_32 format, int& width, int& height,
                 Pixels& buffer) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&image, path.string().c_str())) {
        throw InputError("cannot read PNG " + path.string() + ": " + image.message);
    }
    image.format = format;
    width = static_cast<int>(image.width);
    height = static_cast<int>(image.height);
    buffer.resize(static_cast<std::size_t>(width) * height);
    if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
        png_image_free(&image);
        throw InputError("cannot decode PNG " + path.string() + ": " + image.message);
    }
}

void write_png_raw(const std::filesystem::path& path, int width, int height, png_uint_32 format,
                   const void* data) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(width);
    image.height = static_cast<png_uint_32>(height);
    image.format = format;
    if (!png_image_write_to_file(&image, path.string().c_str(), 0, data, 0, nullptr)) {
        throw InputError("cannot write PNG " + path.string() + ": " + image.message);
    }
}

}  // namespace

Frame read_png(const std::filesystem::path& path) {
    Frame frame;
    read_png_as(path, PNG_FORMAT_GRAY, frame.width, frame.height, frame.values);
    return frame;
}

RgbImage read_png_rgb(const std::filesystem::path& path) {
    RgbImage image;
    read_png_as(path, PNG_FORMAT_RGB, image.width, image.height, image.pixels);
    return image;
}

void write_png(const std::filesystem::path& path, const Frame& frame) {
    write_png_raw(path, frame.width, frame.height, PNG_FORMAT_GRAY, frame.values.data());
}

void write_png(const std::filesystem::path& path, const RgbImage& image) {
    static_assert(sizeof(std::array<std::uint8_t, 3>) == 3);
    write_png_raw(path, image.width, image.height, PNG_FORMAT_RGB, image.pixels.data());
}

}  // namespace skelevo
