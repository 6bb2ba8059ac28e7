#pragma once

#include <png.h>

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "glyphdraw/error.hpp"

namespace glyphdraw {

/// 8-bit grayscale image, row-major.
class GlyphImage {
public:
    GlyphImage() = default;
    GlyphImage(std::size_t width, std::size_t height, std::uint8_t fill = 0)
        : width_(width), height_(height), pixels_(width * height, fill) {}
    GlyphImage(std::size_t width, std::size_t height, std::vector<std::uint8_t> pixels)
        : width_(width), height_(height), pixels_(std::move(pixels)) {
        if (pixels_.size() != width_ * height_)
            throw GeometryError("image pixel count " + std::to_string(pixels_.size()) + " != " +
                                std::to_string(width_) + "x" + std::to_string(height_));
    }

    std::size_t width() const noexcept { return width_; }
    std::size_t height() const noexcept { return height_; }

    std::uint8_t& at(std::size_t x, std::size_t y) noexcept { return pixels_[y * width_ + x]; }
    std::uint8_t at(std::size_t x, std::size_t y) const noexcept { return pixels_[y * width_ + x]; }

    std::span<std::uint8_t> pixels() noexcept { return pixels_; }
    std::span<const std::uint8_t> pixels() const noexcept { return pixels_; }

    std::size_t count_nonzero() const noexcept {
        return static_cast<std::size_t>(std::count_if(pixels_.begin(), pixels_.end(), [](auto p) { return p != 0; }));
    }

    friend bool operator==(const GlyphImage&, const GlyphImage&) = default;

private:
    std::size_t width_ = 0;
    std::size_t height_ = 0;
    std::vector<std::uint8_t> pixels_;
};

/// Pixelwise max; both images must share dimensions.
inline void max_merge(GlyphImage& into, const GlyphImage& from) {
    if (into.width() != from.width() || into.height() != from.height())
        throw GeometryError("max_merge: image sizes differ");
    auto d = into.pixels();
    auto s = from.pixels();
    for (std::size_t i = 0; i < d.size(); ++i)
        d[i] = std::max(d[i], s[i]);
}

// ---- PGM (binary P5, maxval 255) ----

inline void write_pgm(std::ostream& os, const GlyphImage& img) {
    os << "P5\n" << img.width() << ' ' << img.height() << "\n255\n";
    os.write(reinterpret_cast<const char*>(img.pixels().data()), static_cast<std::streamsize>(img.pixels().size()));
}

inline GlyphImage read_pgm(std::istream& is) {
    auto next_token = [&is]() {
        std::string tok;
        char c;
        while (is.get(c)) {
            if (c == '#') {
                std::string skip;
                std::getline(is, skip);
                continue;
            }
            if (std::isspace(static_cast<unsigned char>(c))) {
                if (!tok.empty())
                    break;
                continue;
            }
            tok.push_back(c);
        }
        return tok;
    };
    if (next_token() != "P5")
        throw InputError("PGM: expected P5 magic");
    std::size_t w = 0, h = 0, maxval = 0;
    try {
        w = std::stoul(next_token());
        h = std::stoul(next_token());
        maxval = std::stoul(next_token());
    } catch (const std::exception&) {
        throw InputError("PGM: malformed header");
    }
    if (maxval != 255)
        throw InputError("PGM: only maxval 255 is supported");
    std::vector<std::uint8_t> px(w * h);
    is.read(reinterpret_cast<char*>(px.data()), static_cast<std::streamsize>(px.size()));
    if (static_cast<std::size_t>(is.gcount()) != px.size())
        throw InputError("PGM: truncated pixel data");
    return GlyphImage(w, h, std::move(px));
}

// ---- PNG (8-bit grayscale) via libpng ----

namespace detail {

struct FileCloser {
    void operator()(std::FILE* f) const noexcept {
        if (f)
            std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] inline void png_error_fn(png_structp, png_const_charp msg) { throw InputError(std::string("PNG: ") + msg); }
inline void png_warning_fn(png_structp, png_const_charp) {}

}  // namespace detail

inline void write_png(const std::filesystem::path& path, const GlyphImage& img) {
    detail::FilePtr fp(std::fopen(path.string().c_str(), "wb"));
    if (!fp)
        throw InputError("cannot open for writing: " + path.string());
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, detail::png_error_fn, detail::png_warning_fn);
    png_infop info = png_create_info_struct(png);
    struct Guard {
        png_structp* p;
        png_infop* i;
        ~Guard() { png_destroy_write_struct(p, i); }
    } guard{&png, &info};
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(img.width()), static_cast<png_uint_32>(img.height()), 8,
                 PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (std::size_t y = 0; y < img.height(); ++y)
        png_write_row(png, img.pixels().data() + y * img.width());
    png_write_end(png, nullptr);
}

/// Reads any PNG and converts it to 8-bit grayscale.
inline GlyphImage read_png(const std::filesystem::path& path) {
    detail::FilePtr fp(std::fopen(path.string().c_str(), "rb"));
    if (!fp)
        throw InputError("cannot open: " + path.string());
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, detail::png_error_fn, detail::png_warning_fn);
    png_infop info = png_create_info_struct(png);
    struct Guard {
        png_structp* p;
        png_infop* i;
        ~Guard() { png_destroy_read_struct(p, i, nullptr); }
    } guard{&png, &info};
    png_init_io(png, fp.get());
    png_read_info(png, info);
    const auto color = png_get_color_type(png, info);
    const auto depth = png_get_bit_depth(png, info);
    if (depth == 16)
        png_set_strip_16(png);
    if (color == PNG_COLOR_TYPE_PALETTE)
        png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8)
        png_set_expand_gray_1_2_4_to_8(png);
    if (color & PNG_COLOR_MASK_COLOR || color == PNG_COLOR_TYPE_PALETTE)
        png_set_rgb_to_gray_fixed(png, 1, -1, -1);
    if (color & PNG_COLOR_MASK_ALPHA)
        png_set_strip_alpha(png);
    png_read_update_info(png, info);
    const std::size_t w = png_get_image_width(png, info);
    const std::size_t h = png_get_image_height(png, info);
    if (png_get_rowbytes(png, info) != w)
        throw InputError("PNG: unsupported pixel layout");
    std::vector<std::uint8_t> px(w * h);
    std::vector<png_bytep> rows(h);
    for (std::size_t y = 0; y < h; ++y)
        rows[y] = px.data() + y * w;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    return GlyphImage(w, h, std::move(px));
}

/// Chooses PNG or PGM from the file extension.
inline void save_image(const std::filesystem::path& path, const GlyphImage& img) {
    if (path.extension() == ".png") {
        write_png(path, img);
        return;
    }
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw InputError("cannot open for writing: " + path.string());
    write_pgm(os, img);
}

inline GlyphImage load_image(const std::filesystem::path& path) {
    if (path.extension() == ".png")
        return read_png(path);
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw InputError("cannot open: " + path.string());
    return read_pgm(is);
}

}  // namespace glyphdraw
