#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "glyphdraw/bbox.hpp"
#include "glyphdraw/error.hpp"
#include "glyphdraw/font.hpp"
#include "glyphdraw/image.hpp"
#include "glyphdraw/utf8.hpp"

namespace glyphdraw {

/// fixed_font renders a fixed font straight into the box; canny_of_real
/// renders the chosen font and keeps only its Canny edges.
enum class RenderMode { fixed_font, canny_of_real };

struct RenderSpec {
    std::string text;
    BBox bbox;
    const BitmapFont* font = &BitmapFont::builtin();
    RenderMode mode = RenderMode::fixed_font;
};

struct CannyThresholds {
    double low = 50.0;
    double high = 150.0;
};

namespace detail {

inline void check_bbox(const BBox& b, std::size_t canvas_w, std::size_t canvas_h, const std::string& who) {
    if (!b.inside(static_cast<std::int64_t>(canvas_w), static_cast<std::int64_t>(canvas_h)))
        throw GeometryError(who + ": box (" + std::to_string(b.x1) + "," + std::to_string(b.y1) + ")-(" +
                            std::to_string(b.x2) + "," + std::to_string(b.y2) + ") is not inside the " +
                            std::to_string(canvas_w) + "x" + std::to_string(canvas_h) + " canvas");
}

// Native-size text scaled uniformly to fit a bw×bh box and centered in it,
// nearest-neighbour sampling. Returns a bw×bh image.
inline GlyphImage fit_text(const RenderSpec& spec, std::vector<RenderWarning>* warnings) {
    const BitmapFont& font = spec.font ? *spec.font : BitmapFont::builtin();
    const GlyphImage line = font.render_line(utf8::decode(spec.text), warnings);
    const auto bw = static_cast<std::size_t>(spec.bbox.width());
    const auto bh = static_cast<std::size_t>(spec.bbox.height());
    const std::size_t tw = line.width(), th = line.height();
    // Scale = min(bw/tw, bh/th), kept rational so the output is exact.
    std::size_t ow, oh;
    if (bw * th <= bh * tw) {
        ow = bw;
        oh = th * bw / tw;
    } else {
        oh = bh;
        ow = tw * bh / th;
    }
    GlyphImage out(bw, bh);
    const std::size_t ox = (bw - ow) / 2, oy = (bh - oh) / 2;
    for (std::size_t y = 0; y < oh; ++y) {
        const std::size_t sy = ((2 * y + 1) * th) / (2 * oh);
        for (std::size_t x = 0; x < ow; ++x) {
            const std::size_t sx = ((2 * x + 1) * tw) / (2 * ow);
            out.at(ox + x, oy + y) = line.at(sx, sy);
        }
    }
    return out;
}

inline void paste(GlyphImage& canvas, const GlyphImage& crop, std::size_t x0, std::size_t y0) {
    for (std::size_t y = 0; y < crop.height(); ++y)
        for (std::size_t x = 0; x < crop.width(); ++x)
            canvas.at(x0 + x, y0 + y) = std::max(canvas.at(x0 + x, y0 + y), crop.at(x, y));
}

inline std::array<double, 5> gaussian_kernel_5(double sigma) {
    std::array<double, 5> k{};
    double sum = 0.0;
    for (int i = -2; i <= 2; ++i) {
        k[static_cast<std::size_t>(i + 2)] = std::exp(-(i * i) / (2.0 * sigma * sigma));
        sum += k[static_cast<std::size_t>(i + 2)];
    }
    for (double& v : k)
        v /= sum;
    return k;
}

}  // namespace detail

/// Fixed-font rendering of spec.text into spec.bbox on an otherwise black
/// canvas. Glyphs missing from the font are drawn as tofu boxes and
/// listed in `warnings`.
inline GlyphImage raster_text(const RenderSpec& spec, std::size_t canvas_w, std::size_t canvas_h,
                              std::vector<RenderWarning>* warnings = nullptr) {
    if (spec.mode != RenderMode::fixed_font)
        throw ConfigError("raster_text: spec mode must be fixed_font");
    if (spec.text.empty())
        throw InputError("raster_text: empty text");
    detail::check_bbox(spec.bbox, canvas_w, canvas_h, "raster_text");
    GlyphImage canvas(canvas_w, canvas_h);
    detail::paste(canvas, detail::fit_text(spec, warnings), static_cast<std::size_t>(spec.bbox.x1),
                  static_cast<std::size_t>(spec.bbox.y1));
    return canvas;
}

/// Canny edge detector: 5×5 Gaussian blur (σ = 1.4), 3×3 Sobel gradients,
/// non-maximum suppression over four quantized directions, and
/// double-threshold hysteresis with 8-connectivity. Gradient magnitude is
/// normalized so that an ideal axis-aligned step of height h measures h
/// after smoothing, which puts the thresholds on the 0–255 scale. A pixel
/// is a candidate above `low` and strong above `high`. Output pixels are 0
/// or 255.
inline GlyphImage canny_edges(const GlyphImage& img, double low = 50.0, double high = 150.0) {
    if (img.width() < 3 || img.height() < 3)
        throw GeometryError("canny_edges: image must be at least 3x3");
    if (!(low < high))
        throw ConfigError("canny_edges: low threshold must be below high threshold");
    const auto w = static_cast<std::ptrdiff_t>(img.width());
    const auto h = static_cast<std::ptrdiff_t>(img.height());
    auto idx = [w](std::ptrdiff_t x, std::ptrdiff_t y) { return static_cast<std::size_t>(y * w + x); };
    auto cx = [w](std::ptrdiff_t x) { return std::clamp<std::ptrdiff_t>(x, 0, w - 1); };
    auto cy = [h](std::ptrdiff_t y) { return std::clamp<std::ptrdiff_t>(y, 0, h - 1); };

    // Separable blur, replicated borders.
    const auto k = detail::gaussian_kernel_5(1.4);
    std::vector<double> tmp(img.pixels().size()), blur(img.pixels().size());
    for (std::ptrdiff_t y = 0; y < h; ++y)
        for (std::ptrdiff_t x = 0; x < w; ++x) {
            double s = 0.0;
            for (std::ptrdiff_t d = -2; d <= 2; ++d)
                s += k[static_cast<std::size_t>(d + 2)] * img.pixels()[idx(cx(x + d), y)];
            tmp[idx(x, y)] = s;
        }
    for (std::ptrdiff_t y = 0; y < h; ++y)
        for (std::ptrdiff_t x = 0; x < w; ++x) {
            double s = 0.0;
            for (std::ptrdiff_t d = -2; d <= 2; ++d)
                s += k[static_cast<std::size_t>(d + 2)] * tmp[idx(x, cy(y + d))];
            blur[idx(x, y)] = s;
        }

    // Sobel response to a smoothed unit step, peak value: 4 · (k[1] + k[2]).
    const double step_gain = 4.0 * (k[1] + k[2]);
    std::vector<double> gx(blur.size()), gy(blur.size()), mag(blur.size());
    for (std::ptrdiff_t y = 0; y < h; ++y)
        for (std::ptrdiff_t x = 0; x < w; ++x) {
            auto b = [&](std::ptrdiff_t dx, std::ptrdiff_t dy) { return blur[idx(cx(x + dx), cy(y + dy))]; };
            const double sx = (b(1, -1) + 2 * b(1, 0) + b(1, 1)) - (b(-1, -1) + 2 * b(-1, 0) + b(-1, 1));
            const double sy = (b(-1, 1) + 2 * b(0, 1) + b(1, 1)) - (b(-1, -1) + 2 * b(0, -1) + b(1, -1));
            gx[idx(x, y)] = sx;
            gy[idx(x, y)] = sy;
            // Quantized so that mirror-symmetric plateaus compare as exact ties.
            mag[idx(x, y)] = std::round(std::sqrt(sx * sx + sy * sy) / step_gain * 1e6) / 1e6;
        }

    // Non-maximum suppression. Magnitude outside the image counts as zero.
    // Ties keep the pixel on the left/top side of a plateau.
    auto m_at = [&](std::ptrdiff_t x, std::ptrdiff_t y) {
        return (x < 0 || y < 0 || x >= w || y >= h) ? 0.0 : mag[idx(x, y)];
    };
    const double tan22 = std::tan(std::numbers::pi / 8.0);
    const double tan67 = std::tan(3.0 * std::numbers::pi / 8.0);
    enum : std::uint8_t { none = 0, weak = 1, strong = 2 };
    std::vector<std::uint8_t> cls(blur.size(), none);
    for (std::ptrdiff_t y = 0; y < h; ++y)
        for (std::ptrdiff_t x = 0; x < w; ++x) {
            const double m = mag[idx(x, y)];
            if (!(m > low))
                continue;
            const double ax = std::abs(gx[idx(x, y)]), ay = std::abs(gy[idx(x, y)]);
            bool keep;
            if (ay < ax * tan22) {
                keep = m > m_at(x - 1, y) && m >= m_at(x + 1, y);
            } else if (ay > ax * tan67) {
                keep = m > m_at(x, y - 1) && m >= m_at(x, y + 1);
            } else {
                const std::ptrdiff_t s = (gx[idx(x, y)] * gy[idx(x, y)] < 0) ? -1 : 1;
                keep = m > m_at(x - s, y - 1) && m > m_at(x + s, y + 1);
            }
            if (keep)
                cls[idx(x, y)] = m > high ? strong : weak;
        }

    GlyphImage out(img.width(), img.height());
    std::vector<std::size_t> stack;
    for (std::size_t i = 0; i < cls.size(); ++i) {
        if (cls[i] != strong || out.pixels()[i])
            continue;
        out.pixels()[i] = 255;
        stack.push_back(i);
        while (!stack.empty()) {
            const std::size_t p = stack.back();
            stack.pop_back();
            const auto px = static_cast<std::ptrdiff_t>(p) % w, py = static_cast<std::ptrdiff_t>(p) / w;
            for (std::ptrdiff_t dy = -1; dy <= 1; ++dy)
                for (std::ptrdiff_t dx = -1; dx <= 1; ++dx) {
                    const std::ptrdiff_t nx = px + dx, ny = py + dy;
                    if (nx < 0 || ny < 0 || nx >= w || ny >= h)
                        continue;
                    const std::size_t q = idx(nx, ny);
                    if (cls[q] != none && !out.pixels()[q]) {
                        out.pixels()[q] = 255;
                        stack.push_back(q);
                    }
                }
        }
    }
    return out;
}

/// Condition image for one spec, either mode.
inline GlyphImage render_spec(const RenderSpec& spec, std::size_t canvas_w, std::size_t canvas_h,
                              const CannyThresholds& canny = {}, std::vector<RenderWarning>* warnings = nullptr) {
    if (spec.mode == RenderMode::fixed_font)
        return raster_text(spec, canvas_w, canvas_h, warnings);
    if (spec.text.empty())
        throw InputError("render_spec: empty text");
    detail::check_bbox(spec.bbox, canvas_w, canvas_h, "render_spec");
    GlyphImage canvas(canvas_w, canvas_h);
    const GlyphImage crop = detail::fit_text(spec, warnings);
    detail::paste(canvas, canny_edges(crop, canny.low, canny.high), static_cast<std::size_t>(spec.bbox.x1),
                  static_cast<std::size_t>(spec.bbox.y1));
    return canvas;
}

/// Full-canvas ControlNet condition: every spec rendered in its own mode
/// and merged by pixelwise max. Only the spec texts are drawn; captions
/// never enter the image.
inline GlyphImage compose_condition(std::span<const RenderSpec> specs, std::size_t canvas_w, std::size_t canvas_h,
                                    const CannyThresholds& canny = {}, std::vector<RenderWarning>* warnings = nullptr) {
    for (std::size_t i = 0; i < specs.size(); ++i)
        detail::check_bbox(specs[i].bbox, canvas_w, canvas_h, "compose_condition: spec " + std::to_string(i));
    GlyphImage canvas(canvas_w, canvas_h);
    for (const auto& spec : specs)
        max_merge(canvas, render_spec(spec, canvas_w, canvas_h, canny, warnings));
    return canvas;
}

/// 255 over every box whose area is below ratio_threshold of the canvas.
/// Boxes are clipped to the canvas.
inline GlyphImage emit_small_text_mask(std::span<const BBox> boxes, std::size_t canvas_w, std::size_t canvas_h,
                                       double ratio_threshold = 0.001) {
    if (!(ratio_threshold > 0.0 && ratio_threshold < 1.0))
        throw DomainError("emit_small_text_mask: ratio threshold must lie in (0, 1)");
    GlyphImage mask(canvas_w, canvas_h);
    const double canvas_area = static_cast<double>(canvas_w) * static_cast<double>(canvas_h);
    for (const auto& b : boxes) {
        if (!b.well_formed() || static_cast<double>(b.area()) >= ratio_threshold * canvas_area)
            continue;
        const auto x2 = std::min<std::int64_t>(b.x2, static_cast<std::int64_t>(canvas_w));
        const auto y2 = std::min<std::int64_t>(b.y2, static_cast<std::int64_t>(canvas_h));
        for (std::int64_t y = b.y1; y < y2; ++y)
            for (std::int64_t x = b.x1; x < x2; ++x)
                mask.at(static_cast<std::size_t>(x), static_cast<std::size_t>(y)) = 255;
    }
    return mask;
}

}  // namespace glyphdraw
