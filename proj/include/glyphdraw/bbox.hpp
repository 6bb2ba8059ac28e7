#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace glyphdraw {

/// Axis-aligned text box in pixels. (x1, y1) is the top-left corner and
/// (x2, y2) the bottom-right; the box covers columns [x1, x2) and rows
/// [y1, y2).
struct BBox {
    std::int64_t x1 = 0, y1 = 0, x2 = 0, y2 = 0;
    std::string text;
    std::optional<double> confidence;

    std::int64_t width() const noexcept { return x2 - x1; }
    std::int64_t height() const noexcept { return y2 - y1; }
    std::int64_t area() const noexcept { return width() * height(); }

    /// Ordered corners and non-negative coordinates.
    bool well_formed() const noexcept { return x1 >= 0 && y1 >= 0 && x1 < x2 && y1 < y2; }

    bool inside(std::int64_t canvas_w, std::int64_t canvas_h) const noexcept {
        return well_formed() && x2 <= canvas_w && y2 <= canvas_h;
    }

    bool same_geometry(const BBox& o) const noexcept { return x1 == o.x1 && y1 == o.y1 && x2 == o.x2 && y2 == o.y2; }

    friend bool operator==(const BBox&, const BBox&) = default;
};

/// True when the interiors intersect; boxes that only touch do not overlap.
inline bool overlaps(const BBox& a, const BBox& b) noexcept {
    return a.x1 < b.x2 && b.x1 < a.x2 && a.y1 < b.y2 && b.y1 < a.y2;
}

}  // namespace glyphdraw
