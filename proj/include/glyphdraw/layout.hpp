#pragma once

// Layout instruction data for the layout LLM, its output validator, and
// the rule-based fallback used when a prediction fails validation.
//
// Output grammar, one line per box, lines joined by '\n' with no trailing
// newline:
//
//   two-corner modes (3, 4):   "<text>"|(x1,y1)|(x2,y2)
//   four-corner modes (1, 2):  "<text>"|(x1,y1)|(x2,y1)|(x2,y2)|(x1,y2)
//
// Inside <text>, '"' and '\' are written as \" and \\, and a newline as \n.
// Coordinates are non-negative decimal integers without leading zeros.
// Modes 2 and 4 carry per-mille coordinates in [0, 1000].

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "glyphdraw/bbox.hpp"
#include "glyphdraw/error.hpp"
#include "glyphdraw/record.hpp"
#include "glyphdraw/rng.hpp"
#include "glyphdraw/utf8.hpp"

namespace glyphdraw {

/// The four instruction task modes, numbered as in the training data.
enum class TaskMode : int {
    four_corner_pixel = 1,
    four_corner_normalized = 2,
    two_corner_pixel = 3,
    two_corner_normalized = 4,
};

inline TaskMode task_mode_from_int(int m) {
    if (m < 1 || m > 4)
        throw ConfigError("task mode must be 1, 2, 3 or 4, got " + std::to_string(m));
    return static_cast<TaskMode>(m);
}

constexpr bool is_normalized(TaskMode m) noexcept {
    return m == TaskMode::four_corner_normalized || m == TaskMode::two_corner_normalized;
}
constexpr bool has_four_corners(TaskMode m) noexcept {
    return m == TaskMode::four_corner_pixel || m == TaskMode::four_corner_normalized;
}

inline constexpr std::int64_t normalization_base = 1000;

struct LayoutInstruction {
    TaskMode mode = TaskMode::two_corner_pixel;
    std::string input_text;
    std::string output_text;

    friend bool operator==(const LayoutInstruction&, const LayoutInstruction&) = default;
};

struct Layout {
    std::int64_t canvas_w = 0;
    std::int64_t canvas_h = 0;
    std::vector<BBox> boxes;

    friend bool operator==(const Layout&, const Layout&) = default;
};

// ---- quoted spans ----

/// Maximal substrings enclosed in straight double quotes or CJK corner
/// brackets (「」 and 『』), in order of appearance. Quotes nest: the
/// outermost pair delimits a span and inner quotes stay in its text.
/// Empty spans are skipped.
inline std::vector<std::string> extract_spans(std::string_view caption) {
    static constexpr std::string_view open1 = "\xE3\x80\x8C", close1 = "\xE3\x80\x8D";  // 「 」
    static constexpr std::string_view open2 = "\xE3\x80\x8E", close2 = "\xE3\x80\x8F";  // 『 』
    std::vector<std::string> spans;
    struct Open {
        char kind;  // '"', '1' or '2'
        std::size_t offset;
    };
    std::vector<Open> stack;
    std::size_t content_start = 0;
    std::size_t i = 0;
    auto push = [&](char kind, std::size_t width) {
        if (stack.empty())
            content_start = i + width;
        stack.push_back({kind, i});
        i += width;
    };
    auto pop = [&](std::size_t width) {
        stack.pop_back();
        if (stack.empty() && i > content_start)
            spans.emplace_back(caption.substr(content_start, i - content_start));
        i += width;
    };
    while (i < caption.size()) {
        const std::string_view rest = caption.substr(i);
        if (rest[0] == '"') {
            if (!stack.empty() && stack.back().kind == '"')
                pop(1);
            else
                push('"', 1);
        } else if (rest.starts_with(open1)) {
            push('1', open1.size());
        } else if (rest.starts_with(open2)) {
            push('2', open2.size());
        } else if (rest.starts_with(close1) || rest.starts_with(close2)) {
            const char kind = rest.starts_with(close1) ? '1' : '2';
            if (stack.empty() || stack.back().kind != kind)
                throw ParseError(i, "unmatched closing corner bracket");
            pop(close1.size());
        } else {
            ++i;
        }
    }
    if (!stack.empty())
        throw ParseError(stack.front().offset, "unterminated quote");
    return spans;
}

// ---- coordinate normalization ----

/// round(v · 1000 / dim), halves rounded up.
inline std::int64_t normalize_coord(std::int64_t v, std::int64_t dim) {
    return (2 * v * normalization_base + dim) / (2 * dim);
}

/// round(n · dim / 1000), halves rounded up.
inline std::int64_t denormalize_coord(std::int64_t n, std::int64_t dim) {
    return (2 * n * dim + normalization_base) / (2 * normalization_base);
}

/// Maps boxes to per-mille units; the result has a 1000×1000 canvas.
inline Layout normalize(const Layout& layout) {
    Layout out{normalization_base, normalization_base, layout.boxes};
    for (auto& b : out.boxes) {
        b.x1 = normalize_coord(b.x1, layout.canvas_w);
        b.x2 = normalize_coord(b.x2, layout.canvas_w);
        b.y1 = normalize_coord(b.y1, layout.canvas_h);
        b.y2 = normalize_coord(b.y2, layout.canvas_h);
    }
    return out;
}

/// Inverse of normalize for a w×h canvas; exact up to one rounding step.
inline Layout denormalize(const Layout& layout, std::int64_t w, std::int64_t h) {
    Layout out{w, h, layout.boxes};
    for (auto& b : out.boxes) {
        b.x1 = denormalize_coord(b.x1, w);
        b.x2 = denormalize_coord(b.x2, w);
        b.y1 = denormalize_coord(b.y1, h);
        b.y2 = denormalize_coord(b.y2, h);
    }
    return out;
}

// ---- serialization ----

namespace detail {

inline void append_quoted(std::string& out, std::string_view text) {
    out.push_back('"');
    for (char c : text) {
        if (c == '"' || c == '\\') {
            out.push_back('\\');
            out.push_back(c);
        } else if (c == '\n') {
            out += "\\n";
        } else {
            out.push_back(c);
        }
    }
    out.push_back('"');
}

inline void append_point(std::string& out, std::int64_t x, std::int64_t y) {
    out += "|(" + std::to_string(x) + "," + std::to_string(y) + ")";
}

}  // namespace detail

/// Serializes boxes (already in the mode's coordinate space) as output text.
inline std::string serialize_boxes(std::span<const BBox> boxes, TaskMode mode) {
    std::string out;
    for (std::size_t i = 0; i < boxes.size(); ++i) {
        const BBox& b = boxes[i];
        if (i)
            out.push_back('\n');
        detail::append_quoted(out, b.text);
        detail::append_point(out, b.x1, b.y1);
        if (has_four_corners(mode)) {
            detail::append_point(out, b.x2, b.y1);
            detail::append_point(out, b.x2, b.y2);
            detail::append_point(out, b.x1, b.y2);
        } else {
            detail::append_point(out, b.x2, b.y2);
        }
    }
    return out;
}

/// Output text for a pixel-space layout in the given mode.
inline std::string serialize_layout(const Layout& layout, TaskMode mode) {
    return serialize_boxes(is_normalized(mode) ? normalize(layout).boxes : layout.boxes, mode);
}

inline std::string instruction_input(std::string_view caption, TaskMode mode, std::int64_t w, std::int64_t h) {
    std::string in = "caption: " + std::string(caption);
    if (!is_normalized(mode))
        in += "\nsize: " + std::to_string(w) + "x" + std::to_string(h);
    return in;
}

/// One (input, output) training pair from an annotated record.
inline LayoutInstruction build_instruction(const DatasetRecord& record, TaskMode mode) {
    if (record.boxes.empty())
        throw InputError("empty instruction: record '" + record.image_id + "' has no boxes");
    for (const auto& b : record.boxes)
        if (b.text.empty())
            throw InputError("record '" + record.image_id + "' has a box without text");
    const Layout layout{record.width, record.height, record.boxes};
    return {mode, instruction_input(record.caption, mode, record.width, record.height),
            serialize_layout(layout, mode)};
}

// ---- parsing ----

namespace detail {

class LineParser {
public:
    LineParser(std::string_view line, std::size_t lineno) : s_(line), line_(lineno) {}

    [[noreturn]] void fail(const std::string& why) const { throw FormatError(line_, why); }

    std::string text() {
        expect('"', "expected opening quote");
        std::string out;
        for (;;) {
            if (pos_ >= s_.size())
                fail("unterminated text");
            const char c = s_[pos_++];
            if (c == '"')
                break;
            if (c == '\\') {
                if (pos_ >= s_.size())
                    fail("dangling escape");
                const char e = s_[pos_++];
                if (e == '"' || e == '\\')
                    out.push_back(e);
                else if (e == 'n')
                    out.push_back('\n');
                else
                    fail(std::string("unknown escape \\") + e);
            } else {
                out.push_back(c);
            }
        }
        if (out.empty())
            fail("empty text");
        try {
            utf8::decode(out);
        } catch (const InputError&) {
            fail("text is not valid UTF-8");
        }
        return out;
    }

    std::pair<std::int64_t, std::int64_t> point() {
        expect('|', "expected '|' separator");
        expect('(', "expected '('");
        const auto x = number();
        expect(',', "expected ','");
        const auto y = number();
        expect(')', "expected ')'");
        return {x, y};
    }

    bool at_end() const noexcept { return pos_ == s_.size(); }

private:
    void expect(char c, const char* why) {
        if (pos_ >= s_.size() || s_[pos_] != c)
            fail(why);
        ++pos_;
    }

    std::int64_t number() {
        const std::size_t start = pos_;
        while (pos_ < s_.size() && s_[pos_] >= '0' && s_[pos_] <= '9')
            ++pos_;
        const std::size_t len = pos_ - start;
        if (len == 0)
            fail("expected a coordinate");
        if (len > 1 && s_[start] == '0')
            fail("leading zero in coordinate");
        if (len > 12)
            fail("coordinate has too many digits");
        return std::stoll(std::string(s_.substr(start, len)));
    }

    std::string_view s_;
    std::size_t line_;
    std::size_t pos_ = 0;
};

}  // namespace detail

/// Strict parse of LLM output text into a pixel-space layout. Throws
/// FormatError for grammar violations and GeometryError for boxes that
/// are inverted, non-rectangular, or outside the canvas.
inline Layout parse_llm_output(std::string_view text, TaskMode mode, std::int64_t canvas_w, std::int64_t canvas_h) {
    if (canvas_w <= 0 || canvas_h <= 0)
        throw ConfigError("canvas dimensions must be positive");
    if (text.empty())
        throw FormatError(1, "empty output");
    Layout layout{canvas_w, canvas_h, {}};
    std::size_t lineno = 0;
    std::size_t start = 0;
    for (;;) {
        ++lineno;
        const std::size_t nl = text.find('\n', start);
        const std::string_view line = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
        if (line.empty())
            throw FormatError(lineno, "empty line");
        detail::LineParser p(line, lineno);
        BBox b;
        b.text = p.text();
        const auto [ax, ay] = p.point();
        const auto [bx, by] = p.point();
        if (has_four_corners(mode)) {
            const auto [cx, cy] = p.point();
            const auto [dx, dy] = p.point();
            if (!p.at_end())
                p.fail("trailing characters after fourth corner");
            if (bx != cx || ay != by || cy != dy || dx != ax)
                throw GeometryError("line " + std::to_string(lineno) + ": corners do not form an axis-aligned rectangle");
            b.x1 = ax, b.y1 = ay, b.x2 = cx, b.y2 = cy;
        } else {
            if (!p.at_end())
                p.fail("trailing characters after second corner");
            b.x1 = ax, b.y1 = ay, b.x2 = bx, b.y2 = by;
        }
        if (is_normalized(mode)) {
            if (std::max({b.x1, b.y1, b.x2, b.y2}) > normalization_base)
                throw GeometryError("line " + std::to_string(lineno) + ": normalized coordinate above 1000");
            b.x1 = denormalize_coord(b.x1, canvas_w);
            b.x2 = denormalize_coord(b.x2, canvas_w);
            b.y1 = denormalize_coord(b.y1, canvas_h);
            b.y2 = denormalize_coord(b.y2, canvas_h);
        }
        if (b.x1 >= b.x2 || b.y1 >= b.y2)
            throw GeometryError("line " + std::to_string(lineno) + ": top-left corner is not above-left of bottom-right");
        if (!b.inside(canvas_w, canvas_h))
            throw GeometryError("line " + std::to_string(lineno) + ": box lies outside the canvas");
        layout.boxes.push_back(std::move(b));
        if (nl == std::string_view::npos)
            break;
        start = nl + 1;
    }
    return layout;
}

// ---- validation ----

enum class LayoutErrorKind { format, geometry, text_mismatch };

struct ValidationReport {
    std::size_t total = 0;
    std::size_t valid = 0;
    std::size_t format_errors = 0;
    std::size_t geometry_errors = 0;
    std::size_t text_mismatches = 0;

    double accuracy() const noexcept { return total ? static_cast<double>(valid) / static_cast<double>(total) : 0.0; }

    void merge(const ValidationReport& o) noexcept {
        total += o.total;
        valid += o.valid;
        format_errors += o.format_errors;
        geometry_errors += o.geometry_errors;
        text_mismatches += o.text_mismatches;
    }

    friend bool operator==(const ValidationReport&, const ValidationReport&) = default;
};

/// Classifies one output. `expected_spans`, when given, must equal the
/// box texts as a multiset.
inline std::optional<LayoutErrorKind> classify_output(std::string_view text, TaskMode mode, std::int64_t w,
                                                      std::int64_t h,
                                                      const std::vector<std::string>* expected_spans = nullptr) {
    Layout layout;
    try {
        layout = parse_llm_output(text, mode, w, h);
    } catch (const FormatError&) {
        return LayoutErrorKind::format;
    } catch (const GeometryError&) {
        return LayoutErrorKind::geometry;
    }
    if (expected_spans) {
        std::vector<std::string> got;
        for (const auto& b : layout.boxes)
            got.push_back(b.text);
        std::vector<std::string> want = *expected_spans;
        std::sort(got.begin(), got.end());
        std::sort(want.begin(), want.end());
        if (got != want)
            return LayoutErrorKind::text_mismatch;
    }
    return std::nullopt;
}

inline void tally(ValidationReport& r, std::optional<LayoutErrorKind> kind) noexcept {
    ++r.total;
    if (!kind)
        ++r.valid;
    else if (*kind == LayoutErrorKind::format)
        ++r.format_errors;
    else if (*kind == LayoutErrorKind::geometry)
        ++r.geometry_errors;
    else
        ++r.text_mismatches;
}

inline ValidationReport validate_batch(std::span<const std::string> outputs, TaskMode mode, std::int64_t w,
                                       std::int64_t h) {
    ValidationReport r;
    for (const auto& o : outputs)
        tally(r, classify_output(o, mode, w, h));
    return r;
}

// ---- rule-based fallback ----

struct FallbackConfig {
    double margin = 0.05;          // border kept free on every side, fraction of the side
    std::int64_t min_cell = 24;    // minimum character cell, px
    std::size_t max_attempts = 1000;
};

/// Random non-overlapping layout with one box per span. A box is
/// (chars × cell) by cell pixels, so its width is proportional to the
/// span length. Placement is rejection-sampled inside the margin; after
/// max_attempts rejected draws the spans are stacked vertically instead.
/// Throws CapacityError when the stacked layout cannot fit at min_cell.
inline Layout fallback_layout(std::span<const std::string> spans, std::int64_t canvas_w, std::int64_t canvas_h,
                              std::uint64_t seed, const FallbackConfig& cfg = {}) {
    if (spans.empty())
        throw InputError("fallback_layout: no spans");
    if (canvas_w <= 0 || canvas_h <= 0)
        throw ConfigError("canvas dimensions must be positive");
    const auto margin_x = static_cast<std::int64_t>(std::ceil(cfg.margin * static_cast<double>(canvas_w)));
    const auto margin_y = static_cast<std::int64_t>(std::ceil(cfg.margin * static_cast<double>(canvas_h)));
    const std::int64_t usable_w = canvas_w - 2 * margin_x;
    const std::int64_t usable_h = canvas_h - 2 * margin_y;
    const auto n = static_cast<std::int64_t>(spans.size());

    std::vector<std::int64_t> chars;
    std::int64_t longest = 0;
    for (const auto& s : spans) {
        chars.push_back(std::max<std::int64_t>(1, static_cast<std::int64_t>(utf8::decode(s).size())));
        longest = std::max(longest, chars.back());
    }
    if (usable_w < longest * cfg.min_cell || usable_h < n * cfg.min_cell)
        throw CapacityError("fallback_layout: " + std::to_string(n) + " spans (longest " + std::to_string(longest) +
                            " chars) do not fit a " + std::to_string(canvas_w) + "x" + std::to_string(canvas_h) +
                            " canvas at " + std::to_string(cfg.min_cell) + " px per character");

    Layout layout{canvas_w, canvas_h, {}};
    Rng rng(seed);
    std::size_t attempts = 0;
    for (std::size_t i = 0; i < spans.size() && attempts < cfg.max_attempts;) {
        const std::int64_t max_cell = std::max(cfg.min_cell, std::min(usable_w / chars[i], usable_h / n));
        const std::int64_t cell = rng.uniform_int(cfg.min_cell, max_cell);
        const std::int64_t bw = chars[i] * cell, bh = cell;
        BBox b;
        b.x1 = rng.uniform_int(margin_x, canvas_w - margin_x - bw);
        b.y1 = rng.uniform_int(margin_y, canvas_h - margin_y - bh);
        b.x2 = b.x1 + bw;
        b.y2 = b.y1 + bh;
        b.text = spans[i];
        ++attempts;
        if (std::none_of(layout.boxes.begin(), layout.boxes.end(), [&](const BBox& o) { return overlaps(o, b); })) {
            layout.boxes.push_back(std::move(b));
            ++i;
        }
    }
    if (layout.boxes.size() == spans.size())
        return layout;

    layout.boxes.clear();
    const std::int64_t cell = std::min(usable_h / n, usable_w / longest);
    for (std::size_t i = 0; i < spans.size(); ++i) {
        BBox b;
        b.x1 = margin_x + (usable_w - chars[i] * cell) / 2;
        b.y1 = margin_y + static_cast<std::int64_t>(i) * cell;
        b.x2 = b.x1 + chars[i] * cell;
        b.y2 = b.y1 + cell;
        b.text = spans[i];
        layout.boxes.push_back(std::move(b));
    }
    return layout;
}

// ---- JSON ----

inline json layout_to_json(const Layout& l) {
    json boxes = json::array();
    for (const auto& b : l.boxes)
        boxes.push_back(box_to_json(b));
    return {{"width", l.canvas_w}, {"height", l.canvas_h}, {"boxes", std::move(boxes)}};
}

inline Layout layout_from_json(const json& j) {
    if (!j.is_object())
        throw InputError("layout must be a JSON object");
    Layout l{detail::json_int(j, "width"), detail::json_int(j, "height"), {}};
    if (l.canvas_w <= 0 || l.canvas_h <= 0)
        throw InputError("layout: width and height must be positive");
    if (j.contains("boxes")) {
        if (!j.at("boxes").is_array())
            throw InputError("layout: boxes must be an array");
        for (const auto& jb : j.at("boxes"))
            l.boxes.push_back(box_from_json(jb));
    }
    return l;
}

inline json instruction_to_json(const LayoutInstruction& ins) {
    return {{"mode", static_cast<int>(ins.mode)}, {"input", ins.input_text}, {"output", ins.output_text}};
}

}  // namespace glyphdraw
