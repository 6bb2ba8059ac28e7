#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "glyphdraw/builtin_font_data.hpp"
#include "glyphdraw/error.hpp"
#include "glyphdraw/image.hpp"

namespace glyphdraw {

/// One bitmap glyph. Offsets follow BDF: x_off from the pen position,
/// y_off from the baseline to the bottom row (negative = descender).
struct Glyph {
    int width = 0;
    int height = 0;
    int x_off = 0;
    int y_off = 0;
    int advance = 0;
    std::vector<std::uint8_t> bits;  // width*height, 0 or 1

    bool at(int x, int y) const noexcept { return bits[static_cast<std::size_t>(y * width + x)] != 0; }
};

/// A glyph that was not present in the font and was drawn as a tofu box.
struct RenderWarning {
    std::size_t char_index = 0;
    char32_t codepoint = 0;
};

/// Fixed-size bitmap font (one strike).
class BitmapFont {
public:
    int ascent() const noexcept { return ascent_; }
    int descent() const noexcept { return descent_; }
    int line_height() const noexcept { return ascent_ + descent_; }
    const std::string& name() const noexcept { return name_; }

    const Glyph* find(char32_t cp) const noexcept {
        auto it = glyphs_.find(cp);
        return it == glyphs_.end() ? nullptr : &it->second;
    }

    std::size_t glyph_count() const noexcept { return glyphs_.size(); }

    /// Advance used for tofu boxes: that of 'M' if present, else the
    /// widest advance in the font.
    int tofu_advance() const noexcept {
        if (const Glyph* m = find(U'M'))
            return m->advance;
        int a = 1;
        for (const auto& [cp, g] : glyphs_)
            a = std::max(a, g.advance);
        return a;
    }

    /// Renders one line at native size, white (255) on black. Missing
    /// glyphs become an outlined box spanning the ascent and are reported
    /// in `warnings` when it is non-null.
    GlyphImage render_line(std::u32string_view text, std::vector<RenderWarning>* warnings = nullptr) const {
        int width = 0;
        for (char32_t c : text) {
            const Glyph* g = find(c);
            width += g ? g->advance : tofu_advance();
        }
        GlyphImage img(static_cast<std::size_t>(std::max(width, 1)), static_cast<std::size_t>(line_height()));
        int pen = 0;
        for (std::size_t i = 0; i < text.size(); ++i) {
            const Glyph* g = find(text[i]);
            if (!g) {
                const int adv = tofu_advance();
                const int w = std::max(adv - 1, 1);
                for (int y = 0; y < ascent_; ++y)
                    for (int x = 0; x < w; ++x)
                        if (y == 0 || y == ascent_ - 1 || x == 0 || x == w - 1)
                            put(img, pen + x, y);
                if (warnings)
                    warnings->push_back({i, text[i]});
                pen += adv;
                continue;
            }
            const int top = ascent_ - g->y_off - g->height;
            for (int y = 0; y < g->height; ++y)
                for (int x = 0; x < g->width; ++x)
                    if (g->at(x, y))
                        put(img, pen + g->x_off + x, top + y);
            pen += g->advance;
        }
        return img;
    }

    /// 5x7 monospace ASCII font compiled into the library.
    static const BitmapFont& builtin() {
        static const BitmapFont font = [] {
            BitmapFont f;
            f.name_ = "builtin-mono5x7";
            f.ascent_ = 7;
            f.descent_ = 1;
            for (std::size_t i = 0; i < detail::builtin_font_rows.size(); ++i) {
                Glyph g{5, 8, 0, -1, 6, std::vector<std::uint8_t>(40)};
                for (int y = 0; y < 8; ++y)
                    for (int x = 0; x < 5; ++x)
                        g.bits[static_cast<std::size_t>(y * 5 + x)] = (detail::builtin_font_rows[i][y] >> (4 - x)) & 1;
                f.glyphs_.emplace(static_cast<char32_t>(0x20 + i), std::move(g));
            }
            return f;
        }();
        return font;
    }

    /// Parses a BDF 2.1 bitmap font.
    static BitmapFont read_bdf(std::istream& is) {
        BitmapFont f;
        std::string line;
        std::size_t lineno = 0;
        bool have_ascent = false, have_descent = false;
        int bbox_h = 0, bbox_yoff = 0;
        auto fail = [&](const std::string& why) -> InputError {
            return InputError("BDF line " + std::to_string(lineno) + ": " + why);
        };
        auto fields = [](const std::string& l) {
            std::istringstream ss(l);
            std::vector<std::string> out;
            for (std::string t; ss >> t;)
                out.push_back(t);
            return out;
        };
        auto to_int = [&](const std::string& s) {
            try {
                std::size_t used = 0;
                int v = std::stoi(s, &used);
                if (used != s.size())
                    throw fail("bad integer '" + s + "'");
                return v;
            } catch (const std::logic_error&) {
                throw fail("bad integer '" + s + "'");
            }
        };

        if (!std::getline(is, line) || fields(line).empty() || fields(line)[0] != "STARTFONT")
            throw InputError("BDF: missing STARTFONT");
        ++lineno;
        bool ended = false;
        while (std::getline(is, line)) {
            ++lineno;
            const auto tok = fields(line);
            if (tok.empty())
                continue;
            const std::string& key = tok[0];
            if (key == "FONT" && tok.size() > 1) {
                f.name_ = tok[1];
            } else if (key == "FONTBOUNDINGBOX" && tok.size() == 5) {
                bbox_h = to_int(tok[2]);
                bbox_yoff = to_int(tok[4]);
            } else if (key == "FONT_ASCENT" && tok.size() == 2) {
                f.ascent_ = to_int(tok[1]);
                have_ascent = true;
            } else if (key == "FONT_DESCENT" && tok.size() == 2) {
                f.descent_ = to_int(tok[1]);
                have_descent = true;
            } else if (key == "STARTCHAR") {
                Glyph g;
                long encoding = -1;
                bool have_bbx = false;
                for (;;) {
                    if (!std::getline(is, line))
                        throw fail("unterminated STARTCHAR");
                    ++lineno;
                    const auto t = fields(line);
                    if (t.empty())
                        continue;
                    if (t[0] == "ENCODING" && t.size() >= 2) {
                        encoding = to_int(t[1]);
                    } else if (t[0] == "DWIDTH" && t.size() >= 2) {
                        g.advance = to_int(t[1]);
                    } else if (t[0] == "BBX" && t.size() == 5) {
                        g.width = to_int(t[1]);
                        g.height = to_int(t[2]);
                        g.x_off = to_int(t[3]);
                        g.y_off = to_int(t[4]);
                        if (g.width < 0 || g.height < 0)
                            throw fail("negative BBX");
                        have_bbx = true;
                    } else if (t[0] == "BITMAP") {
                        if (!have_bbx)
                            throw fail("BITMAP before BBX");
                        g.bits.assign(static_cast<std::size_t>(g.width * g.height), 0);
                        const std::size_t hex_len = static_cast<std::size_t>((g.width + 7) / 8 * 2);
                        for (int y = 0; y < g.height; ++y) {
                            if (!std::getline(is, line))
                                throw fail("truncated BITMAP");
                            ++lineno;
                            const auto row = fields(line);
                            if (row.size() != 1 || row[0].size() < hex_len)
                                throw fail("bad BITMAP row");
                            for (int x = 0; x < g.width; ++x) {
                                const char h = row[0][static_cast<std::size_t>(x / 4)];
                                int nib;
                                if (h >= '0' && h <= '9')
                                    nib = h - '0';
                                else if (h >= 'A' && h <= 'F')
                                    nib = h - 'A' + 10;
                                else if (h >= 'a' && h <= 'f')
                                    nib = h - 'a' + 10;
                                else
                                    throw fail("bad hex digit");
                                g.bits[static_cast<std::size_t>(y * g.width + x)] = (nib >> (3 - x % 4)) & 1;
                            }
                        }
                    } else if (t[0] == "ENDCHAR") {
                        break;
                    }
                }
                if (g.bits.size() != static_cast<std::size_t>(g.width * g.height))
                    throw fail("glyph without BITMAP");
                if (encoding >= 0)
                    f.glyphs_[static_cast<char32_t>(encoding)] = std::move(g);
            } else if (key == "ENDFONT") {
                ended = true;
                break;
            }
        }
        if (!ended)
            throw InputError("BDF: missing ENDFONT");
        if (!have_ascent)
            f.ascent_ = bbox_h + bbox_yoff;
        if (!have_descent)
            f.descent_ = -bbox_yoff;
        if (f.line_height() <= 0 || f.glyphs_.empty())
            throw InputError("BDF: font has no usable glyphs");
        return f;
    }

    static BitmapFont load_bdf(const std::filesystem::path& path) {
        std::ifstream is(path);
        if (!is)
            throw InputError("cannot open font: " + path.string());
        return read_bdf(is);
    }

private:
    static void put(GlyphImage& img, int x, int y) noexcept {
        if (x >= 0 && y >= 0 && static_cast<std::size_t>(x) < img.width() && static_cast<std::size_t>(y) < img.height())
            img.at(static_cast<std::size_t>(x), static_cast<std::size_t>(y)) = 255;
    }

    std::string name_;
    int ascent_ = 0;
    int descent_ = 0;
    std::map<char32_t, Glyph> glyphs_;
};

}  // namespace glyphdraw
