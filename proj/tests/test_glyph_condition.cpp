#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "glyphdraw/glyph_condition.hpp"
#include "glyphdraw/rng.hpp"

using namespace glyphdraw;

namespace {

const std::filesystem::path data_dir = GLYPHDRAW_TEST_DATA;

GlyphImage load_pgm(const std::filesystem::path& p) {
    std::ifstream is(p, std::ios::binary);
    return read_pgm(is);
}

RenderSpec spec(std::string text, std::int64_t x1, std::int64_t y1, std::int64_t x2, std::int64_t y2,
                RenderMode mode = RenderMode::fixed_font) {
    RenderSpec s;
    s.text = std::move(text);
    s.bbox = {x1, y1, x2, y2, s.text, std::nullopt};
    s.mode = mode;
    return s;
}

GlyphImage white_square() {
    GlyphImage img(32, 32);
    for (std::size_t y = 8; y < 24; ++y)
        for (std::size_t x = 8; x < 24; ++x)
            img.at(x, y) = 255;
    return img;
}

bool binary(const GlyphImage& img) {
    for (auto p : img.pixels())
        if (p != 0 && p != 255)
            return false;
    return true;
}

bool nonzero_only_inside(const GlyphImage& img, const BBox& b) {
    for (std::size_t y = 0; y < img.height(); ++y)
        for (std::size_t x = 0; x < img.width(); ++x)
            if (img.at(x, y) && !(static_cast<std::int64_t>(x) >= b.x1 && static_cast<std::int64_t>(x) < b.x2 &&
                                  static_cast<std::int64_t>(y) >= b.y1 && static_cast<std::int64_t>(y) < b.y2))
                return false;
    return true;
}

}  // namespace

TEST(RasterText, GoldenLetterA) {
    const GlyphImage img = raster_text(spec("A", 0, 0, 32, 32), 32, 32);
    EXPECT_EQ(img, load_pgm(data_dir / "glyph_A_32.pgm"));
}

TEST(RasterText, StaysInsideBoxAndIsDeterministic) {
    Rng rng(1);
    for (int t = 0; t < 50; ++t) {
        const auto x1 = rng.uniform_int(0, 40), y1 = rng.uniform_int(0, 40);
        const auto s = spec("Hi 42!", x1, y1, x1 + rng.uniform_int(6, 50), y1 + rng.uniform_int(4, 20));
        const GlyphImage a = raster_text(s, 100, 70);
        EXPECT_TRUE(nonzero_only_inside(a, s.bbox));
        EXPECT_GT(a.count_nonzero(), 0u);
        EXPECT_EQ(a, raster_text(s, 100, 70));
    }
}

TEST(RasterText, NativeSizeMatchesFontBitmap) {
    // 6x8 box holds one glyph at scale 1, so the crop is the font bitmap itself.
    const GlyphImage img = raster_text(spec("A", 2, 3, 8, 11), 12, 12);
    const GlyphImage line = BitmapFont::builtin().render_line(U"A");
    for (std::size_t y = 0; y < 8; ++y)
        for (std::size_t x = 0; x < 6; ++x)
            EXPECT_EQ(img.at(x + 2, y + 3), line.at(x, y));
}

TEST(RasterText, MissingGlyphDrawsTofuAndWarns) {
    std::vector<RenderWarning> warnings;
    const GlyphImage img = raster_text(spec("A\xE4\xB8\xAD", 0, 0, 24, 16), 24, 16, &warnings);
    ASSERT_EQ(warnings.size(), 1u);
    EXPECT_EQ(warnings[0].char_index, 1u);
    EXPECT_EQ(warnings[0].codepoint, U'中');
    EXPECT_GT(img.count_nonzero(), 0u);
}

TEST(RasterText, Errors) {
    EXPECT_THROW(raster_text(spec("A", 0, 0, 40, 10), 32, 32), GeometryError);
    EXPECT_THROW(raster_text(spec("A", -1, 0, 10, 10), 32, 32), GeometryError);
    EXPECT_THROW(raster_text(spec("A", 0, 0, 10, 10, RenderMode::canny_of_real), 32, 32), ConfigError);
}

TEST(Font, BdfFileMatchesBuiltin) {
    const BitmapFont bdf = BitmapFont::load_bdf(data_dir.parent_path().parent_path() / "data/fonts/mono5x7.bdf");
    const BitmapFont& builtin = BitmapFont::builtin();
    EXPECT_EQ(bdf.glyph_count(), builtin.glyph_count());
    EXPECT_EQ(bdf.ascent(), builtin.ascent());
    EXPECT_EQ(bdf.descent(), builtin.descent());
    std::u32string all;
    for (char32_t c = 0x20; c < 0x7F; ++c)
        all.push_back(c);
    EXPECT_EQ(bdf.render_line(all), builtin.render_line(all));
}

TEST(Font, BadPathAndBadFile) {
    EXPECT_THROW(BitmapFont::load_bdf("/nonexistent/font.bdf"), InputError);
    std::istringstream junk("STARTFONT 2.1\nFONT x\nENDFONT\n");
    EXPECT_THROW(BitmapFont::read_bdf(junk), InputError);
}

TEST(CannyEdges, ConstantImageHasNoEdges) {
    for (std::uint8_t v : {0, 17, 128, 255})
        EXPECT_EQ(canny_edges(GlyphImage(20, 15, v)).count_nonzero(), 0u);
}

TEST(CannyEdges, WhiteSquareMatchesReferenceOracle) {
    EXPECT_EQ(load_pgm(data_dir / "white_square.pgm"), white_square());
    EXPECT_EQ(canny_edges(white_square()), load_pgm(data_dir / "white_square_edges.pgm"));
}

TEST(CannyEdges, WhiteSquareRingIsClosedWithEmptyInterior) {
    const GlyphImage e = canny_edges(white_square());
    // No edges more than one pixel inside the square border.
    for (std::size_t y = 10; y < 22; ++y)
        for (std::size_t x = 10; x < 22; ++x)
            EXPECT_EQ(e.at(x, y), 0) << x << "," << y;
    // Closed: a 4-connected flood over non-edge pixels from the corner never reaches the center.
    std::vector<bool> seen(32 * 32, false);
    std::vector<std::pair<int, int>> stack{{0, 0}};
    seen[0] = true;
    while (!stack.empty()) {
        const auto [x, y] = stack.back();
        stack.pop_back();
        const int d[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
        for (const auto& s : d) {
            const int nx = x + s[0], ny = y + s[1];
            if (nx < 0 || ny < 0 || nx >= 32 || ny >= 32)
                continue;
            const auto i = static_cast<std::size_t>(ny * 32 + nx);
            if (seen[i] || e.at(static_cast<std::size_t>(nx), static_cast<std::size_t>(ny)))
                continue;
            seen[i] = true;
            stack.push_back({nx, ny});
        }
    }
    EXPECT_FALSE(seen[16 * 32 + 16]);
}

TEST(CannyEdges, InversionGivesSameEdges) {
    Rng rng(2);
    for (int t = 0; t < 20; ++t) {
        GlyphImage img(24, 20);
        for (auto& p : img.pixels())
            p = static_cast<std::uint8_t>(rng.uniform_int(0, 3) * 85);
        GlyphImage inv = img;
        for (auto& p : inv.pixels())
            p = static_cast<std::uint8_t>(255 - p);
        EXPECT_EQ(canny_edges(img), canny_edges(inv));
    }
}

TEST(CannyEdges, OutputIsBinaryAndReapplicationStaysBinary) {
    const GlyphImage text = raster_text(spec("Edge", 0, 0, 48, 16), 48, 16);
    const GlyphImage once = canny_edges(text);
    EXPECT_TRUE(binary(once));
    EXPECT_GT(once.count_nonzero(), 0u);
    EXPECT_TRUE(binary(canny_edges(once)));
}

TEST(CannyEdges, Errors) {
    EXPECT_THROW(canny_edges(GlyphImage(2, 10)), GeometryError);
    EXPECT_THROW(canny_edges(GlyphImage(10, 2)), GeometryError);
    EXPECT_THROW(canny_edges(GlyphImage(10, 10), 150, 50), ConfigError);
    EXPECT_THROW(canny_edges(GlyphImage(10, 10), 50, 50), ConfigError);
}

TEST(ComposeCondition, EmptyAndSingle) {
    EXPECT_EQ(compose_condition({}, 40, 30), GlyphImage(40, 30));
    const std::vector<RenderSpec> one{spec("ab", 3, 4, 30, 20)};
    EXPECT_EQ(compose_condition(one, 40, 30), raster_text(one[0], 40, 30));
    const std::vector<RenderSpec> edge{spec("ab", 3, 4, 30, 20, RenderMode::canny_of_real)};
    EXPECT_EQ(compose_condition(edge, 40, 30), render_spec(edge[0], 40, 30));
}

TEST(ComposeCondition, DisjointSpecsGiveUnion) {
    const RenderSpec a = spec("left", 0, 0, 30, 12), b = spec("right", 32, 14, 64, 30, RenderMode::canny_of_real);
    const std::vector<RenderSpec> both{a, b};
    const GlyphImage ia = render_spec(a, 64, 32), ib = render_spec(b, 64, 32);
    const GlyphImage u = compose_condition(both, 64, 32);
    for (std::size_t i = 0; i < u.pixels().size(); ++i)
        EXPECT_EQ(u.pixels()[i], ia.pixels()[i] | ib.pixels()[i]);
}

TEST(ComposeCondition, OrderDoesNotMatter) {
    Rng rng(3);
    std::vector<RenderSpec> specs;
    for (int i = 0; i < 6; ++i) {
        const auto x1 = rng.uniform_int(0, 50), y1 = rng.uniform_int(0, 30);
        specs.push_back(spec("T" + std::to_string(i), x1, y1, x1 + rng.uniform_int(8, 30), y1 + rng.uniform_int(6, 20),
                             i % 2 ? RenderMode::canny_of_real : RenderMode::fixed_font));
    }
    const GlyphImage forward = compose_condition(specs, 80, 50);
    std::reverse(specs.begin(), specs.end());
    EXPECT_EQ(compose_condition(specs, 80, 50), forward);
    std::rotate(specs.begin(), specs.begin() + 2, specs.end());
    EXPECT_EQ(compose_condition(specs, 80, 50), forward);
}

TEST(ComposeCondition, OutOfCanvasNamesSpecIndex) {
    const std::vector<RenderSpec> specs{spec("ok", 0, 0, 10, 10), spec("bad", 5, 5, 50, 10)};
    try {
        compose_condition(specs, 40, 40);
        FAIL();
    } catch (const GeometryError& e) {
        EXPECT_NE(std::string(e.what()).find("spec 1"), std::string::npos);
    }
}

TEST(SmallTextMask, PaperThreshold) {
    // 1000x1000 canvas: a 25x20 box is 0.0005 of the area, a 1000x500 box is half of it.
    const std::vector<BBox> boxes{{10, 10, 35, 30, "s", 0.9}, {0, 500, 1000, 1000, "big", 0.9}};
    const GlyphImage m = emit_small_text_mask(boxes, 1000, 1000, 0.001);
    EXPECT_EQ(m.count_nonzero(), 25u * 20u);
    EXPECT_EQ(m.at(10, 10), 255);
    EXPECT_EQ(m.at(34, 29), 255);
    EXPECT_EQ(m.at(35, 29), 0);
    EXPECT_EQ(m.at(500, 700), 0);
    EXPECT_TRUE(binary(m));
}

TEST(SmallTextMask, EmptyAndOrderInvariant) {
    EXPECT_EQ(emit_small_text_mask({}, 50, 40).count_nonzero(), 0u);
    Rng rng(4);
    std::vector<BBox> boxes;
    for (int i = 0; i < 20; ++i) {
        const auto x1 = rng.uniform_int(0, 90), y1 = rng.uniform_int(0, 90);
        boxes.push_back({x1, y1, x1 + rng.uniform_int(1, 10), y1 + rng.uniform_int(1, 10), "", std::nullopt});
    }
    const GlyphImage forward = emit_small_text_mask(boxes, 100, 100, 0.005);
    std::reverse(boxes.begin(), boxes.end());
    EXPECT_EQ(emit_small_text_mask(boxes, 100, 100, 0.005), forward);
    EXPECT_THROW(emit_small_text_mask(boxes, 100, 100, 1.0), DomainError);
}

TEST(ImageIo, PgmAndPngRoundTrip) {
    Rng rng(5);
    GlyphImage img(13, 7);
    for (auto& p : img.pixels())
        p = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
    std::stringstream ss;
    write_pgm(ss, img);
    EXPECT_EQ(read_pgm(ss), img);
    const auto png = std::filesystem::temp_directory_path() / "glyphdraw_roundtrip.png";
    save_image(png, img);
    EXPECT_EQ(load_image(png), img);
    std::filesystem::remove(png);
    EXPECT_THROW(load_image("/nonexistent/x.png"), InputError);
    std::stringstream bad("P2\n1 1\n255\n0");
    EXPECT_THROW(read_pgm(bad), InputError);
}
