#!/usr/bin/env python3
"""Generates data/fonts/mono5x7.bdf and include/glyphdraw/builtin_font_data.hpp
from the glyph art below. 5 columns x 8 rows per glyph: rows 0-6 sit above the
baseline, row 7 holds descenders. Advance is 6 px."""
import pathlib

ART = r"""
20
.....|.....|.....|.....|.....|.....|.....|.....
21
..#..|..#..|..#..|..#..|..#..|.....|..#..|.....
22
.#.#.|.#.#.|.#.#.|.....|.....|.....|.....|.....
23
.#.#.|.#.#.|#####|.#.#.|#####|.#.#.|.#.#.|.....
24
..#..|.####|#.#..|.###.|..#.#|####.|..#..|.....
25
##...|##..#|...#.|..#..|.#...|#..##|...##|.....
26
.##..|#..#.|#.#..|.#...|#.#.#|#..#.|.##.#|.....
27
..#..|..#..|.#...|.....|.....|.....|.....|.....
28
...#.|..#..|.#...|.#...|.#...|..#..|...#.|.....
29
.#...|..#..|...#.|...#.|...#.|..#..|.#...|.....
2A
.....|..#..|#.#.#|.###.|#.#.#|..#..|.....|.....
2B
.....|..#..|..#..|#####|..#..|..#..|.....|.....
2C
.....|.....|.....|.....|.##..|..#..|.#...|.....
2D
.....|.....|.....|#####|.....|.....|.....|.....
2E
.....|.....|.....|.....|.....|.##..|.##..|.....
2F
.....|....#|...#.|..#..|.#...|#....|.....|.....
30
.###.|#...#|#..##|#.#.#|##..#|#...#|.###.|.....
31
..#..|.##..|..#..|..#..|..#..|..#..|.###.|.....
32
.###.|#...#|....#|...#.|..#..|.#...|#####|.....
33
#####|...#.|..#..|...#.|....#|#...#|.###.|.....
34
...#.|..##.|.#.#.|#..#.|#####|...#.|...#.|.....
35
#####|#....|####.|....#|....#|#...#|.###.|.....
36
..##.|.#...|#....|####.|#...#|#...#|.###.|.....
37
#####|....#|...#.|..#..|.#...|.#...|.#...|.....
38
.###.|#...#|#...#|.###.|#...#|#...#|.###.|.....
39
.###.|#...#|#...#|.####|....#|...#.|.##..|.....
3A
.....|.##..|.##..|.....|.##..|.##..|.....|.....
3B
.....|.##..|.##..|.....|.##..|..#..|.#...|.....
3C
...#.|..#..|.#...|#....|.#...|..#..|...#.|.....
3D
.....|.....|#####|.....|#####|.....|.....|.....
3E
.#...|..#..|...#.|....#|...#.|..#..|.#...|.....
3F
.###.|#...#|....#|...#.|..#..|.....|..#..|.....
40
.###.|#...#|....#|.##.#|#.#.#|#.#.#|.###.|.....
41
.###.|#...#|#...#|#...#|#####|#...#|#...#|.....
42
####.|#...#|#...#|####.|#...#|#...#|####.|.....
43
.###.|#...#|#....|#....|#....|#...#|.###.|.....
44
###..|#..#.|#...#|#...#|#...#|#..#.|###..|.....
45
#####|#....|#....|####.|#....|#....|#####|.....
46
#####|#....|#....|####.|#....|#....|#....|.....
47
.###.|#...#|#....|#.###|#...#|#...#|.####|.....
48
#...#|#...#|#...#|#####|#...#|#...#|#...#|.....
49
.###.|..#..|..#..|..#..|..#..|..#..|.###.|.....
4A
..###|...#.|...#.|...#.|...#.|#..#.|.##..|.....
4B
#...#|#..#.|#.#..|##...|#.#..|#..#.|#...#|.....
4C
#....|#....|#....|#....|#....|#....|#####|.....
4D
#...#|##.##|#.#.#|#.#.#|#...#|#...#|#...#|.....
4E
#...#|#...#|##..#|#.#.#|#..##|#...#|#...#|.....
4F
.###.|#...#|#...#|#...#|#...#|#...#|.###.|.....
50
####.|#...#|#...#|####.|#....|#....|#....|.....
51
.###.|#...#|#...#|#...#|#.#.#|#..#.|.##.#|.....
52
####.|#...#|#...#|####.|#.#..|#..#.|#...#|.....
53
.####|#....|#....|.###.|....#|....#|####.|.....
54
#####|..#..|..#..|..#..|..#..|..#..|..#..|.....
55
#...#|#...#|#...#|#...#|#...#|#...#|.###.|.....
56
#...#|#...#|#...#|#...#|#...#|.#.#.|..#..|.....
57
#...#|#...#|#...#|#.#.#|#.#.#|#.#.#|.#.#.|.....
58
#...#|#...#|.#.#.|..#..|.#.#.|#...#|#...#|.....
59
#...#|#...#|#...#|.#.#.|..#..|..#..|..#..|.....
5A
#####|....#|...#.|..#..|.#...|#....|#####|.....
5B
.###.|.#...|.#...|.#...|.#...|.#...|.###.|.....
5C
.....|#....|.#...|..#..|...#.|....#|.....|.....
5D
.###.|...#.|...#.|...#.|...#.|...#.|.###.|.....
5E
..#..|.#.#.|#...#|.....|.....|.....|.....|.....
5F
.....|.....|.....|.....|.....|.....|#####|.....
60
.#...|..#..|...#.|.....|.....|.....|.....|.....
61
.....|.....|.###.|....#|.####|#...#|.####|.....
62
#....|#....|#.##.|##..#|#...#|#...#|####.|.....
63
.....|.....|.###.|#....|#....|#...#|.###.|.....
64
....#|....#|.##.#|#..##|#...#|#...#|.####|.....
65
.....|.....|.###.|#...#|#####|#....|.###.|.....
66
..##.|.#..#|.#...|###..|.#...|.#...|.#...|.....
67
.....|.....|.####|#...#|#...#|.####|....#|.###.
68
#....|#....|#.##.|##..#|#...#|#...#|#...#|.....
69
..#..|.....|.##..|..#..|..#..|..#..|.###.|.....
6A
...#.|.....|..##.|...#.|...#.|...#.|#..#.|.##..
6B
#....|#....|#..#.|#.#..|##...|#.#..|#..#.|.....
6C
.##..|..#..|..#..|..#..|..#..|..#..|.###.|.....
6D
.....|.....|##.#.|#.#.#|#.#.#|#...#|#...#|.....
6E
.....|.....|#.##.|##..#|#...#|#...#|#...#|.....
6F
.....|.....|.###.|#...#|#...#|#...#|.###.|.....
70
.....|.....|####.|#...#|#...#|####.|#....|#....
71
.....|.....|.####|#...#|#...#|.####|....#|....#
72
.....|.....|#.##.|##..#|#....|#....|#....|.....
73
.....|.....|.####|#....|.###.|....#|####.|.....
74
.#...|.#...|###..|.#...|.#...|.#..#|..##.|.....
75
.....|.....|#...#|#...#|#...#|#..##|.##.#|.....
76
.....|.....|#...#|#...#|#...#|.#.#.|..#..|.....
77
.....|.....|#...#|#...#|#.#.#|#.#.#|.#.#.|.....
78
.....|.....|#...#|.#.#.|..#..|.#.#.|#...#|.....
79
.....|.....|#...#|#...#|#...#|.####|....#|.###.
7A
.....|.....|#####|...#.|..#..|.#...|#####|.....
7B
...#.|..#..|..#..|.#...|..#..|..#..|...#.|.....
7C
..#..|..#..|..#..|..#..|..#..|..#..|..#..|.....
7D
.#...|..#..|..#..|...#.|..#..|..#..|.#...|.....
7E
.....|.....|.#...|#.#.#|...#.|.....|.....|.....
"""

def parse():
    lines = [l for l in ART.strip().splitlines() if l.strip()]
    glyphs = {}
    for code, art in zip(lines[0::2], lines[1::2]):
        rows = art.split("|")
        assert len(rows) == 8 and all(len(r) == 5 and set(r) <= set(".#") for r in rows), code
        glyphs[int(code, 16)] = [sum((c == "#") << (4 - i) for i, c in enumerate(r)) for r in rows]
    assert sorted(glyphs) == list(range(0x20, 0x7F))
    return glyphs

def main():
    root = pathlib.Path(__file__).resolve().parent.parent
    glyphs = parse()
    bdf = ["STARTFONT 2.1", "FONT -glyphdraw-mono-medium-r-normal--8-80-75-75-c-60-iso10646-1",
           "SIZE 8 75 75", "FONTBOUNDINGBOX 5 8 0 -1", "STARTPROPERTIES 2",
           "FONT_ASCENT 7", "FONT_DESCENT 1", "ENDPROPERTIES", f"CHARS {len(glyphs)}"]
    for cp, rows in sorted(glyphs.items()):
        bdf += [f"STARTCHAR U+{cp:04X}", f"ENCODING {cp}", "SWIDTH 750 0", "DWIDTH 6 0",
                "BBX 5 8 0 -1", "BITMAP"] + [f"{r << 3:02X}" for r in rows] + ["ENDCHAR"]
    bdf.append("ENDFONT")
    (root / "data/fonts/mono5x7.bdf").write_text("\n".join(bdf) + "\n")

    hdr = ["#pragma once", "", "// Generated by scripts/gen_font.py; edit the art there.", "",
           "#include <array>", "#include <cstdint>", "", "namespace glyphdraw::detail {", "",
           "// Rows of 5-bit glyphs (bit 4 = leftmost column) for U+0020..U+007E.",
           "inline constexpr std::array<std::array<std::uint8_t, 8>, 95> builtin_font_rows = {{"]
    for cp, rows in sorted(glyphs.items()):
        ch = {0x20: "space", 0x5C: "backslash"}.get(cp, chr(cp))
        hdr.append("    {{" + ", ".join(f"0x{r:02X}" for r in rows) + "}}," + f"  // {ch}")
    hdr += ["}};", "", "}  // namespace glyphdraw::detail", ""]
    (root / "include/glyphdraw/builtin_font_data.hpp").write_text("\n".join(hdr))

if __name__ == "__main__":
    main()
