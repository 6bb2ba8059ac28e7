#!/usr/bin/env python3
"""Writes tests/data/stats_records.jsonl, 1000 random OCR records mixing
Latin, CJK, kana, hangul and emoji text with assorted whitespace."""
import json
import pathlib
import random

OUT = pathlib.Path(__file__).resolve().parent.parent / "tests" / "data" / "stats_records.jsonl"

LATIN = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJ0123456789%&!?.-"
CJK = "中文字体海报新年快乐优惠大促销春夏秋冬"
KANA = "あいうえおカキクケコ"
HANGUL = "한국어글자"
EMOJI = "🎉🔥"
SPACES = [" ", " ", "  ", "\t", "　", " "]


def token(rng):
    kind = rng.random()
    if kind < 0.45:
        return "".join(rng.choice(LATIN) for _ in range(rng.randint(1, 7)))
    if kind < 0.8:
        return "".join(rng.choice(CJK) for _ in range(rng.randint(1, 4)))
    if kind < 0.88:
        return "".join(rng.choice(KANA) for _ in range(rng.randint(1, 3)))
    if kind < 0.95:
        return "".join(rng.choice(HANGUL) for _ in range(rng.randint(1, 3)))
    return rng.choice(EMOJI) + rng.choice(["", "go", "!"])


def text(rng):
    parts = [token(rng) for _ in range(rng.randint(1, 4))]
    out = rng.choice(["", "", " "])
    for i, p in enumerate(parts):
        if i:
            out += rng.choice(SPACES + [""])  # "" glues a CJK run to a Latin run
        out += p
    return out + rng.choice(["", "", "　"])


def main():
    rng = random.Random(7)
    with OUT.open("w", encoding="utf-8") as f:
        for i in range(1000):
            w, h = rng.choice([(1024, 1024), (1200, 900), (2048, 1536)])
            boxes = []
            for _ in range(rng.choice([0, 1, 1, 1, 2, 2, 3, 4, 6, 10])):
                x1, y1 = rng.randrange(0, w - 10), rng.randrange(0, h - 10)
                boxes.append({"x1": x1, "y1": y1, "x2": rng.randint(x1 + 1, w), "y2": rng.randint(y1 + 1, h),
                              "text": text(rng), "confidence": round(rng.uniform(0.5, 1.0), 3)})
            rec = {"image_id": f"s{i:04d}", "width": w, "height": h, "caption": "stats fixture",
                   "language": rng.choice(["zh", "en", "mixed"]), "boxes": boxes}
            f.write(json.dumps(rec, ensure_ascii=False) + "\n")


if __name__ == "__main__":
    main()
