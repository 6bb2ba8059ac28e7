#!/usr/bin/env python3
"""Writes tests/data/filter_cases.jsonl: 200 OCR records, each carrying the
decision it was built to produce under the default filter thresholds.

Every box is made from a template for one outcome (keep, or a specific rule)
with its deciding quantity placed exactly on or one step past a threshold.
Labels come from the template, not from evaluating the rules."""
import json
import pathlib
import random

OUT = pathlib.Path(__file__).resolve().parent.parent / "tests" / "data" / "filter_cases.jsonl"

# Canvases passing the resolution gate. Multiples of 20 keep 5%/15% centers
# on the half-pixel grid.
CANVASES = [(1200, 900), (1040, 780), (2000, 1500), (780, 1040), (1600, 1600)]
# (width, height) -> rejected
RESOLUTION = [(1024, 768, True), (1025, 768, False), (1025, 767, True), (768, 1024, True),
              (768, 1025, False), (800, 800, True), (4000, 700, True), (1024, 1024, True)]

LATIN = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789%&"
CJK = "中文字体海报新年快乐优惠大促销春夏秋冬"


def text(rng, n, spaces=False):
    pool = LATIN if rng.random() < 0.6 else CJK
    chars = [rng.choice(pool) for _ in range(n)]
    if spaces:
        for _ in range(rng.randint(1, 3)):
            chars.insert(rng.randint(1, len(chars)), " ")
    return "".join(chars)


def box(cx2, cy2, bw, bh, txt, conf):
    """Box with doubled center (cx2, cy2) and the given size."""
    assert (cx2 - bw) % 2 == 0 and (cy2 - bh) % 2 == 0
    x1, y1 = (cx2 - bw) // 2, (cy2 - bh) // 2
    b = {"x1": x1, "y1": y1, "x2": x1 + bw, "y2": y1 + bh, "text": txt}
    if conf is not None:
        b["confidence"] = conf
    return b


def good_conf(rng):
    return rng.choice([0.80001, 0.81, 0.85, 0.9, 0.95, 0.99, 1.0])


def central(rng, w, h, bw, bh, txt, conf):
    cx2 = 2 * (w // 2 + rng.randint(-w // 10, w // 10))
    cy2 = 2 * (h // 2 + rng.randint(-h // 10, h // 10))
    return box(cx2 + (bw % 2), cy2 + (bh % 2), bw, bh, txt, conf)


# Each template returns (box, expected rule or None for kept).
def t_keep(rng, w, h):
    n = rng.randint(1, 14)
    return central(rng, w, h, 300, 150, text(rng, n), good_conf(rng)), None


def t_conf_exact(rng, w, h):
    return central(rng, w, h, 300, 150, text(rng, 3), 0.8), "confidence"


def t_conf_low(rng, w, h):
    return central(rng, w, h, 300, 150, text(rng, 3), rng.choice([0.79, 0.5, 0.0])), "confidence"


def t_conf_missing(rng, w, h):
    return central(rng, w, h, 300, 150, text(rng, 3), None), "confidence"


def t_conf_before_chars(rng, w, h):
    return central(rng, w, h, 300, 150, text(rng, 20), 0.7), "confidence"


def t_chars_15(rng, w, h):
    return central(rng, w, h, 300, 150, text(rng, 15, spaces=rng.random() < 0.5), 0.9), "char_count"


def t_chars_14_spaced(rng, w, h):
    return central(rng, w, h, 300, 150, text(rng, 14, spaces=True), 0.9), None


def t_chars_blank(rng, w, h):
    return central(rng, w, h, 300, 150, rng.choice(["", " ", "   "]), 0.9), "char_count"


def t_border_exact(rng, w, h):
    # center exactly 5% from the left or top edge, mid-span on the other axis
    if rng.random() < 0.5:
        return box(w // 10, h, 60, 300, text(rng, 2), 0.9), None
    return box(w, h // 10, 300, 60, text(rng, 2), 0.9), None


def t_border_inside(rng, w, h):
    side = rng.randrange(4)
    if side == 0:
        return box(w // 10 - 1, h, 59, 300, text(rng, 2), 0.9), "border"
    if side == 1:
        return box(2 * w - w // 10 + 1, h, 59, 300, text(rng, 2), 0.9), "border"
    if side == 2:
        return box(w, h // 10 - 1, 300, 59, text(rng, 2), 0.9), "border"
    return box(w, 2 * h - h // 10 + 1, 300, 59, text(rng, 2), 0.9), "border"


def t_margin_exact(rng, w, h):
    # x center exactly 15%, y center at 10%: the x axis alone satisfies the margin
    if rng.random() < 0.5:
        return box(3 * w // 10, h // 5, 100, 100, text(rng, 2), 0.9), None
    return box(w // 5, 2 * h - 3 * h // 10, 100, 100, text(rng, 2), 0.9), None


def t_margin_inside(rng, w, h):
    # both centers half a pixel short of 15%, so no axis satisfies it
    cx2 = 3 * w // 10 - 1 if rng.random() < 0.5 else 2 * w - 3 * w // 10 + 1
    cy2 = 3 * h // 10 - 1 if rng.random() < 0.5 else 2 * h - 3 * h // 10 + 1
    return box(cx2, cy2, 101, 101, text(rng, 2), 0.9), "center_margin"


def t_area_exact(rng, w, h):
    n = rng.randint(1, 5)
    return central(rng, w, h, 100, 20 * n, text(rng, n), 0.9), "char_area"


def t_area_above(rng, w, h):
    n = rng.randint(1, 5)
    return central(rng, w, h, 100, 20 * n + 1, text(rng, n), 0.9), None


def t_area_small(rng, w, h):
    n = rng.randint(1, 5)
    return central(rng, w, h, 30, 30, text(rng, n), 0.9), "char_area"


TEMPLATES = [t_keep, t_keep, t_conf_exact, t_conf_low, t_conf_missing, t_conf_before_chars, t_chars_15,
             t_chars_14_spaced, t_chars_blank, t_border_exact, t_border_inside, t_margin_exact, t_margin_inside,
             t_area_exact, t_area_above, t_area_small]


def expected(boxes, rules, w, h, reject_resolution=False):
    if reject_resolution:
        return {"kept": False, "dropped_boxes": [], "reject_reason": "resolution"}
    dropped = [[i, r] for i, r in enumerate(rules) if r is not None]
    survivors = [i for i, r in enumerate(rules) if r is None]
    if len(survivors) > 10:
        ranked = sorted(survivors, key=lambda i: (-boxes[i]["confidence"], i))
        dropped += [[i, "max_boxes"] for i in ranked[10:]]
        dropped.sort()
        survivors = sorted(ranked[:10])
    e = {"kept": bool(survivors), "dropped_boxes": dropped}
    if not survivors:
        e["reject_reason"] = "no_boxes"
    return e


def record(idx, w, h, boxes, exp, lang):
    return {"image_id": f"r{idx:03d}", "width": w, "height": h, "caption": f"synthetic record {idx}",
            "language": lang, "boxes": boxes, "expect": exp}


def main():
    rng = random.Random(20240601)
    rows = []
    langs = ["zh", "en", "mixed"]

    def add(w, h, picks, reject_resolution=False):
        made = [t(rng, w, h) for t in picks]
        boxes = [b for b, _ in made]
        rules = [r for _, r in made]
        rows.append(record(len(rows), w, h, boxes, expected(boxes, rules, w, h, reject_resolution),
                           rng.choice(langs)))

    # every template once on every canvas
    for w, h in CANVASES:
        for t in TEMPLATES:
            add(w, h, [t])
    # resolution boundaries; passing sizes only get boxes placed centrally
    for w, h, rejected in RESOLUTION:
        for _ in range(2):
            add(w, h, [t_keep, t_conf_exact, t_area_above], reject_resolution=rejected)
    # box-count cap: 11..14 survivors, confidences drawn with ties
    for k in range(12):
        w, h = CANVASES[k % len(CANVASES)]
        n = 11 + k % 4
        picks = [t_keep] * n + [rng.choice(TEMPLATES)]
        made = [t(rng, w, h) for t in picks]
        for b, r in made:
            if r is None:
                b["confidence"] = rng.choice([0.85, 0.9, 0.9, 0.95])
        boxes = [b for b, _ in made]
        rules = [r for _, r in made]
        rows.append(record(len(rows), w, h, boxes, expected(boxes, rules, w, h), rng.choice(langs)))
    # records with no boxes
    for w, h in CANVASES[:2]:
        add(w, h, [])
    # mixed records up to the target size
    while len(rows) < 200:
        w, h = rng.choice(CANVASES)
        add(w, h, [rng.choice(TEMPLATES) for _ in range(rng.randint(1, 8))])

    # The templates lean on doubles hitting the thresholds exactly.
    for w, h in CANVASES:
        for side in (w, h):
            assert 0.05 * (2 * side) == side // 10 and 0.15 * (2 * side) == 3 * side // 10
    for row in rows:
        for b in row["boxes"]:
            assert 0 <= b["x1"] < b["x2"] <= row["width"] and 0 <= b["y1"] < b["y2"] <= row["height"], row

    with OUT.open("w", encoding="utf-8") as f:
        for row in rows:
            f.write(json.dumps(row, ensure_ascii=False) + "\n")
    print(f"wrote {len(rows)} records to {OUT}")


if __name__ == "__main__":
    main()
