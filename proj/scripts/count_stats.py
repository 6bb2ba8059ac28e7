#!/usr/bin/env python3
"""Counts a JSONL record file the slow obvious way and prints the expected
stats document. Used once to produce tests/data/stats_expected.json.

Conventions: whitespace is str.isspace(); every CJK ideograph, kana or
hangul syllable is a word of its own; any other maximal run of
non-whitespace is one word."""
import collections
import json
import re
import sys
import unicodedata


def spaced(c):
    return c.isspace()


def ideographic(c):
    name = unicodedata.name(c, "")
    return name.startswith(("CJK UNIFIED IDEOGRAPH", "CJK COMPATIBILITY IDEOGRAPH", "HIRAGANA", "KATAKANA",
                            "HANGUL SYLLABLE"))


def words(s):
    # put spaces around every ideograph, then split on whitespace
    return len("".join(f" {c} " if ideographic(c) else c for c in s).split())


def main(path):
    totals = {lang: collections.Counter() for lang in ("zh", "en", "mixed")}
    freq = collections.Counter()
    lang_chars = {lang: set() for lang in totals}
    per_image_words, per_image_boxes = collections.Counter(), collections.Counter()
    for line in open(path, encoding="utf-8"):
        r = json.loads(line)
        t = totals[r["language"]]
        t["samples"] += 1
        w = 0
        for b in r["boxes"]:
            s = b["text"]
            assert not re.search("[\x1c-\x1f\x85]", s)
            chars = [c for c in s if not spaced(c)]
            t["chars"] += len(chars)
            w += words(s)
            freq.update(chars)
            lang_chars[r["language"]].update(chars)
        t["words"] += w
        per_image_words[w] += 1
        per_image_boxes[len(r["boxes"])] += 1
        t["boxes"] += len(r["boxes"])

    def block(c, uniq):
        return {"samples": c["samples"], "chars": c["chars"], "words": c["words"], "unique_chars": uniq}

    everything = sum(totals.values(), collections.Counter())
    doc = block(everything, len(freq))
    doc["boxes"] = everything["boxes"]
    doc["by_language"] = {lang: block(totals[lang], len(lang_chars[lang])) for lang in totals}
    doc["words_per_image"] = {str(k): per_image_words[k] for k in sorted(per_image_words)}
    doc["boxes_per_image"] = {str(k): per_image_boxes[k] for k in sorted(per_image_boxes)}
    top = sorted(freq.items(), key=lambda kv: (-kv[1], ord(kv[0])))[:100]
    doc["top_chars"] = [[c, n] for c, n in top]
    json.dump(doc, sys.stdout, ensure_ascii=False, indent=1)
    print()


if __name__ == "__main__":
    main(sys.argv[1])
