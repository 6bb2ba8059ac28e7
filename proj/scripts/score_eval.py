#!/usr/bin/env python3
"""Scores an eval-pair JSONL file with plain recursive definitions and prints
the expected aggregate. Used once to produce tests/data/eval_expected.json."""
import functools
import json
import sys
import unicodedata


def lev(a, b):
    @functools.lru_cache(maxsize=None)
    def d(i, j):
        if i == 0 or j == 0:
            return i + j
        return min(d(i - 1, j) + 1, d(i, j - 1) + 1, d(i - 1, j - 1) + (a[i - 1] != b[j - 1]))
    return d(len(a), len(b))


def lcs(a, b):
    @functools.lru_cache(maxsize=None)
    def l(i, j):
        if i == 0 or j == 0:
            return 0
        if a[i - 1] == b[j - 1]:
            return l(i - 1, j - 1) + 1
        return max(l(i - 1, j), l(i, j - 1))
    return l(len(a), len(b))


def main(path):
    acc = dist = hits = n = 0
    for line in open(path, encoding="utf-8"):
        p = json.loads(line)
        pred = unicodedata.normalize("NFC", p["predicted"])
        truth = unicodedata.normalize("NFC", p["truth"])
        acc += lcs(pred, truth) / len(truth)
        dist += lev(pred, truth) / max(len(pred), len(truth))
        hits += pred.strip() == truth.strip()
        n += 1
    json.dump({"acc": acc / n, "pwacc": hits / n, "ned": 1 - dist / n, "pair_count": n}, sys.stdout, indent=1)
    print()


if __name__ == "__main__":
    main(sys.argv[1])
