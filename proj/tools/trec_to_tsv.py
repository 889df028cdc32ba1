#!/usr/bin/env python3
"""Convert TREC question files (`COARSE:fine question text`) to label<TAB>text."""

import argparse
import sys


def convert(src, dst, fine):
    n = 0
    for lineno, raw in enumerate(src, 1):
        line = raw.decode("latin-1").strip()
        if not line:
            continue
        tag, _, text = line.partition(" ")
        if ":" not in tag or not text:
            sys.exit(f"line {lineno}: expected 'COARSE:fine text', got {line!r}")
        label = tag if fine else tag.split(":", 1)[0]
        dst.write(f"{label}\t{text.replace(chr(9), ' ')}\n")
        n += 1
    return n


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("input", help="e.g. train_5500.label or TREC_10.label")
    ap.add_argument("output")
    ap.add_argument("--fine", action="store_true", help="keep the 50 fine labels instead of the 6 coarse ones")
    args = ap.parse_args()
    with open(args.input, "rb") as src, open(args.output, "w", encoding="utf-8") as dst:
        n = convert(src, dst, args.fine)
    print(f"{n} questions written to {args.output}")


if __name__ == "__main__":
    main()
