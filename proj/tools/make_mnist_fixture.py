#!/usr/bin/env python3
"""Write a small MNIST subset in IDX format from the npm `mnist` package.

The package stores each digit as a flat list of 28*28 floats per image,
pixel / 255 rounded to three decimals, so round(x * 255) recovers the byte.

usage: make_mnist_fixture.py DIGITS_DIR OUT_PREFIX [PER_CLASS]
"""
import json
import struct
import sys
from pathlib import Path

ROWS = COLS = 28


def main() -> None:
    digits_dir = Path(sys.argv[1])
    prefix = Path(sys.argv[2])
    per_class = int(sys.argv[3]) if len(sys.argv) > 3 else 300

    by_class = []
    for c in range(10):
        flat = json.loads((digits_dir / f"{c}.json").read_text())["data"]
        count = len(flat) // (ROWS * COLS)
        if count < per_class:
            sys.exit(f"class {c} has only {count} images")
        by_class.append(flat)

    images = bytearray()
    labels = bytearray()
    # Interleave classes so any prefix of the file is balanced.
    for i in range(per_class):
        for c in range(10):
            start = i * ROWS * COLS
            images.extend(round(x * 255) for x in by_class[c][start:start + ROWS * COLS])
            labels.append(c)

    n = per_class * 10
    Path(f"{prefix}-images-idx3-ubyte").write_bytes(struct.pack(">IIII", 0x803, n, ROWS, COLS) + images)
    Path(f"{prefix}-labels-idx1-ubyte").write_bytes(struct.pack(">II", 0x801, n) + labels)


if __name__ == "__main__":
    main()
