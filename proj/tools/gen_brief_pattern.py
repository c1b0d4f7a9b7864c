#!/usr/bin/env python3
"""Regenerates data/brief_pattern.bin.

256 test pairs drawn from an isotropic Gaussian (sigma = 31/5) and kept inside
the radius-15 disk so that every steered pair stays inside the 31x31 patch.
Each record is four signed bytes: x1 y1 x2 y2.
"""
import random
import struct
import sys

SEED = 20160713
RADIUS = 15
SIGMA = 31.0 / 5.0


def draw_point(rng):
    while True:
        x = int(round(rng.gauss(0.0, SIGMA)))
        y = int(round(rng.gauss(0.0, SIGMA)))
        if x * x + y * y <= RADIUS * RADIUS:
            return x, y


def main(path):
    rng = random.Random(SEED)
    pairs = []
    while len(pairs) < 256:
        a = draw_point(rng)
        b = draw_point(rng)
        if a == b or (a, b) in pairs:
            continue
        pairs.append((a, b))
    with open(path, "wb") as f:
        for (x1, y1), (x2, y2) in pairs:
            f.write(struct.pack("<bbbb", x1, y1, x2, y2))


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data/brief_pattern.bin")
