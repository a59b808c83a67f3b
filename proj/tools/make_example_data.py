#!/usr/bin/env python3
"""Writes the simulated example cohorts in data/.

Control: log-logistic(shape 1.076, scale 0.5328). Experimental: same shape,
scale 1.2. Both are censored uniformly on [1, 6] and administratively at 4.5.
"""

import random
import sys
from pathlib import Path


def draw(rng, n, shape, scale):
    rows = []
    for _ in range(n):
        u = rng.random() or 0.5
        t = scale * (1.0 / u - 1.0) ** (1.0 / shape)
        c = min(rng.uniform(1.0, 6.0), 4.5)
        rows.append((max(round(min(t, c), 4), 1e-4), int(t <= c)))
    return rows


def write(path, rows):
    with open(path, "w") as f:
        f.write("time,event\n")
        for t, e in rows:
            f.write(f"{t:.4f},{e}\n")


def main():
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "data"
    rng = random.Random(20140501)
    write(out / "control.csv", draw(rng, 120, 1.076, 0.5328))
    write(out / "experimental.csv", draw(rng, 60, 1.076, 1.2))


if __name__ == "__main__":
    main()
