#!/usr/bin/env python3
"""Regenerate ring.csv (7400 x 20, 2 classes) from the ringnorm recipe:
class 0 is N(0, 4*I), class 1 is N((a, ..., a), I) with a = 1/sqrt(20),
drawn 50/50 with a fixed seed. Run from the data/ directory."""
import csv
import math

import numpy as np

N = 7400
M = 20
SEED = 20522


def main() -> None:
    rng = np.random.default_rng(SEED)
    a = 1.0 / math.sqrt(M)
    n_zero = N // 2
    n_one = N - n_zero
    x0 = rng.normal(0.0, 2.0, size=(n_zero, M))
    x1 = rng.normal(a, 1.0, size=(n_one, M))
    with open("ring.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"x{j}" for j in range(M)] + ["class"])
        for row in x0:
            writer.writerow([f"{v:.6f}" for v in row] + ["0"])
        for row in x1:
            writer.writerow([f"{v:.6f}" for v in row] + ["1"])


if __name__ == "__main__":
    main()
