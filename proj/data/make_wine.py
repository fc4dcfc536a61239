#!/usr/bin/env python3
"""Export the UCI wine dataset (178 x 13, 3 classes) bundled with
scikit-learn to wine.csv. Run from the data/ directory."""
import csv

from sklearn.datasets import load_wine


def main() -> None:
    wine = load_wine()
    with open("wine.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(wine.feature_names) + ["class"])
        for row, label in zip(wine.data, wine.target):
            writer.writerow([repr(float(v)) for v in row]
                            + [wine.target_names[label]])


if __name__ == "__main__":
    main()
