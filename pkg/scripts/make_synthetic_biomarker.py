"""Regenerate data/synthetic_biomarker.csv.

A made-up population shaped like a body-mass-index screening extract:
``bmi`` is the marker, ``diabetes`` the disease label, ``weight`` a
concomitant that is strongly but imperfectly related to the marker, and
``cholesterol`` a nearly uninformative concomitant. Values are rounded to one
decimal so the marker has ties, and about 2% of cells are blank.
"""

import csv
import sys

import numpy as np


def main(path="data/synthetic_biomarker.csv", seed=2024):
    rng = np.random.default_rng(seed)
    n0, n1 = 1600, 400
    label = np.r_[np.zeros(n0, dtype=int), np.ones(n1, dtype=int)]
    log_bmi = np.where(label == 1, rng.normal(np.log(33.2), 0.20, n0 + n1), rng.normal(np.log(27.5), 0.21, n0 + n1))
    bmi = np.exp(log_bmi)
    height = rng.normal(1.70, 0.09, n0 + n1)
    weight = bmi * height**2
    chol = rng.normal(195.0, 38.0, n0 + n1) - 4.0 * (bmi - 28.0) / 5.0
    rows = []
    for i in range(n0 + n1):
        row = [f"{bmi[i]:.1f}", str(label[i]), f"{weight[i]:.1f}", f"{chol[i]:.0f}"]
        for j in range(4):
            if rng.random() < 0.005:
                row[j] = ""
        rows.append(row)
    order = rng.permutation(len(rows))
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["bmi", "diabetes", "weight", "cholesterol"])
        writer.writerows(rows[i] for i in order)


if __name__ == "__main__":
    main(*sys.argv[1:])
