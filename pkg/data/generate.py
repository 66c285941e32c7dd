"""Regenerate the bundled demo datasets (already committed as CSV).

Run from the repo root: python3 data/generate.py
"""

from pathlib import Path

import numpy as np

HERE = Path(__file__).parent


def write_csv(path, header, X, labels):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row, lab in zip(X, labels):
            cells = [f"{v:.6f}" for v in row] + [lab]
            fh.write(",".join(cells) + "\n")


def blobs3(rng):
    """Three Gaussian clusters in 4-D, 300 rows."""
    centers = np.array(
        [
            [0.25, 0.30, 0.70, 0.40],
            [0.70, 0.65, 0.30, 0.55],
            [0.45, 0.85, 0.60, 0.80],
        ]
    )
    rows, labels = [], []
    names = ["alpha", "beta", "gamma"]
    for k, center in enumerate(centers):
        pts = rng.normal(center, 0.09, size=(100, 4))
        rows.append(np.clip(pts, 0.0, 1.0))
        labels += [names[k]] * 100
    X = np.vstack(rows)
    order = rng.permutation(len(X))
    return X[order], [labels[i] for i in order]


def coarse2(rng):
    """Two classes separable by axis-aligned cuts at multiples of 1/8.

    Samples keep a guard band around the cuts so coarse quantization does
    not flip any of them.
    """
    cuts = (0.5, 0.25)
    rows, labels = [], []
    while len(rows) < 400:
        pt = rng.random(2)
        if any(abs(pt[i] - c) < 0.03 for i, c in enumerate(cuts)):
            continue
        cls = "pos" if (pt[0] <= cuts[0]) ^ (pt[1] <= cuts[1]) else "neg"
        rows.append(pt)
        labels.append(cls)
    return np.array(rows), labels


def main():
    rng = np.random.Generator(np.random.Philox(key=20240101))
    X, labels = blobs3(rng)
    write_csv(HERE / "blobs3.csv", ["x0", "x1", "x2", "x3", "species"], X, labels)
    X, labels = coarse2(rng)
    write_csv(HERE / "coarse2.csv", ["u", "v", "side"], X, labels)


if __name__ == "__main__":
    main()
