"""Generates the bundled sparse binary-classification dataset.

Rows are nonnegative, unit-norm sparse vectors over 200 features whose
frequencies follow a Zipf-like law; labels come from a fixed random linear
rule with 5% of them flipped. Values are rounded to 6 decimals so the files
are already in canonical LIBSVM form.
"""

import numpy as np

DIM = 200
N_TRAIN = 1200
N_TEST = 600
SEED = 20240611


def make(rng, n, w):
    freq = 1.0 / np.arange(1, DIM + 1) ** 0.8
    freq /= freq.sum()
    lines = []
    for _ in range(n):
        nnz = rng.integers(5, 21)
        idx = np.sort(rng.choice(DIM, size=nnz, replace=False, p=freq))
        val = rng.gamma(2.0, 1.0, size=nnz)
        val /= np.linalg.norm(val)
        val = np.maximum(np.round(val, 6), 0.001)
        margin = float(val @ w[idx]) + 0.05 * rng.standard_normal()
        label = 1 if margin > 0 else -1
        if rng.random() < 0.05:
            label = -label
        pairs = " ".join(f"{i + 1}:{repr(float(v))}" for i, v in zip(idx, val))
        lines.append(f"{label} {pairs}")
    return "\n".join(lines) + "\n"


def main():
    rng = np.random.default_rng(SEED)
    w = rng.standard_normal(DIM)
    with open("train.svm", "w") as f:
        f.write(make(rng, N_TRAIN, w))
    with open("test.svm", "w") as f:
        f.write(make(rng, N_TEST, w))


if __name__ == "__main__":
    main()
