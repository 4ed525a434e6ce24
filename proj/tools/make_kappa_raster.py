#!/usr/bin/env python3
# SPDX-License-Identifier: Apache-2.0
"""Write synthetic inverse-permeability rasters for the fibrous and foam cases.

Pixels in the solid phase get kappa^{-1} = 1e6, pore pixels get 1.  Output
format: first line "nx ny", then ny rows of nx values, top row first.
"""
import argparse

import numpy as np
from scipy.spatial import Voronoi

KMIN, KMAX = 1.0, 1e6


def stroke(mask, xx, yy, a, b, width):
    """Mark pixels within width/2 of the segment a-b (unit-square coordinates)."""
    d = b - a
    t = np.clip(((xx - a[0]) * d[0] + (yy - a[1]) * d[1]) / max(d @ d, 1e-300), 0.0, 1.0)
    dist = np.hypot(xx - a[0] - t * d[0], yy - a[1] - t * d[1])
    mask |= dist <= 0.5 * width


def grid(n):
    c = (np.arange(n) + 0.5) / n
    xx, yy = np.meshgrid(c, c[::-1])  # row 0 is the top row
    return xx, yy


def fibrous(n, rng, count=40, width=0.018):
    xx, yy = grid(n)
    mask = np.zeros((n, n), dtype=bool)
    for _ in range(count):
        centre = rng.uniform(0.05, 0.95, 2)
        angle = rng.normal(0.0, 0.5)  # fibres lie mostly along the flow
        half = rng.uniform(0.1, 0.3)
        d = half * np.array([np.cos(angle), np.sin(angle)])
        stroke(mask, xx, yy, centre - d, centre + d, width)
    return mask


def foam(n, rng, cells=30, width=0.02, open_fraction=0.35):
    xx, yy = grid(n)
    pts = rng.uniform(0, 1, (cells, 2))
    vor = Voronoi(np.vstack([pts, pts * [-1, 1], pts * [1, -1], [2, 0] - pts * [1, -1], [0, 2] - pts * [-1, 1]]))
    mask = np.zeros((n, n), dtype=bool)
    for a, b in vor.ridge_vertices:
        if a < 0 or b < 0 or rng.uniform() < open_fraction:
            continue
        stroke(mask, xx, yy, vor.vertices[a], vor.vertices[b], width)
    return mask


def write(path, mask):
    n_y, n_x = mask.shape
    values = np.where(mask, KMAX, KMIN)
    with open(path, "w") as f:
        f.write(f"{n_x} {n_y}\n")
        for row in values:
            f.write(" ".join(f"{v:g}" for v in row) + "\n")


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("kind", choices=["fibrous", "foam"])
    p.add_argument("out")
    p.add_argument("--n", type=int, default=128)
    p.add_argument("--seed", type=int, default=7)
    a = p.parse_args()
    rng = np.random.default_rng(a.seed)
    write(a.out, fibrous(a.n, rng) if a.kind == "fibrous" else foam(a.n, rng))


if __name__ == "__main__":
    main()
