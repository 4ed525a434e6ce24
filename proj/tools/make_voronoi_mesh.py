#!/usr/bin/env python3
# SPDX-License-Identifier: Apache-2.0
"""Write a bounded Voronoi mesh of the unit square as mesh JSON."""

import argparse
import json

import numpy as np
from scipy.spatial import Voronoi


def bounded_voronoi(points):
    mirrored = [points]
    for axis in (0, 1):
        for edge in (0.0, 1.0):
            m = points.copy()
            m[:, axis] = 2.0 * edge - m[:, axis]
            mirrored.append(m)
    vor = Voronoi(np.vstack(mirrored))
    regions = [vor.regions[vor.point_region[i]] for i in range(len(points))]
    return vor.vertices, regions


def lloyd(points, steps):
    for _ in range(steps):
        verts, regions = bounded_voronoi(points)
        for i, reg in enumerate(regions):
            poly = verts[reg]
            x, y = poly[:, 0], poly[:, 1]
            xn, yn = np.roll(x, -1), np.roll(y, -1)
            w = x * yn - xn * y
            a = w.sum() / 2.0
            points[i] = [((x + xn) * w).sum() / (6 * a), ((y + yn) * w).sum() / (6 * a)]
    return points


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--cells", type=int, default=100)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--lloyd", type=int, default=20)
    ap.add_argument("out")
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    points = lloyd(rng.random((args.cells, 2)), args.lloyd)
    verts, regions = bounded_voronoi(points)

    index = {}
    out_verts = []
    cells = []
    for reg in regions:
        cell = []
        for v in reg:
            p = [min(max(c, 0.0), 1.0) for c in verts[v]]
            p = [0.0 if abs(c) < 1e-12 else 1.0 if abs(c - 1.0) < 1e-12 else c for c in p]
            key = (round(p[0], 9), round(p[1], 9))
            if key not in index:
                index[key] = len(out_verts)
                out_verts.append(p)
            if index[key] not in cell:
                cell.append(index[key])
        cells.append(cell)

    with open(args.out, "w") as f:
        json.dump({"vertices": out_verts, "cells": cells}, f, indent=1)


if __name__ == "__main__":
    main()
