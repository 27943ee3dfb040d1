#!/usr/bin/env python3
"""Freeze monotone-cubic interpolation fixtures computed with scipy.

scipy.interpolate.PchipInterpolator is the oracle for the hand-written
interpolator in chfkit.interp; the values frozen here must be reproduced
to near machine precision. Also freezes the end-to-end digitizer golden
case: a smooth sampled profile with one injected spike, resampled on a
uniform 40-node mesh after the spike is dropped.

Outputs (committed):
  tests/fixtures/pchip_golden.json
  tests/fixtures/digitizer_golden.json
"""

import json
import math
import os

import numpy as np
from scipy.interpolate import PchipInterpolator

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
FIXTURE_DIR = os.path.join(ROOT, "tests", "fixtures")

rng = np.random.default_rng(20260815)


def make_case(x, y, q):
    f = PchipInterpolator(np.asarray(x, float), np.asarray(y, float))
    return {"x": list(map(float, x)), "y": list(map(float, y)),
            "q": list(map(float, q)), "v": [float(f(t)) for t in q]}


def pchip_cases():
    cases = []
    # squares at integer nodes; 1.5 is the worked sanity query
    cases.append(make_case([0, 1, 2, 3], [0, 1, 4, 9],
                           [1.5, 0.25, 0.5, 1.0, 2.75, 3.0, 0.0]))
    # monotone data on a non-uniform grid
    x = [0.0, 0.4, 1.1, 1.35, 2.9, 4.0, 6.5]
    y = [1.0, 1.2, 3.7, 3.9, 4.0, 7.5, 7.6]
    cases.append(make_case(x, y, [0.2, 0.9, 1.2, 2.0, 3.3, 5.0, 6.49]))
    # plateau: equal adjacent values force zero slopes
    x = [0, 1, 2, 3, 4, 5]
    y = [0.0, 2.0, 2.0, 2.0, 5.0, 6.0]
    cases.append(make_case(x, y, [0.5, 1.5, 2.5, 3.25, 3.75, 4.5]))
    # oscillatory data
    x = np.linspace(0.0, 3.0, 9)
    y = np.sin(2.3 * x) + 0.3 * x
    cases.append(make_case(x, y, np.linspace(0.05, 2.95, 13)))
    # two points degenerate to a straight line
    cases.append(make_case([1.0, 4.0], [2.0, -1.0], [1.0, 1.7, 2.5, 3.9, 4.0]))
    # three points, mixed signs of secant slopes
    cases.append(make_case([0.0, 1.0, 2.5], [1.0, -1.0, 0.5],
                           [0.3, 0.9, 1.1, 1.9, 2.4]))
    # random strictly increasing sample
    x = np.sort(rng.uniform(-5.0, 5.0, 14))
    y = np.cumsum(rng.uniform(0.0, 2.0, 14))
    q = rng.uniform(x[0], x[-1], 17)
    cases.append(make_case(x, y, q))
    # random non-monotone sample
    x = np.sort(rng.uniform(0.0, 10.0, 11))
    y = rng.normal(0.0, 3.0, 11)
    q = rng.uniform(x[0], x[-1], 17)
    cases.append(make_case(x, y, q))
    return cases


def digitizer_case():
    length = 2.0
    n_nodes = 40
    z = np.linspace(0.0, length, 30)
    q = 1.0 + 0.35 * np.sin(math.pi * z / length) + 0.08 * z / length
    spike_index = 14
    q_noisy = q.copy()
    q_noisy[spike_index] *= 4.0   # unambiguous outlier

    keep = np.ones(len(z), bool)
    keep[spike_index] = False
    f = PchipInterpolator(z[keep], q[keep])
    zi = np.linspace(0.0, length, n_nodes)
    v = f(zi)

    # trapezoid weights on the uniform node mesh
    w = np.empty(n_nodes)
    w[0] = (zi[1] - zi[0]) / 2
    w[-1] = (zi[-1] - zi[-2]) / 2
    w[1:-1] = (zi[2:] - zi[:-2]) / 2
    mean = float(np.sum(w * v) / length)
    v = v / mean

    return {
        "length": length,
        "n_nodes": n_nodes,
        "z": [float(t) for t in z],
        "q": [float(t) for t in q_noisy],
        "spike_index": spike_index,
        "expected_wall_power": [float(t) for t in v],
        "expected_wall_mesh": [length / (n_nodes - 1)] * n_nodes,
    }


def main():
    os.makedirs(FIXTURE_DIR, exist_ok=True)
    path = os.path.join(FIXTURE_DIR, "pchip_golden.json")
    with open(path, "w") as f:
        json.dump({"cases": pchip_cases()}, f, indent=1)
    print("wrote", path)

    path = os.path.join(FIXTURE_DIR, "digitizer_golden.json")
    with open(path, "w") as f:
        json.dump(digitizer_case(), f, indent=1)
    print("wrote", path)


if __name__ == "__main__":
    main()
