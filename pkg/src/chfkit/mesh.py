"""Axial mesh conventions shared by the profile, channel, and table modules.

A profile stores node-centered values with a mesh-spacing list <WallMesh>.
Node positions are accumulated from the spacings with the first node pinned
to the inlet (z = 0):

    z[0] = 0,  z[i] = z[i-1] + (dz[i-1] + dz[i]) / 2

so each node sits at the center of a cell of width dz[i] (half cells at the
two ends). The last node lands on the heated length when the spacings are
consistent; the validator enforces this to 0.1%. A uniform 2-node profile
therefore carries wall_mesh = [L, L] (nodes at 0 and L), and a uniform
40-node profile carries 40 entries of L/39.

Integration weights are the trapezoid weights of the node positions, which
by the midpoint construction equal the in-span cell widths.
"""

import numpy as np

from .errors import MeshError


def node_positions(wall_mesh) -> np.ndarray:
    """Node coordinates z [m] accumulated from mesh spacings."""
    dz = np.asarray(wall_mesh, dtype=float)
    if dz.ndim != 1 or dz.size < 2:
        raise MeshError(f"need at least 2 mesh spacings, got {dz.size}")
    if not np.all(dz > 0.0):
        raise MeshError("non-positive mesh spacing")
    z = np.empty(dz.size)
    z[0] = 0.0
    z[1:] = np.cumsum((dz[:-1] + dz[1:]) / 2.0)
    return z


def trapezoid_weights(z) -> np.ndarray:
    """Integration weights for node values at positions z (sum = span)."""
    z = np.asarray(z, dtype=float)
    if z.size < 2:
        raise MeshError("need at least 2 nodes")
    w = np.empty(z.size)
    w[0] = (z[1] - z[0]) / 2.0
    w[-1] = (z[-1] - z[-2]) / 2.0
    w[1:-1] = (z[2:] - z[:-2]) / 2.0
    return w


def weighted_mean(values, wall_mesh) -> float:
    """Mesh-weighted mean of node values (the <WallPower> normalization)."""
    z = node_positions(wall_mesh)
    w = trapezoid_weights(z)
    return float(np.dot(w, np.asarray(values, dtype=float)) / np.sum(w))


def cumulative_integral(z, values) -> np.ndarray:
    """Trapezoid cumulative integral of node values, evaluated at the nodes.

    For discontinuous node-cell (piecewise-constant) profiles the cumulative
    integral at the node positions coincides with the trapezoid rule, so this
    form serves both continuity conventions.
    """
    z = np.asarray(z, dtype=float)
    v = np.asarray(values, dtype=float)
    out = np.empty(z.size)
    out[0] = 0.0
    out[1:] = np.cumsum((v[:-1] + v[1:]) / 2.0 * np.diff(z))
    return out
