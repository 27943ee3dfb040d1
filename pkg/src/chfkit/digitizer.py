"""Post-processing of digitized axial heat-flux curves.

Raw point clouds clicked off published figures are noisy: spurious
points, duplicated abscissae, unsorted order. The pipeline here is

  1. filter_outliers: moving-median / MAD residual screen,
  2. resample_profile: shape-preserving PCHIP onto a uniform n-node mesh
     with exact mean-1 renormalization,
  3. energy_balance_check: the integrated profile must reproduce the
     declared test power within a 2% gate.

Discontinuous curves (power steps) are handled by splitting at declared
breakpoints and interpolating each segment independently.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import mesh
from .dataset import AxialProfile
from .errors import SpanError, TooFewPoints
from .interp import Pchip

MIN_POINTS = 4
MAD_SIGMA = 1.4826  # normal-consistency factor for the median absolute deviation


@dataclass(frozen=True)
class RawCurve:
    points: tuple                     # ((z [m], q_norm), ...), any order
    geometry: tuple                   # (perimeter [m], length [m])
    declared_power: float | None = None  # W

    def __post_init__(self):
        if len(self.points) < MIN_POINTS:
            raise TooFewPoints(
                f"curve holds {len(self.points)} points, need >= {MIN_POINTS}")
        length = self.geometry[1]
        for z, _ in self.points:
            if not (0.0 <= z <= length * 1.01):
                raise SpanError(
                    f"point at z = {z:g} m outside [0, {length * 1.01:g}] m")


@dataclass(frozen=True)
class FilterPolicy:
    k: float = 3.5                    # MAD multiples tolerated
    window: int = 7                   # moving-median window (odd)
    max_removal_fraction: float = 0.2


@dataclass(frozen=True)
class EnergyBalance:
    passed: bool
    discrepancy: float                # |integrated - declared| / declared
    integrated_power: float           # W
    declared_power: float             # W


def _sorted_deduplicated(points):
    """Sort by z and average q over exact-duplicate z values."""
    by_z = {}
    for z, q in points:
        by_z.setdefault(z, []).append(q)
    return tuple((z, math.fsum(qs) / len(qs)) for z, qs in sorted(by_z.items()))


def _mad_pass(pts, policy: FilterPolicy):
    """One moving-median screen; returns indices of surviving points."""
    n = len(pts)
    q = np.array([p[1] for p in pts])
    w = min(policy.window, n)
    keep = []
    for i in range(n):
        start = min(max(i - w // 2, 0), n - w)
        block = q[start:start + w]
        med = float(np.median(block))
        sigma = MAD_SIGMA * float(np.median(np.abs(block - med)))
        if sigma == 0.0:
            keep.append(abs(q[i] - med) == 0.0)
        else:
            keep.append(abs(q[i] - med) <= policy.k * sigma)
    return np.nonzero(keep)[0]


def filter_outliers(curve: RawCurve, policy: FilterPolicy | None = None) -> RawCurve:
    """Remove points far from a moving-median baseline.

    The screen is iterated to a fixed point so that applying the filter
    to its own output changes nothing. Removal is capped at
    policy.max_removal_fraction of the original points; if the cap binds,
    the worst offenders go first.
    """
    if policy is None:
        policy = FilterPolicy()
    pts = list(_sorted_deduplicated(curve.points))
    budget = int(math.floor(len(pts) * policy.max_removal_fraction))
    while budget > 0:
        survivors = _mad_pass(pts, policy)
        n_removed = len(pts) - survivors.size
        if n_removed == 0:
            break
        if n_removed > budget:
            # keep the least-offending of the flagged points
            q = np.array([p[1] for p in pts])
            flagged = sorted(set(range(len(pts))) - set(survivors.tolist()))
            med = float(np.median(q))
            flagged.sort(key=lambda i: abs(q[i] - med), reverse=True)
            drop = set(flagged[:budget])
            survivors = np.array([i for i in range(len(pts)) if i not in drop])
            n_removed = budget
        pts = [pts[i] for i in survivors]
        budget -= n_removed
    if len(pts) < MIN_POINTS:
        raise TooFewPoints(
            f"filtering left {len(pts)} points, need >= {MIN_POINTS}")
    return RawCurve(tuple(pts), curve.geometry, curve.declared_power)


def pchip_eval(nodes, query: float) -> float:
    """Shape-preserving piecewise-cubic value at `query`.

    `nodes` is a sorted sequence of (z, y) pairs with strictly increasing
    z; monotone node data never overshoots its neighboring node values.
    """
    z = np.array([p[0] for p in nodes])
    y = np.array([p[1] for p in nodes])
    return float(Pchip(z, y)(query))


def _segment_edges(z_sorted, length, breakpoints):
    """Split point abscissae into segments at the declared breakpoints."""
    cuts = sorted(b for b in breakpoints if 0.0 < b < length)
    edges = [0.0] + cuts + [math.inf]
    segments = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        idx = np.nonzero((z_sorted >= lo) & (z_sorted < hi))[0]
        if idx.size:
            segments.append((lo, hi, idx))
    return segments


def resample_profile(curve: RawCurve, n_nodes: int = 40, *,
                     shape: str = "uniform", continuous: bool = True,
                     breakpoints=()) -> AxialProfile:
    """Interpolate a filtered curve onto a uniform n-node axial mesh.

    Node values are PCHIP evaluations clamped to the curve's z-span
    (constant extension at the ends) and floored at 0; the result is
    renormalized so its mesh-weighted mean is exactly 1. Discontinuous
    curves interpolate each declared segment independently; mesh nodes
    falling in a segment take that segment's value.
    """
    pts = _sorted_deduplicated(curve.points)
    z = np.array([p[0] for p in pts])
    q = np.array([p[1] for p in pts])
    length = curve.geometry[1]
    if z[-1] - z[0] < 0.95 * length:
        raise SpanError(
            f"curve spans {z[-1] - z[0]:g} m of a {length:g} m tube "
            "(needs >= 95% coverage)")
    targets = np.linspace(0.0, length, n_nodes)
    values = np.empty(n_nodes)
    if continuous or not breakpoints:
        interp = Pchip(z, q)
        values[:] = [interp(t, clamp=True) for t in targets]
    else:
        for lo, hi, idx in _segment_edges(z, length, breakpoints):
            mask = (targets >= lo) & (targets < hi)
            if not np.any(mask):
                continue
            if idx.size == 1:
                values[mask] = q[idx[0]]
            else:
                seg = Pchip(z[idx], q[idx])
                values[mask] = [seg(t, clamp=True) for t in targets[mask]]
    values = np.maximum(values, 0.0)
    wall_mesh = np.full(n_nodes, length / (n_nodes - 1))
    mean = mesh.weighted_mean(values, wall_mesh)
    if mean <= 0.0:
        raise SpanError("resampled profile integrates to zero power")
    values /= mean
    return AxialProfile(tuple(float(v) for v in values),
                        tuple(float(d) for d in wall_mesh),
                        shape, continuous)


def energy_balance_check(profile: AxialProfile, q_av: float, geometry,
                         declared_power: float,
                         threshold: float = 0.02) -> EnergyBalance:
    """Gate on |q_av * perimeter * integral(wall_power dz) - declared| / declared.

    The boundary is inclusive: a discrepancy equal to `threshold` passes.
    """
    perimeter = geometry[0]
    z = mesh.node_positions(profile.wall_mesh)
    integral = float(mesh.cumulative_integral(
        z, np.asarray(profile.wall_power, dtype=float))[-1])
    integrated = q_av * perimeter * integral
    discrepancy = abs(integrated - declared_power) / declared_power
    return EnergyBalance(discrepancy <= threshold, discrepancy,
                         integrated, declared_power)
