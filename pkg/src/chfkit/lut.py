"""Lookup-table CHF prediction for round tubes.

Pipeline: trilinear interpolation of an 8 mm reference table over
(pressure, mass flux, equilibrium quality), a diameter correction factor
(0.008/D)^(1/2), a Tong-type non-uniform axial correction factor F(z),
and a critical-power search that scales the case's power by a factor
lambda until the channel's minimum CHF ratio reaches unity.

Table file format (delimited text, '#' comments allowed):

    pressure_axis_Pa: 1000000 10000000 20000000
    mass_flux_axis_kg_m2s: 500 2000 5000
    quality_axis: -0.5 0.0 0.5 1.0
    1000000 500 5.1e6 4.2e6 3.0e6 1.1e6
    1000000 2000 ...
    ... one line per (pressure, mass flux) pair, in any order, holding
    the CHF values [W/m2] across the quality axis.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import channel, mesh, waterprops
from .errors import (FormatError, GridError, NoConvergence, OutOfRange,
                     OutOfTable, SingularProfile)

REFERENCE_DIAMETER = 0.008    # m, table reference tube
DIAMETER_DOMAIN = (0.002, 0.05)  # m, published limits of the correction


@dataclass(frozen=True)
class LutTable:
    pressure_axis: np.ndarray    # Pa, strictly increasing
    mass_flux_axis: np.ndarray   # kg/(m2 s), strictly increasing
    quality_axis: np.ndarray     # dimensionless, strictly increasing
    values: np.ndarray           # W/m2, shape (n_p, n_g, n_x)


@dataclass(frozen=True)
class CCoefficientConfig:
    """Configuration of the Tong C coefficient.

    `constant` overrides the local-conditions formula with a fixed value
    [1/m]; `restrict_to_boiling` keeps F = 1 wherever local x <= 0.
    """
    constant: float | None = None
    restrict_to_boiling: bool = True


@dataclass(frozen=True)
class PredictConfig:
    tolerance: float = 1e-4          # on |min CHFR - 1|
    max_iter: int = 100
    bracket: tuple = (0.5, 2.0)      # initial lambda bracket
    direct_substitution: bool = False
    clamp_quality: bool = False      # clamp x to the quality axis, no error
    apply_axial_factor: bool = True
    c_coefficient: CCoefficientConfig = field(default_factory=CCoefficientConfig)


@dataclass(frozen=True)
class CriticalPowerResult:
    critical_power: float            # W
    chf_location: float              # m
    min_chfr_at_measured_power: float
    profile_of_chfr: tuple           # ((z, chfr), ...) at measured power
    power_ratio: float               # critical_power / case.power


# ---------------------------------------------------------------------------
# table loading and interpolation
# ---------------------------------------------------------------------------

_AXIS_HEADERS = ("pressure_axis_Pa:", "mass_flux_axis_kg_m2s:", "quality_axis:")


def _parse_axis(line: str, header: str) -> np.ndarray:
    try:
        vals = np.array([float(t) for t in line[len(header):].split()])
    except ValueError:
        raise FormatError(f"non-numeric entry in {header} line") from None
    if vals.size < 2:
        raise GridError(f"{header} axis needs at least 2 points")
    if not np.all(np.diff(vals) > 0):
        raise GridError(f"{header} axis is not strictly increasing")
    return vals


def load_table(table_file) -> LutTable:
    """Read a CHF lookup table from the documented text format."""
    with open(table_file) as f:
        lines = [ln.strip() for ln in f]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if len(lines) < 4:
        raise FormatError("table file is missing header or data lines")
    axes = []
    for header, line in zip(_AXIS_HEADERS, lines[:3]):
        if not line.startswith(header):
            raise FormatError(f"expected header {header!r}, got {line!r}")
        axes.append(_parse_axis(line, header))
    p_axis, g_axis, x_axis = axes

    values = np.full((p_axis.size, g_axis.size, x_axis.size), np.nan)
    for line in lines[3:]:
        toks = line.split()
        if len(toks) != 2 + x_axis.size:
            raise FormatError(
                f"data line carries {len(toks)} fields, expected "
                f"{2 + x_axis.size}: {line!r}")
        try:
            row = [float(t) for t in toks]
        except ValueError:
            raise FormatError(f"non-numeric entry in data line: {line!r}") from None
        ip = np.searchsorted(p_axis, row[0])
        ig = np.searchsorted(g_axis, row[1])
        if ip >= p_axis.size or p_axis[ip] != row[0]:
            raise GridError(f"pressure {row[0]:g} is not on the declared axis")
        if ig >= g_axis.size or g_axis[ig] != row[1]:
            raise GridError(f"mass flux {row[1]:g} is not on the declared axis")
        if not np.all(np.isnan(values[ip, ig])):
            raise GridError(f"duplicated row for pressure {row[0]:g}, "
                            f"mass flux {row[1]:g}")
        values[ip, ig] = row[2:]
    if np.any(np.isnan(values)):
        missing = int(np.isnan(values).all(axis=2).sum())
        raise GridError(f"grid is missing {missing} (pressure, mass flux) rows")
    if np.any(values < 0):
        raise GridError("table holds negative CHF values")
    return LutTable(p_axis, g_axis, x_axis, values)


def _cell(axis: np.ndarray, q: float, name: str, clamp: bool):
    if clamp:
        q = min(max(q, axis[0]), axis[-1])
    elif not (axis[0] <= q <= axis[-1]):
        raise OutOfTable(
            f"{name} {q:g} outside table span [{axis[0]:g}, {axis[-1]:g}]")
    i = min(int(np.searchsorted(axis, q, side="right")) - 1, axis.size - 2)
    i = max(i, 0)
    return i, (q - axis[i]) / (axis[i + 1] - axis[i])


def lookup_base(table: LutTable, pressure: float, mass_flux: float,
                quality: float, clamp_quality: bool = False) -> float:
    """Trilinear interpolation of the 8 mm reference CHF [W/m2]."""
    ip, tp = _cell(table.pressure_axis, pressure, "pressure", False)
    ig, tg = _cell(table.mass_flux_axis, mass_flux, "mass_flux", False)
    ix, tx = _cell(table.quality_axis, quality, "quality", clamp_quality)
    v = table.values[ip:ip + 2, ig:ig + 2, ix:ix + 2]
    wp = np.array([1.0 - tp, tp])
    wg = np.array([1.0 - tg, tg])
    wx = np.array([1.0 - tx, tx])
    return float(np.einsum("i,j,k,ijk->", wp, wg, wx, v))


def diameter_correction(chf_8mm: float, diameter: float) -> float:
    """Scale an 8 mm table value to the given tube diameter."""
    lo, hi = DIAMETER_DOMAIN
    if not (lo <= diameter <= hi):
        raise OutOfRange(
            f"diameter {diameter:g} m outside correction domain [{lo:g}, {hi:g}] m")
    return chf_8mm * math.sqrt(REFERENCE_DIAMETER / diameter)


# ---------------------------------------------------------------------------
# Tong-type axial correction factor
# ---------------------------------------------------------------------------

def _g1(w: float) -> float:
    # (e^w - 1)/w, stable near 0
    if abs(w) < 1e-4:
        return 1.0 + w / 2.0 + w * w / 6.0 + w ** 3 / 24.0
    return math.expm1(w) / w


def _g2(w: float) -> float:
    # (w e^w - e^w + 1)/w^2, stable near 0
    if abs(w) < 1e-4:
        return 0.5 + w / 3.0 + w * w / 8.0 + w ** 3 / 30.0
    return (w * math.exp(w) - math.expm1(w)) / (w * w)


def _kernel_integral(z: float, a: float, b: float, qa: float, qb: float,
                     c_coeff: float, linear: bool) -> float:
    """integral_a^b q(u) exp(-c (z - u)) du for one profile piece.

    The piece is linear from qa to qb when `linear`, else constant qa.
    Requires a <= b <= z.
    """
    delta = b - a
    if delta <= 0.0:
        return 0.0
    w = c_coeff * delta
    alpha = qa
    beta = (qb - qa) / delta if linear else 0.0
    pa = math.exp(-c_coeff * (z - a))
    if w < 700.0:
        g1, g2 = pa * _g1(w), pa * _g2(w)
    else:  # e^w would overflow; fold it into the (z - b) exponent
        pb = math.exp(-c_coeff * (z - b))
        g1 = (pb - pa) / w
        g2 = (pb * (w - 1.0) + pa) / (w * w)
    return delta * (alpha * g1 + beta * delta * g2)


def tong_c_coefficient(quality: float, mass_flux: float) -> float:
    """Local-conditions C [1/m] of the Tong memory-effect kernel."""
    from .correlations import _coeffs
    c = _coeffs()
    base = max(1.0 - quality, 0.0)
    brit = (c["units.brit_flux_per_si"] * mass_flux) ** c["tong.flux_exp"]
    return c["tong.lead"] * c["units.in_per_m"] * base ** c["tong.quality_exp"] / brit


def _f_factor(z_nodes: np.ndarray, q_nodes: np.ndarray, continuous: bool,
              z: float, c_coeff: float) -> float:
    """F(z) = C int_0^z q(u) e^{-C(z-u)} du / (q(z) (1 - e^{-C z}))."""
    if z <= z_nodes[0]:
        return 1.0
    # local flux and the piece geometry
    if continuous:
        i = min(int(np.searchsorted(z_nodes, z, side="right")) - 1,
                z_nodes.size - 2)
        t = (z - z_nodes[i]) / (z_nodes[i + 1] - z_nodes[i])
        q_local = (1.0 - t) * q_nodes[i] + t * q_nodes[i + 1]
        pieces = []
        for k in range(i + 1):
            b = min(z_nodes[k + 1], z)
            qb = q_nodes[k] + (q_nodes[k + 1] - q_nodes[k]) \
                * (b - z_nodes[k]) / (z_nodes[k + 1] - z_nodes[k])
            pieces.append((z_nodes[k], b, q_nodes[k], qb, True))
    else:
        # node-centered piecewise-constant cells
        bounds = np.concatenate((
            [z_nodes[0]], (z_nodes[:-1] + z_nodes[1:]) / 2.0, [z_nodes[-1]]))
        j = min(int(np.searchsorted(bounds, z, side="right")) - 1,
                z_nodes.size - 1)
        q_local = q_nodes[j]
        pieces = []
        for k in range(j + 1):
            b = min(bounds[k + 1], z)
            pieces.append((bounds[k], b, q_nodes[k], q_nodes[k], False))
    if q_local == 0.0:
        raise SingularProfile(f"local heat flux is zero at z = {z:g} m")
    if c_coeff * z < 1e-12:
        # C -> 0 limit: ratio of the running mean to the local flux
        total = sum((b - a) * ((qa + qb) / 2.0 if lin else qa)
                    for a, b, qa, qb, lin in pieces)
        return total / (z * q_local)
    num = c_coeff * sum(
        _kernel_integral(z, a, b, qa, qb, c_coeff, lin)
        for a, b, qa, qb, lin in pieces)
    den = q_local * -math.expm1(-c_coeff * z)
    return num / den


def axial_correction_factor(case, z: float,
                            config: CCoefficientConfig | None = None) -> float:
    """Tong-type non-uniform flux correction factor at elevation z."""
    if config is None:
        config = CCoefficientConfig()
    z_nodes = case.profile.positions()
    q_nodes = np.asarray(case.profile.wall_power, dtype=float)
    if not (z_nodes[0] <= z <= z_nodes[-1] * (1.0 + 1e-9)):
        raise OutOfRange(f"z = {z:g} m outside the heated length")
    profile = channel.quality_profile(case)
    x_local = float(np.interp(z, profile.z, profile.x))
    if config.restrict_to_boiling and x_local <= 0.0:
        return 1.0
    c_coeff = (config.constant if config.constant is not None
               else tong_c_coefficient(x_local, case.mass_flux))
    return _f_factor(z_nodes, q_nodes, case.profile.continuous, z, c_coeff)


# ---------------------------------------------------------------------------
# critical-power search
# ---------------------------------------------------------------------------

def _chfr_profile(case, table: LutTable, config: PredictConfig,
                  z_nodes, q_norm, rise, h_in, sat, scale: float):
    """CHFR at every mesh node for power scaled by `scale`.

    Returns (chfr array, x array). Nodes with zero local flux carry inf.
    """
    h = h_in + scale * rise
    x = (h - sat.h_f) / sat.h_fg
    k_d = math.sqrt(REFERENCE_DIAMETER / case.diameter)
    chfr = np.empty(z_nodes.size)
    for i in range(z_nodes.size):
        q_local = scale * case.heat_flux_avg * q_norm[i]
        if q_local <= 0.0:
            chfr[i] = math.inf
            continue
        try:
            base = lookup_base(table, case.pressure, case.mass_flux,
                               float(x[i]), config.clamp_quality)
        except OutOfTable as exc:
            raise OutOfTable(
                f"test case {case.test_id}: {exc} at node z = "
                f"{z_nodes[i]:g} m (P = {case.pressure:g} Pa, "
                f"G = {case.mass_flux:g} kg/(m2 s), x = {x[i]:.4f})") from exc
        f_i = 1.0
        if config.apply_axial_factor and case.heating == "non-uniform":
            cc = config.c_coefficient
            if not (cc.restrict_to_boiling and x[i] <= 0.0):
                c_coeff = (cc.constant if cc.constant is not None
                           else tong_c_coefficient(float(x[i]), case.mass_flux))
                f_i = _f_factor(z_nodes, q_norm, case.profile.continuous,
                                float(z_nodes[i]), c_coeff)
        chfr[i] = base * k_d / (f_i * q_local)
    return chfr, x


def _refine_location(z: np.ndarray, chfr: np.ndarray, i: int) -> float:
    """Parabolic refinement of the argmin node (edges stay unrefined)."""
    if i == 0 or i == z.size - 1:
        return float(z[i])
    if not (math.isfinite(chfr[i - 1]) and math.isfinite(chfr[i + 1])):
        return float(z[i])
    s_left = (chfr[i] - chfr[i - 1]) / (z[i] - z[i - 1])
    s_right = (chfr[i + 1] - chfr[i]) / (z[i + 1] - z[i])
    if s_right == s_left:
        return float(z[i])
    # zero of the linearly interpolated slope between the two secant
    # midpoints; equals the vertex of the parabola through the 3 points
    m_left = (z[i - 1] + z[i]) / 2.0
    m_right = (z[i] + z[i + 1]) / 2.0
    z_star = m_left - s_left * (m_right - m_left) / (s_right - s_left)
    return float(min(max(z_star, z[i - 1]), z[i + 1]))


def predict_critical_power(case, table: LutTable,
                           config: PredictConfig | None = None) -> CriticalPowerResult:
    """Critical power of a case by scaling its power until min CHFR = 1."""
    if config is None:
        config = PredictConfig()
    z_nodes = case.profile.positions()
    q_norm = np.asarray(case.profile.wall_power, dtype=float)
    sat = waterprops.saturation_state(case.pressure)
    h_in = channel._inlet_enthalpy(case)
    flux = case.heat_flux_avg * q_norm
    rise = (case.perimeter / (case.mass_flux * case.area)) \
        * mesh.cumulative_integral(z_nodes, flux)

    def min_chfr(scale):
        chfr, _ = _chfr_profile(case, table, config, z_nodes, q_norm,
                                rise, h_in, sat, scale)
        return chfr

    chfr_measured = min_chfr(1.0)
    i_measured = int(np.argmin(chfr_measured))
    min_measured = float(chfr_measured[i_measured])
    profile_pairs = tuple(zip(z_nodes.tolist(), chfr_measured.tolist()))

    if config.direct_substitution:
        # local substitution: scale the measured flux shape by min CHFR
        return CriticalPowerResult(
            critical_power=case.power * min_measured,
            chf_location=_refine_location(z_nodes, chfr_measured, i_measured),
            min_chfr_at_measured_power=min_measured,
            profile_of_chfr=profile_pairs, power_ratio=min_measured)

    spent = 0

    def g(scale):
        nonlocal spent
        spent += 1
        if spent > config.max_iter:
            raise NoConvergence(
                f"test case {case.test_id}: critical-power search used more "
                f"than {config.max_iter} evaluations")
        chfr = min_chfr(scale)
        return float(np.min(chfr)) - 1.0, chfr

    lo, hi = config.bracket
    g_lo, _ = g(lo)
    g_hi, _ = g(hi)
    while g_lo < 0.0:          # even `lo` power exceeds critical: shrink
        hi, g_hi = lo, g_lo
        lo /= 2.0
        g_lo, _ = g(lo)
    while g_hi > 0.0:          # even `hi` power is below critical: grow
        lo, g_lo = hi, g_hi
        hi *= 2.0
        g_hi, _ = g(hi)

    lam, g_mid, chfr_mid = lo, g_lo, None
    while True:
        lam = (lo + hi) / 2.0
        g_mid, chfr_mid = g(lam)
        if abs(g_mid) <= config.tolerance:
            break
        if g_mid > 0.0:
            lo = lam
        else:
            hi = lam
        if hi - lo <= 1e-15 * max(1.0, lam):
            raise NoConvergence(
                f"test case {case.test_id}: bracket collapsed at lambda = "
                f"{lam:.6g} with min CHFR {1.0 + g_mid:.6g}")

    i_crit = int(np.argmin(chfr_mid))
    return CriticalPowerResult(
        critical_power=case.power * lam,
        chf_location=_refine_location(z_nodes, chfr_mid, i_crit),
        min_chfr_at_measured_power=min_measured,
        profile_of_chfr=profile_pairs, power_ratio=lam)
