"""Water/steam saturation and subcooled-liquid properties over 0.1-20 MPa.

Backend: two committed data tables (generated once from an IAPWS-IF97
reference implementation, see scripts/make_property_tables.py) interpolated
with monotone cubics. Saturation properties live on a 0.05 MPa pressure
grid; subcooled liquid enthalpy lives on a rectangular (pressure, theta)
grid with theta = T / t_sat(P), so every row spans 0 degC to the saturation
line. Queries outside the band raise OutOfRange; the backend never
extrapolates.
"""

from dataclasses import dataclass
from importlib import resources

import numpy as np

from .errors import OutOfRange, OutOfSpan
from .interp import Pchip, _slopes

P_MIN = 0.1e6   # Pa
P_MAX = 20.0e6  # Pa


@dataclass(frozen=True)
class SaturationState:
    pressure: float      # Pa
    t_sat: float         # degC
    h_f: float           # J/kg
    h_fg: float          # J/kg
    h_g: float           # J/kg


def _data_lines(name):
    text = resources.files("chfkit").joinpath(f"data/{name}").read_text()
    for line in text.splitlines():
        if line and not line.startswith("#"):
            yield line


class _SaturationTable:
    def __init__(self):
        rows = [list(map(float, ln.split())) for ln in
                _data_lines("saturation_properties.tsv")]
        grid = np.array(rows)
        p = grid[:, 0] * 1e6  # MPa -> Pa
        self.t_sat = Pchip(p, grid[:, 1])
        self.h_f = Pchip(p, grid[:, 2])
        self.h_fg = Pchip(p, grid[:, 3])


class _SubcooledTable:
    def __init__(self):
        lines = list(_data_lines("subcooled_enthalpy.tsv"))
        head = lines[0].split()
        if head[0] != "theta:":
            raise OutOfRange("subcooled table header missing theta axis")
        self.theta = np.array([float(v) for v in head[1:]])
        p_rows, h_rows = [], []
        for ln in lines[1:]:
            cols = ln.split()
            p_rows.append(float(cols[0]) * 1e6)
            h_rows.append([float(v) for v in cols[1:]])
        self.pressures = np.array(p_rows)
        self.h = np.array(h_rows)
        # theta-direction monotone slopes, one row per pressure
        self.d = np.array([_slopes(self.theta, row) for row in self.h])

    def evaluate(self, pressure, theta):
        """Interpolate along theta, then across pressure.

        The cubic in any pressure cell depends only on the two bracketing
        rows and their immediate neighbours (monotone slopes are local), so
        the cross-pressure interpolant is built on that four-row window;
        the value is identical to using the full pressure column.
        """
        th = self.theta
        if not (th[0] <= theta <= th[-1]):
            raise OutOfSpan(f"theta {theta!r} outside [{th[0]!r}, {th[-1]!r}]")
        j = min(int(np.searchsorted(th, theta, side="right")) - 1, th.size - 2)
        j = max(j, 0)
        k = min(int(np.searchsorted(self.pressures, pressure,
                                    side="right")) - 1,
                self.pressures.size - 2)
        k = max(k, 0)
        lo, hi = max(k - 1, 0), min(k + 2, self.pressures.size - 1)

        h = th[j + 1] - th[j]
        t = (theta - th[j]) / h
        t2 = t * t
        t3 = t2 * t
        column = (self.h[lo:hi + 1, j] * (2.0 * t3 - 3.0 * t2 + 1.0)
                  + h * self.d[lo:hi + 1, j] * (t3 - 2.0 * t2 + t)
                  + self.h[lo:hi + 1, j + 1] * (-2.0 * t3 + 3.0 * t2)
                  + h * self.d[lo:hi + 1, j + 1] * (t3 - t2))
        return Pchip(self.pressures[lo:hi + 1], column)(pressure)


_SAT = None
_SUB = None


def _sat():
    global _SAT
    if _SAT is None:
        _SAT = _SaturationTable()
    return _SAT


def _sub():
    global _SUB
    if _SUB is None:
        _SUB = _SubcooledTable()
    return _SUB


def _check_band(pressure):
    if not (P_MIN <= pressure <= P_MAX):
        raise OutOfRange(
            f"pressure {pressure/1e6:.4g} MPa outside supported band "
            f"[{P_MIN/1e6:g}, {P_MAX/1e6:g}] MPa")


def saturation_state(pressure: float) -> SaturationState:
    """Saturation properties at an absolute pressure [Pa]."""
    _check_band(pressure)
    t = _sat()
    t_sat = t.t_sat(pressure)
    h_f = t.h_f(pressure)
    h_fg = t.h_fg(pressure)
    # Store h_g = h_f + h_fg, then rebuild h_fg from the rounded sum: the
    # subtraction is exact (Sterbenz), so h_f + h_fg == h_g and
    # (h_g - h_f)/h_fg == 1.0 hold bit-exactly afterwards.
    h_g = h_f + h_fg
    h_fg = h_g - h_f
    return SaturationState(pressure=float(pressure), t_sat=t_sat,
                           h_f=h_f, h_fg=h_fg, h_g=h_g)


def subcooled_liquid_enthalpy(pressure: float, temperature: float) -> float:
    """Compressed-liquid enthalpy [J/kg] at pressure [Pa], temperature [degC]."""
    _check_band(pressure)
    t_sat = _sat().t_sat(pressure)
    if not (0.0 < temperature <= t_sat):
        raise OutOfRange(
            f"temperature {temperature:.4g} degC outside liquid band "
            f"(0, {t_sat:.4g}] at {pressure/1e6:.4g} MPa")
    return float(_sub().evaluate(pressure, temperature / t_sat))


def saturation_temperature_for_enthalpy(pressure: float, enthalpy: float) -> float:
    """Liquid temperature [degC] whose enthalpy matches.

    Used to derive <InletTemperature> from <InletEnthalpy>. Enthalpies at or
    above h_f map to the saturation temperature (two-phase inlet). The root
    is found by a bracketed secant search with Illinois damping, converging
    to 1e-4 J/kg in enthalpy or 1e-9 degC in temperature.
    """
    _check_band(pressure)
    state = saturation_state(pressure)
    if enthalpy >= state.h_f:
        return state.t_sat
    lo, hi = 1e-6, state.t_sat
    f_lo = subcooled_liquid_enthalpy(pressure, lo) - enthalpy
    if f_lo >= 0.0:
        raise OutOfRange(f"enthalpy {enthalpy:.6g} J/kg below 0 degC liquid")
    f_hi = subcooled_liquid_enthalpy(pressure, hi) - enthalpy
    if f_hi <= 0.0:
        return hi
    for _ in range(60):
        denom = f_hi - f_lo
        if denom == 0.0:
            mid = 0.5 * (lo + hi)
        else:
            mid = hi - f_hi * (hi - lo) / denom
            if not lo < mid < hi:
                mid = 0.5 * (lo + hi)
        f_mid = subcooled_liquid_enthalpy(pressure, mid) - enthalpy
        if abs(f_mid) <= 1e-4 or hi - lo <= 1e-9:
            return mid
        if f_mid < 0.0:
            lo, f_lo = mid, f_mid
            f_hi *= 0.5
        else:
            hi, f_hi = mid, f_mid
            f_lo *= 0.5
    return 0.5 * (lo + hi)


def equilibrium_quality(enthalpy: float, pressure: float) -> float:
    """Thermodynamic equilibrium quality x = (h - h_f)/h_fg (unbounded)."""
    state = saturation_state(pressure)
    return (enthalpy - state.h_f) / state.h_fg
