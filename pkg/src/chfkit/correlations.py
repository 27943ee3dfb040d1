"""Classical critical-heat-flux correlations with applicability envelopes.

Two round-tube correlations are provided in their native published forms:

* Bowring (1972), inlet-conditions form: takes the inlet subcooling
  enthalpy and predicts the average critical heat flux of the tube.
* Biasi (1967), local-conditions form: takes the local equilibrium quality
  and predicts the local critical heat flux, selecting the governing one
  of its low-quality and high-quality branches.

Every numeric constant is read from data/correlation_coefficients.tsv;
this module holds only the formula structure. Failure modes never raise:
a negative raw value sets the `negative_raw_output` flag and inputs
outside the published validity range set `out_of_envelope`. The raw value
is preserved for diagnostics; `chf` is NaN whenever it is unusable.
"""

import math
from dataclasses import dataclass
from importlib import resources

from . import waterprops
from .errors import FormatError, OutOfRange, UnknownCorrelation

_COEFFS = None


def _coeffs() -> dict:
    global _COEFFS
    if _COEFFS is None:
        table = {}
        text = resources.files("chfkit").joinpath(
            "data/correlation_coefficients.tsv").read_text()
        for line in text.splitlines():
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise FormatError(
                    f"coefficient line needs key/value/source: {line!r}")
            table[parts[0]] = float(parts[1])
        _COEFFS = table
    return _COEFFS


@dataclass(frozen=True)
class ChfPrediction:
    chf: float            # W/m2; NaN when not usable
    applicable: bool
    flags: frozenset      # subset of {negative_raw_output, out_of_envelope}
    raw: float            # W/m2 as evaluated, negative values preserved
    branch: str | None = None  # Biasi: "low_quality" | "high_quality"


_ENVELOPE_DIMS = ("pressure", "mass_flux", "diameter", "length")


def applicability_check(correlation: str, inputs: dict) -> frozenset:
    """Envelope flags for the given inputs (empty set means inside).

    A violated dimension contributes "<dimension>_out_of_envelope" and the
    summary flag "out_of_envelope" is included whenever any dimension is
    violated. Dimensions absent from `inputs` are not checked.
    """
    if correlation not in ("bowring", "biasi"):
        raise UnknownCorrelation(f"unknown correlation id {correlation!r}")
    c = _coeffs()
    flags = set()
    for dim in _ENVELOPE_DIMS:
        if dim not in inputs or inputs[dim] is None:
            continue
        lo = c[f"{correlation}.env.{dim}_min"]
        hi = c[f"{correlation}.env.{dim}_max"]
        if not (lo <= inputs[dim] <= hi):
            flags.add(f"{dim}_out_of_envelope")
    if flags:
        flags.add("out_of_envelope")
    return frozenset(flags)


def _finish(raw: float, envelope_flags: frozenset, branch=None) -> ChfPrediction:
    flags = {"out_of_envelope"} if "out_of_envelope" in envelope_flags else set()
    if not (raw > 0.0):  # negative, zero, or NaN
        flags.add("negative_raw_output")
    applicable = not flags
    chf = raw if raw > 0.0 else math.nan
    return ChfPrediction(chf, applicable, frozenset(flags), raw, branch)


def bowring_chf(pressure: float, mass_flux: float, diameter: float,
                length: float, inlet_subcooling_enthalpy: float) -> ChfPrediction:
    """Average critical heat flux [W/m2] of a uniformly heated round tube.

    `inlet_subcooling_enthalpy` is h_f(P) - h_in [J/kg], >= 0 for a
    subcooled inlet (negative values are accepted and represent a
    two-phase inlet).
    """
    c = _coeffs()
    envelope = applicability_check("bowring", {
        "pressure": pressure, "mass_flux": mass_flux,
        "diameter": diameter, "length": length})
    try:
        h_fg = waterprops.saturation_state(pressure).h_fg
    except OutOfRange:
        return ChfPrediction(math.nan, False,
                             frozenset({"out_of_envelope"}), math.nan)

    pr = c["bowring.pr_per_mpa"] * pressure / 1e6
    if pr < 1.0:
        f1 = (pr ** c["bowring.f1_pow"] * math.exp(c["bowring.f1_exp"] * (1 - pr))
              + c["bowring.f1_add"]) / c["bowring.f1_div"]
        f1_over_f2 = (pr ** c["bowring.f12_pow"]
                      * math.exp(c["bowring.f12_exp"] * (1 - pr))
                      + c["bowring.f12_add"]) / c["bowring.f12_div"]
        f3 = (pr ** c["bowring.f3_pow"] * math.exp(c["bowring.f3_exp"] * (1 - pr))
              + c["bowring.f3_add"]) / c["bowring.f3_div"]
    else:
        f1 = pr ** c["bowring.f1_hi_pow"] * math.exp(c["bowring.f1_hi_exp"] * (1 - pr))
        f1_over_f2 = (pr ** c["bowring.f12_hi_pow"]
                      * math.exp(c["bowring.f12_hi_exp"] * (1 - pr)))
        f3 = pr ** c["bowring.f3_hi_pow"]
    f2 = f1 / f1_over_f2
    f4 = f3 * pr ** c["bowring.f4_pr_pow"]
    n = c["bowring.n_base"] - c["bowring.n_pr_slope"] * pr

    a = (c["bowring.a_lead"] * (h_fg * diameter * mass_flux / c["bowring.a_flux_div"])
         * f1 / (1.0 + c["bowring.a_denom_coeff"] * f2 * math.sqrt(diameter) * mass_flux))
    denom = (c["bowring.c_lead"] * f3 * diameter * mass_flux
             / (1.0 + c["bowring.c_denom_coeff"] * f4
                * (mass_flux / c["bowring.g_ref"]) ** n))
    raw = (a + c["bowring.subcool_coeff"] * diameter * mass_flux
           * inlet_subcooling_enthalpy) / (denom + length)
    return _finish(raw, envelope)


def biasi_chf(diameter: float, mass_flux: float, pressure: float,
              quality: float) -> ChfPrediction:
    """Local critical heat flux [W/m2] at the given equilibrium quality."""
    c = _coeffs()
    envelope = applicability_check("biasi", {
        "pressure": pressure, "mass_flux": mass_flux, "diameter": diameter})

    d_cm = diameter * c["units.cm_per_m"]
    g_cgs = mass_flux * c["units.cgs_flux_per_si"]
    p_bar = pressure * c["units.bar_per_pa"]
    n = (c["biasi.n_large_diam"] if diameter >= c["biasi.n_diam_break"]
         else c["biasi.n_small_diam"])

    f_p = (c["biasi.f_base"]
           + c["biasi.f_lin"] * p_bar * math.exp(-c["biasi.f_exp"] * p_bar))
    h_p = (c["biasi.h_base"]
           + c["biasi.h_lin"] * p_bar * math.exp(-c["biasi.h_exp"] * p_bar)
           + c["biasi.h_frac_coeff"] * p_bar / (c["biasi.h_frac_add"] + p_bar ** 2))

    q1 = (c["biasi.q1_lead"] / (d_cm ** n * g_cgs ** c["biasi.g_exp"])
          * (f_p / g_cgs ** c["biasi.g_exp"] - quality))
    q2 = c["biasi.q2_lead"] * h_p / d_cm ** n * (1.0 - quality) / g_cgs ** c["biasi.q2_g_exp"]

    if mass_flux <= c["biasi.low_g_threshold"] or q2 >= q1:
        raw, branch = q2, "high_quality"
    else:
        raw, branch = q1, "low_quality"
    return _finish(raw * c["units.w_m2_per_w_cm2"], envelope, branch)
