#!/usr/bin/env python3
"""Freeze golden fixtures for the Bowring and Biasi critical-heat-flux
correlations.

This script is an independent transcription of both published correlations
(double entry: the package reads its constants from
src/chfkit/data/correlation_coefficients.tsv, this script embeds its own).
The only shared input is the latent heat h_fg, interpolated from the
committed saturation table with scipy's PCHIP so that both routes see the
same property values to machine precision.

Outputs (committed):
  tests/fixtures/bowring_golden.tsv
  tests/fixtures/biasi_golden.tsv
"""

import math
import os

import numpy as np
from scipy.interpolate import PchipInterpolator

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
DATA = os.path.join(ROOT, "src", "chfkit", "data")
FIXTURE_DIR = os.path.join(ROOT, "tests", "fixtures")


def load_hfg_interpolator():
    P, hfg = [], []
    with open(os.path.join(DATA, "saturation_properties.tsv")) as f:
        for line in f:
            if line.startswith("#"):
                continue
            cols = line.split()
            P.append(float(cols[0]))
            hfg.append(float(cols[3]))
    return PchipInterpolator(np.array(P), np.array(hfg))


HFG = load_hfg_interpolator()


def bowring(pressure_pa, mass_flux, diameter, length, dh_sub_inlet):
    """Bowring (1972) round-tube critical heat flux, inlet-conditions form.

    Returns (q_raw [W/m2], h_fg used [J/kg]). q_raw may be negative.
    """
    p_mpa = pressure_pa / 1e6
    pr = 0.145 * p_mpa
    if pr < 1.0:
        F1 = (pr**18.942 * math.exp(20.89 * (1 - pr)) + 0.917) / 1.917
        F1_over_F2 = (pr**1.316 * math.exp(2.444 * (1 - pr)) + 0.309) / 1.309
        F3 = (pr**17.023 * math.exp(16.658 * (1 - pr)) + 0.667) / 1.667
    else:
        F1 = pr**-0.368 * math.exp(0.648 * (1 - pr))
        F1_over_F2 = pr**-0.448 * math.exp(0.245 * (1 - pr))
        F3 = pr**0.219
    F2 = F1 / F1_over_F2
    F4 = F3 * pr**1.649
    n = 2.0 - 0.5 * pr

    hfg = float(HFG(p_mpa))
    A = (2.317 * (hfg * diameter * mass_flux / 4.0) * F1
         / (1.0 + 0.0143 * F2 * math.sqrt(diameter) * mass_flux))
    C = (0.077 * F3 * diameter * mass_flux
         / (1.0 + 0.347 * F4 * (mass_flux / 1356.0) ** n))
    q = (A + 0.25 * diameter * mass_flux * dh_sub_inlet) / (C + length)
    return q, hfg


def biasi(diameter, mass_flux, pressure_pa, quality):
    """Biasi (1967) critical heat flux, local-conditions form.

    Legacy units inside: D [cm], G [g/(cm2 s)], p [bar], q [W/cm2].
    Returns (q_raw [W/m2], branch) with branch in {"low_quality",
    "high_quality"}. q_raw may be negative.
    """
    d_cm = diameter * 100.0
    g_cgs = mass_flux / 10.0
    p_bar = pressure_pa / 1e5
    n = 0.4 if diameter >= 0.01 else 0.6

    f_p = 0.7249 + 0.099 * p_bar * math.exp(-0.032 * p_bar)
    h_p = (-1.159 + 0.149 * p_bar * math.exp(-0.019 * p_bar)
           + 8.99 * p_bar / (10.0 + p_bar**2))

    q1 = (1.883e3 / (d_cm**n * g_cgs ** (1.0 / 6.0))
          * (f_p / g_cgs ** (1.0 / 6.0) - quality))
    q2 = 3.78e3 * h_p / d_cm**n * (1.0 - quality) / g_cgs**0.6

    if mass_flux <= 300.0 or q2 >= q1:
        return q2 * 1e4, "high_quality"
    return q1 * 1e4, "low_quality"


def fmt(x):
    return format(x, ".12e")


def write_bowring():
    rng = np.random.default_rng(42)
    rows = []
    # worked sanity point first
    rows.append((10e6, 3000.0, 0.01, 2.0, 500e3))
    # spanning the dataset envelope
    for _ in range(20):
        P = rng.uniform(0.5e6, 18.5e6)
        G = rng.uniform(300.0, 8000.0)
        D = rng.uniform(0.003, 0.028)
        L = rng.uniform(0.3, 3.6)
        dh = rng.uniform(0.0, 900e3)
        rows.append((P, G, D, L, dh))
    # two-phase inlet (negative subcooling) and a forced-negative output
    rows.append((7e6, 1500.0, 0.012, 1.5, -120e3))
    rows.append((10e6, 2000.0, 0.01, 2.0, -1.0e6))
    # outside the published envelope but still evaluable
    rows.append((19.5e6, 2000.0, 0.01, 2.0, 300e3))
    rows.append((5e6, 19000.0, 0.01, 2.0, 300e3))

    q_sane, _ = bowring(*rows[0])
    assert abs(q_sane - 2.42e6) < 0.03e6, q_sane

    path = os.path.join(FIXTURE_DIR, "bowring_golden.tsv")
    with open(path, "w") as f:
        f.write("# Bowring (1972) oracle fixtures, independent transcription\n")
        f.write("# columns: pressure_Pa mass_flux_kg_m2s diameter_m length_m"
                " inlet_subcooling_J_kg h_fg_J_kg q_raw_W_m2\n")
        for P, G, D, L, dh in rows:
            q, hfg = bowring(P, G, D, L, dh)
            f.write("\t".join(fmt(v) for v in (P, G, D, L, dh, hfg, q)) + "\n")
    print("wrote", path, f"({len(rows)} rows)")


def write_biasi():
    rng = np.random.default_rng(43)
    rows = []
    # worked sanity point first (D = 1 cm, G = 3000 kg/m2s, 100 bar, x = 0.2)
    rows.append((0.01, 3000.0, 10e6, 0.2))
    for _ in range(18):
        D = rng.uniform(0.003, 0.0375)
        G = rng.uniform(100.0, 6000.0)
        P = rng.uniform(0.27e6, 14e6)
        x = rng.uniform(-0.2, 0.8)
        rows.append((D, G, P, x))
    # low mass flux branch rule
    rows.append((0.008, 250.0, 5e6, 0.4))
    rows.append((0.012, 300.0, 7e6, 0.1))
    # quality high enough to force a negative low-quality branch value
    rows.append((0.02, 4000.0, 3e6, 0.95))
    # negative both branches (x > 1 is unphysical but exercises the flag)
    rows.append((0.01, 2000.0, 7e6, 1.05))
    # outside envelope: diameter and pressure
    rows.append((0.05, 2000.0, 7e6, 0.2))
    rows.append((0.01, 2000.0, 15e6, 0.2))

    q_sane, branch = biasi(*rows[0])
    assert abs(q_sane - 171.9e4) < 0.5e4, q_sane
    assert branch == "low_quality"

    path = os.path.join(FIXTURE_DIR, "biasi_golden.tsv")
    with open(path, "w") as f:
        f.write("# Biasi (1967) oracle fixtures, independent transcription\n")
        f.write("# columns: diameter_m mass_flux_kg_m2s pressure_Pa quality"
                " q_raw_W_m2 branch\n")
        for D, G, P, x in rows:
            q, branch = biasi(D, G, P, x)
            f.write("\t".join(fmt(v) for v in (D, G, P, x, q)) + f"\t{branch}\n")
    print("wrote", path, f"({len(rows)} rows)")


if __name__ == "__main__":
    os.makedirs(FIXTURE_DIR, exist_ok=True)
    write_bowring()
    write_biasi()
