"""Shared fixtures: synthetic cases, tables, and tuning for property tests."""

import math
import os

import numpy as np
import pytest
from hypothesis import settings

from chfkit import dataset, mesh, waterprops

settings.register_profile("ci", deadline=None, max_examples=60)
settings.load_profile("ci")

FIXTURE_DIR = os.path.join(os.path.dirname(__file__), "fixtures")


def fixture_path(name: str) -> str:
    return os.path.join(FIXTURE_DIR, name)


def make_uniform_case(test_id=1, diameter=0.01, length=2.0, pressure=10e6,
                      mass_flux=2000.0, heat_flux_avg=1e6,
                      inlet_subcooling=200e3, **kw):
    h_in = waterprops.saturation_state(pressure).h_f - inlet_subcooling
    return dataset.uniform_case(test_id, diameter, length, pressure,
                                mass_flux, heat_flux_avg,
                                inlet_enthalpy=h_in, **kw)


def make_nonuniform_case(test_id=2, diameter=0.01, length=2.0, pressure=10e6,
                         mass_flux=2000.0, heat_flux_avg=1e6,
                         inlet_subcooling=200e3, n_nodes=40,
                         shape="middle-peaked", continuous=True,
                         wall_power=None, chf_location=None,
                         quality_values=None):
    z = np.linspace(0.0, length, n_nodes)
    if wall_power is None:
        wall_power = 1.0 + 0.3 * np.sin(np.pi * z / length)
    wall_power = np.asarray(wall_power, dtype=float)
    wall_mesh = np.full(n_nodes, length / (n_nodes - 1))
    wall_power = wall_power / mesh.weighted_mean(wall_power, wall_mesh)
    profile = dataset.AxialProfile(
        tuple(wall_power.tolist()), tuple(wall_mesh.tolist()),
        shape, continuous)
    perimeter = math.pi * diameter
    area = math.pi * diameter ** 2 / 4.0
    h_in = waterprops.saturation_state(pressure).h_f - inlet_subcooling
    if quality_values is None:
        quality_values = np.zeros(n_nodes)
    return dataset.TestCase(
        test_id=test_id, diameter=diameter, perimeter=perimeter, area=area,
        length=length, pressure=pressure,
        power=heat_flux_avg * perimeter * length, mass_flux=mass_flux,
        mass_flow=mass_flux * area, heat_flux_avg=heat_flux_avg,
        fluid="Water", source="synthetic", profile=profile,
        quality_samples=tuple(zip(z.tolist(),
                                  np.asarray(quality_values).tolist())),
        inlet_enthalpy=h_in, chf_location=chf_location,
        heating="non-uniform")


def write_table(path, p_axis, g_axis, x_axis, fn):
    """Write a synthetic LUT file with values fn(P, G, x)."""
    lines = [
        "pressure_axis_Pa: " + " ".join(repr(float(v)) for v in p_axis),
        "mass_flux_axis_kg_m2s: " + " ".join(repr(float(v)) for v in g_axis),
        "quality_axis: " + " ".join(repr(float(v)) for v in x_axis),
    ]
    for p in p_axis:
        for g in g_axis:
            row = [repr(float(p)), repr(float(g))]
            row += [repr(float(fn(p, g, x))) for x in x_axis]
            lines.append(" ".join(row))
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")
    return path


@pytest.fixture
def affine_table(tmp_path):
    """Table populated with an affine function of (P, G, x)."""
    from chfkit import lut

    def fn(p, g, x):
        return 2e5 * (p / 1e6) + 3e2 * g + 5e5 * x + 3e6

    path = write_table(tmp_path / "affine.tsv",
                       [1e6, 5e6, 10e6, 15e6, 20e6],
                       [300.0, 1000.0, 3000.0, 6000.0, 9600.0],
                       [-0.6, -0.2, 0.0, 0.3, 0.8, 1.5], fn)
    return lut.load_table(path), fn
