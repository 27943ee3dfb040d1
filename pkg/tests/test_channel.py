"""Heat-balance marching: enthalpy/quality profiles and boiling length."""

import numpy as np
import pytest
from hypothesis import given, strategies as st

from chfkit import channel, dataset, waterprops
from chfkit.errors import MeshError

from conftest import make_nonuniform_case, make_uniform_case


# ---------------------------------------------------------------------------
# worked case: D = 0.01 m, L = 2 m, G = 2000 kg/(m^2 s), P = 10 MPa,
# 200 kJ/kg inlet subcooling, uniform 1 MW/m^2.  The enthalpy rise is
# exactly 400 kJ/kg, so the outlet sits 200 kJ/kg above saturation.
# ---------------------------------------------------------------------------

def test_worked_case_outlet_quality():
    case = make_uniform_case()
    x_out = channel.outlet_quality(case)
    assert x_out == pytest.approx(0.152, abs=2e-3)
    # closed form against the same property backend
    sat = waterprops.saturation_state(case.pressure)
    assert x_out == pytest.approx(200e3 / sat.h_fg, rel=1e-12)


def test_worked_case_boiling_length():
    case = make_uniform_case()
    profile = channel.quality_profile(case)
    # x runs linearly from -200/h_fg to +200/h_fg, crossing at mid-channel
    assert profile.boiling_length_start == pytest.approx(1.0, abs=1e-2)
    assert channel.boiling_length(profile) == pytest.approx(1.0, abs=1e-9)


def test_quarter_channel_crossing():
    # subcooling of exactly one quarter of the 400 kJ/kg rise puts the
    # crossing at z = L/4
    case = make_uniform_case(inlet_subcooling=100e3)
    profile = channel.quality_profile(case)
    assert profile.boiling_length_start == pytest.approx(0.5, abs=1e-9)


def test_saturated_inlet_zero_flux_quality_is_zero():
    case = make_uniform_case(inlet_subcooling=0.0, heat_flux_avg=0.0)
    profile = channel.quality_profile(case)
    assert np.all(profile.x == 0.0)
    assert profile.boiling_length_start == 0.0


def test_all_subcooled_profile_has_no_boiling_length():
    case = make_uniform_case(inlet_subcooling=800e3)
    profile = channel.quality_profile(case)
    assert np.all(profile.x < 0.0)
    assert profile.boiling_length_start is None


def test_saturated_inlet_boiling_length_zero():
    case = make_uniform_case(inlet_subcooling=0.0)
    assert channel.quality_profile(case).boiling_length_start == 0.0


# ---------------------------------------------------------------------------
# energy balance invariants
# ---------------------------------------------------------------------------

def test_enthalpy_rise_scales_inversely_with_mass_flux():
    rise = {}
    for g in (1000.0, 2000.0):
        case = make_uniform_case(mass_flux=g)
        profile = channel.quality_profile(case)
        rise[g] = profile.h[-1] - profile.h[0]
    assert rise[1000.0] == pytest.approx(2.0 * rise[2000.0], rel=1e-12)


def test_energy_conservation_uniform():
    case = make_uniform_case()
    profile = channel.quality_profile(case)
    expected = case.heat_flux_avg * case.perimeter * case.length \
        / (case.mass_flux * case.area)
    assert profile.h[-1] - profile.h[0] == pytest.approx(expected, rel=1e-12)


def test_energy_conservation_nonuniform():
    # wall_power is normalized to mesh-weighted mean 1, so the integral of
    # the local flux equals q_av * L regardless of shape
    case = make_nonuniform_case()
    profile = channel.quality_profile(case)
    expected = case.heat_flux_avg * case.perimeter * case.length \
        / (case.mass_flux * case.area)
    assert profile.h[-1] - profile.h[0] == pytest.approx(expected, rel=1e-9)


def test_enthalpy_monotone_for_positive_flux():
    case = make_nonuniform_case()
    profile = channel.quality_profile(case)
    assert np.all(np.diff(profile.h) > 0.0)
    assert np.all(np.diff(profile.x) > 0.0)


def test_mesh_refinement_does_not_change_uniform_outlet():
    coarse = make_uniform_case()
    fine = make_nonuniform_case(wall_power=[1.0] * 40, shape="uniform")
    # same geometry and boundary conditions, 2-node vs 40-node encoding
    assert channel.outlet_quality(fine) == pytest.approx(
        channel.outlet_quality(coarse), rel=1e-12)


def test_profile_starts_at_inlet_enthalpy():
    case = make_uniform_case()
    profile = channel.quality_profile(case)
    assert profile.z[0] == 0.0
    assert profile.h[0] == case.inlet_enthalpy
    assert profile.z[-1] == pytest.approx(case.length, rel=1e-12)


def test_inlet_temperature_fallback():
    base = make_uniform_case()
    t_in = waterprops.saturation_temperature_for_enthalpy(
        base.pressure, base.inlet_enthalpy)
    via_temp = dataset.TestCase(**{
        **base.__dict__,
        "inlet_enthalpy": None,
        "inlet_temperature": t_in,
    })
    assert channel.outlet_quality(via_temp) == pytest.approx(
        channel.outlet_quality(base), abs=1e-4)


def test_missing_both_inlet_fields_raises():
    base = make_uniform_case()
    bare = dataset.TestCase(**{
        **base.__dict__,
        "inlet_enthalpy": None,
        "inlet_temperature": None,
    })
    with pytest.raises(MeshError):
        channel.quality_profile(bare)


def test_outlet_quality_matches_profile_tail():
    case = make_nonuniform_case()
    profile = channel.quality_profile(case)
    assert channel.outlet_quality(case) == profile.x[-1]


@given(
    diameter=st.floats(0.004, 0.03),
    length=st.floats(0.5, 6.0),
    pressure=st.floats(1e6, 18e6),
    mass_flux=st.floats(400.0, 8000.0),
    heat_flux_avg=st.floats(1e5, 3e6),
    subcooling=st.floats(0.0, 400e3),
)
def test_uniform_outlet_closed_form(diameter, length, pressure, mass_flux,
                                    heat_flux_avg, subcooling):
    case = make_uniform_case(
        diameter=diameter, length=length, pressure=pressure,
        mass_flux=mass_flux, heat_flux_avg=heat_flux_avg,
        inlet_subcooling=subcooling)
    rise = heat_flux_avg * case.perimeter * length / (mass_flux * case.area)
    expected = waterprops.equilibrium_quality(
        case.inlet_enthalpy + rise, pressure)
    assert channel.outlet_quality(case) == pytest.approx(expected, rel=1e-9,
                                                         abs=1e-12)


# ---------------------------------------------------------------------------
# local relative power
# ---------------------------------------------------------------------------

def test_local_relative_power_continuous_interpolates():
    case = make_nonuniform_case()
    profile = case.profile
    z = profile.positions()
    q = np.asarray(profile.wall_power)
    for i in (0, 7, 39):
        assert channel.local_relative_power(profile, z[i]) \
            == pytest.approx(q[i], rel=1e-12)
    zm = (z[3] + z[4]) / 2.0
    assert channel.local_relative_power(profile, zm) \
        == pytest.approx((q[3] + q[4]) / 2.0, rel=1e-12)


def test_local_relative_power_discontinuous_cells():
    case = make_nonuniform_case(continuous=False)
    profile = case.profile
    z = profile.positions()
    q = np.asarray(profile.wall_power)
    boundary = (z[9] + z[10]) / 2.0
    eps = 1e-9
    assert channel.local_relative_power(profile, boundary - eps) \
        == pytest.approx(q[9], rel=1e-12)
    assert channel.local_relative_power(profile, boundary + eps) \
        == pytest.approx(q[10], rel=1e-12)


def test_quality_at_matches_nodes():
    case = make_nonuniform_case()
    profile = channel.quality_profile(case)
    for i in (0, 13, 39):
        assert channel.quality_at(case, float(profile.z[i])) \
            == pytest.approx(float(profile.x[i]), rel=1e-12, abs=1e-15)
