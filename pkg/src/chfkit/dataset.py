"""Benchmark test-case XML I/O and validation.

Schema (leaf element names are fixed): a <Database> root holds repeated
<TestCase> elements, each containing

  TestID, Diameter [m], Perimeter [m], Area [m2], Length [m], Pressure [Pa],
  Power [W], MassFlux [kg/(m2 s)], MassFlow [kg/s], InletTemperature [degC],
  InletEnthalpy [J/kg], HeatFlux [W/m2] (average q''_av), Fluid, Source,
  WallPower [-], WallMesh [m], EquilibriumQuality [-], QualityPosition [m]

and, for non-uniform heating only: CHFLocation [m] (optional), Shape,
Continuous ("yes"/"no"). List payloads are whitespace-separated numbers in
a single element: 40 values for non-uniform profiles, 2 (inlet/outlet) for
uniform WallPower/WallMesh, and 1 (outlet) for the uniform quality pair.
One of InletTemperature/InletEnthalpy may be absent; the parser derives it
from the water-property backend and validate_case reports the derivation as
a warning. parse_dataset(permissive=True) accepts any root layout and
treats every element owning a direct <TestID> child as a test case.

Validation rule identifiers (closed set):
  errors   consistency.positive, consistency.area, consistency.mass_flow,
           consistency.power, consistency.mesh_total,
           consistency.profile_mean, consistency.cardinality,
           consistency.chf_location, consistency.fluid
  warnings range.pressure, range.mass_flux, range.inlet_quality,
           range.diameter, range.length, schema.shape,
           derived.inlet_enthalpy, derived.inlet_temperature
"""

import math
import os
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field, replace

import numpy as np

from . import mesh, waterprops
from .errors import (DatasetSyntaxError, InvariantError, OutOfRange,
                     SchemaError, UnitError)

SHAPES = ("spike", "middle-peaked", "inlet", "outlet", "uniform")

_SCALAR_FIELDS = (
    ("Diameter", "diameter"),
    ("Perimeter", "perimeter"),
    ("Area", "area"),
    ("Length", "length"),
    ("Pressure", "pressure"),
    ("Power", "power"),
    ("MassFlux", "mass_flux"),
    ("MassFlow", "mass_flow"),
    ("HeatFlux", "heat_flux_avg"),
)

_KNOWN_ELEMENTS = {
    "TestID", "Fluid", "Source", "InletTemperature", "InletEnthalpy",
    "WallPower", "WallMesh", "EquilibriumQuality", "QualityPosition",
    "CHFLocation", "Shape", "Continuous",
} | {tag for tag, _ in _SCALAR_FIELDS}

_NONUNIFORM_ONLY = {"CHFLocation", "Shape", "Continuous"}


@dataclass(frozen=True)
class AxialProfile:
    """Normalized local power q''(z)/q''_av on the case's axial mesh."""
    wall_power: tuple    # dimensionless, node-centered
    wall_mesh: tuple     # m
    shape: str = "uniform"
    continuous: bool = True

    def positions(self) -> np.ndarray:
        return mesh.node_positions(self.wall_mesh)


@dataclass(frozen=True)
class TestCase:
    test_id: int
    diameter: float            # m
    perimeter: float           # m
    area: float                # m2
    length: float              # m
    pressure: float            # Pa
    power: float               # W
    mass_flux: float           # kg/(m2 s)
    mass_flow: float           # kg/s
    heat_flux_avg: float       # W/m2
    fluid: str
    source: str
    profile: AxialProfile
    quality_samples: tuple     # ((z [m], x [-]), ...)
    inlet_temperature: float | None = None  # degC
    inlet_enthalpy: float | None = None     # J/kg
    chf_location: float | None = None       # m, non-uniform only
    heating: str = "uniform"                # "uniform" | "non-uniform"
    derived_fields: frozenset = field(default=frozenset(), compare=False)


@dataclass(frozen=True)
class ValidationFinding:
    test_id: int
    severity: str   # "error" | "warning"
    rule: str
    message: str


@dataclass(frozen=True)
class Envelope:
    """Accepted data ranges; values outside produce range.* warnings."""
    pressure: tuple = (0.43e6, 18e6)          # Pa
    mass_flux: tuple = (335.0, 9561.9)        # kg/(m2 s)
    inlet_quality: tuple = (-1.461, 0.890)
    diameter: tuple = (5.44e-3, 28.3e-3)      # m
    length: tuple = (0.061, 7.0)              # m


DEFAULT_ENVELOPES = {
    "uniform": Envelope(),
    "non-uniform": Envelope(mass_flux=(328.2, 8916.0),
                            inlet_quality=(-1.352, 0.804)),
}


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

def _case_label(elem):
    tid = elem.findtext("TestID")
    return f"test case {tid.strip()}" if tid else "test case <no TestID>"


def _only(elem, tag, required=True):
    hits = elem.findall(tag)
    if len(hits) > 1:
        raise SchemaError(f"{_case_label(elem)}: repeated element <{tag}>")
    if not hits:
        if required:
            raise SchemaError(f"{_case_label(elem)}: missing element <{tag}>")
        return None
    return hits[0]


def _float_of(elem, tag, node):
    text = (node.text or "").strip()
    try:
        return float(text)
    except ValueError:
        raise UnitError(
            f"{_case_label(elem)}: <{tag}> payload {text!r} is not numeric") from None


def _floats_of(elem, tag, node):
    try:
        return tuple(float(tok) for tok in (node.text or "").split())
    except ValueError:
        raise UnitError(
            f"{_case_label(elem)}: <{tag}> contains a non-numeric entry") from None


def _parse_case(elem) -> TestCase:
    for child in elem:
        if child.tag not in _KNOWN_ELEMENTS:
            raise SchemaError(f"{_case_label(elem)}: unknown element <{child.tag}>")

    tid_node = _only(elem, "TestID")
    try:
        test_id = int((tid_node.text or "").strip())
    except ValueError:
        raise UnitError(f"<TestID> payload {tid_node.text!r} is not an integer") from None

    scalars = {}
    for tag, name in _SCALAR_FIELDS:
        scalars[name] = _float_of(elem, tag, _only(elem, tag))
    fluid = (_only(elem, "Fluid").text or "").strip()
    source = (_only(elem, "Source").text or "").strip()

    wall_power = _floats_of(elem, "WallPower", _only(elem, "WallPower"))
    wall_mesh = _floats_of(elem, "WallMesh", _only(elem, "WallMesh"))
    quality = _floats_of(elem, "EquilibriumQuality", _only(elem, "EquilibriumQuality"))
    positions = _floats_of(elem, "QualityPosition", _only(elem, "QualityPosition"))

    non_uniform = any(elem.find(tag) is not None for tag in _NONUNIFORM_ONLY)
    if non_uniform:
        shape = (_only(elem, "Shape").text or "").strip()
        continuous_text = (_only(elem, "Continuous").text or "").strip().lower()
        if continuous_text not in ("yes", "no"):
            raise SchemaError(
                f"{_case_label(elem)}: <Continuous> must be 'yes' or 'no', "
                f"got {continuous_text!r}")
        loc_node = _only(elem, "CHFLocation", required=False)
        chf_location = _float_of(elem, "CHFLocation", loc_node) if loc_node is not None else None
        expect = {"WallPower": 40, "WallMesh": 40,
                  "EquilibriumQuality": 40, "QualityPosition": 40}
        profile = AxialProfile(wall_power, wall_mesh, shape,
                               continuous_text == "yes")
        heating = "non-uniform"
    else:
        chf_location = None
        expect = {"WallPower": 2, "WallMesh": 2,
                  "EquilibriumQuality": 1, "QualityPosition": 1}
        profile = AxialProfile(wall_power, wall_mesh, "uniform", True)
        heating = "uniform"

    for tag, count in expect.items():
        got = {"WallPower": len(wall_power), "WallMesh": len(wall_mesh),
               "EquilibriumQuality": len(quality),
               "QualityPosition": len(positions)}[tag]
        if got != count:
            raise SchemaError(
                f"{_case_label(elem)}: <{tag}> holds {got} values, "
                f"expected {count} for {heating} heating")

    t_node = _only(elem, "InletTemperature", required=False)
    h_node = _only(elem, "InletEnthalpy", required=False)
    if t_node is None and h_node is None:
        raise SchemaError(
            f"{_case_label(elem)}: needs <InletTemperature> or <InletEnthalpy>")
    inlet_temperature = (_float_of(elem, "InletTemperature", t_node)
                         if t_node is not None else None)
    inlet_enthalpy = (_float_of(elem, "InletEnthalpy", h_node)
                      if h_node is not None else None)
    derived = set()
    if inlet_enthalpy is None:
        inlet_enthalpy = waterprops.subcooled_liquid_enthalpy(
            scalars["pressure"], inlet_temperature)
        derived.add("inlet_enthalpy")
    if inlet_temperature is None:
        inlet_temperature = waterprops.saturation_temperature_for_enthalpy(
            scalars["pressure"], inlet_enthalpy)
        derived.add("inlet_temperature")

    return TestCase(
        test_id=test_id, fluid=fluid, source=source, profile=profile,
        quality_samples=tuple(zip(positions, quality)),
        inlet_temperature=inlet_temperature, inlet_enthalpy=inlet_enthalpy,
        chf_location=chf_location, heating=heating,
        derived_fields=frozenset(derived), **scalars)


def parse_dataset(source, permissive: bool = False) -> list:
    """Parse a dataset document into TestCase records.

    `source` is a filesystem path, a file-like object, or an XML string
    (anything whose stripped text starts with '<').
    """
    try:
        if isinstance(source, (str, bytes)) and str(source).lstrip().startswith("<"):
            root = ET.fromstring(source)
        elif isinstance(source, (str, bytes, os.PathLike)):
            root = ET.parse(source).getroot()
        else:
            root = ET.parse(source).getroot()
    except ET.ParseError as exc:
        raise DatasetSyntaxError(f"malformed XML: {exc}") from exc

    if permissive:
        case_elems = [e for e in root.iter() if e.find("TestID") is not None]
    else:
        if root.tag != "Database":
            raise SchemaError(f"expected <Database> root, got <{root.tag}>")
        case_elems = []
        for child in root:
            if child.tag != "TestCase":
                raise SchemaError(f"unexpected element <{child.tag}> under root")
            case_elems.append(child)
    return [_parse_case(e) for e in case_elems]


# ---------------------------------------------------------------------------
# writing
# ---------------------------------------------------------------------------

def _fmt(value: float) -> str:
    return repr(float(value))


def _fmt_list(values) -> str:
    return " ".join(_fmt(v) for v in values)


def write_dataset(cases, validate: bool = True) -> str:
    """Serialize cases to a schema-compliant XML document string."""
    if validate:
        for case in cases:
            errors = [f for f in validate_case(case) if f.severity == "error"]
            if errors:
                raise InvariantError(
                    f"test case {case.test_id} violates invariants: "
                    + "; ".join(f"{f.rule}: {f.message}" for f in errors))
    root = ET.Element("Database")
    for case in cases:
        e = ET.SubElement(root, "TestCase")
        ET.SubElement(e, "TestID").text = str(case.test_id)
        for tag, name in _SCALAR_FIELDS:
            ET.SubElement(e, tag).text = _fmt(getattr(case, name))
        if case.inlet_temperature is not None:
            ET.SubElement(e, "InletTemperature").text = _fmt(case.inlet_temperature)
        if case.inlet_enthalpy is not None:
            ET.SubElement(e, "InletEnthalpy").text = _fmt(case.inlet_enthalpy)
        ET.SubElement(e, "Fluid").text = case.fluid
        ET.SubElement(e, "Source").text = case.source
        ET.SubElement(e, "WallPower").text = _fmt_list(case.profile.wall_power)
        ET.SubElement(e, "WallMesh").text = _fmt_list(case.profile.wall_mesh)
        ET.SubElement(e, "EquilibriumQuality").text = _fmt_list(
            x for _, x in case.quality_samples)
        ET.SubElement(e, "QualityPosition").text = _fmt_list(
            z for z, _ in case.quality_samples)
        if case.heating == "non-uniform":
            if case.chf_location is not None:
                ET.SubElement(e, "CHFLocation").text = _fmt(case.chf_location)
            ET.SubElement(e, "Shape").text = case.profile.shape
            ET.SubElement(e, "Continuous").text = (
                "yes" if case.profile.continuous else "no")
    ET.indent(root)
    return ET.tostring(root, encoding="unicode") + "\n"


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

def _rel_err(value, reference):
    return abs(value - reference) / abs(reference)


def validate_case(case: TestCase, ranges: Envelope | None = None) -> list:
    """All violated rules for one case; empty list means clean."""
    if ranges is None:
        ranges = DEFAULT_ENVELOPES.get(case.heating, Envelope())
    findings = []

    def err(rule, message):
        findings.append(ValidationFinding(case.test_id, "error", rule, message))

    def warn(rule, message):
        findings.append(ValidationFinding(case.test_id, "warning", rule, message))

    positive = {"diameter": case.diameter, "perimeter": case.perimeter,
                "area": case.area, "length": case.length,
                "pressure": case.pressure, "power": case.power,
                "mass_flux": case.mass_flux, "mass_flow": case.mass_flow,
                "heat_flux_avg": case.heat_flux_avg}
    bad = [k for k, v in positive.items()
           if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0)]
    if bad:
        err("consistency.positive", f"non-positive field(s): {', '.join(bad)}")
        return findings  # further arithmetic is meaningless

    if case.fluid != "Water":
        err("consistency.fluid", f"fluid {case.fluid!r}, expected 'Water'")

    area_ref = math.pi * case.diameter**2 / 4.0
    if _rel_err(case.area, area_ref) > 0.01:
        err("consistency.area",
            f"area {case.area:.6g} vs pi*D^2/4 = {area_ref:.6g}")
    flow_ref = case.mass_flux * case.area
    if _rel_err(case.mass_flow, flow_ref) > 0.01:
        err("consistency.mass_flow",
            f"mass_flow {case.mass_flow:.6g} vs G*A = {flow_ref:.6g}")
    power_ref = case.heat_flux_avg * case.perimeter * case.length
    if _rel_err(case.power, power_ref) > 0.02:
        err("consistency.power",
            f"power {case.power:.6g} vs q_av*P_h*L = {power_ref:.6g}")

    expect = 40 if case.heating == "non-uniform" else 2
    expect_q = 40 if case.heating == "non-uniform" else 1
    if (len(case.profile.wall_power) != expect
            or len(case.profile.wall_mesh) != expect
            or len(case.quality_samples) != expect_q):
        err("consistency.cardinality",
            f"{case.heating} case carries {len(case.profile.wall_power)} power/"
            f"{len(case.profile.wall_mesh)} mesh/{len(case.quality_samples)} "
            f"quality values, expected {expect}/{expect}/{expect_q}")
    elif (any(v < 0 for v in case.profile.wall_power)
            or any(d <= 0 for d in case.profile.wall_mesh)):
        err("consistency.positive", "negative wall_power or non-positive wall_mesh")
    else:
        z_end = case.profile.positions()[-1]
        if _rel_err(z_end, case.length) > 0.001:
            err("consistency.mesh_total",
                f"mesh spans {z_end:.6g} m vs length {case.length:.6g} m")
        pmean = mesh.weighted_mean(case.profile.wall_power, case.profile.wall_mesh)
        if abs(pmean - 1.0) > 0.02:
            err("consistency.profile_mean",
                f"mesh-weighted mean of wall_power is {pmean:.4f}")

    if case.chf_location is not None and not (0.0 <= case.chf_location <= case.length):
        err("consistency.chf_location",
            f"chf_location {case.chf_location:.6g} outside [0, {case.length:.6g}]")

    if case.heating == "non-uniform" and case.profile.shape not in SHAPES:
        warn("schema.shape", f"unrecognized shape {case.profile.shape!r}")

    def check_range(rule, value, lo_hi):
        lo, hi = lo_hi
        if not (lo <= value <= hi):
            warn(rule, f"{value:.6g} outside [{lo:.6g}, {hi:.6g}]")

    check_range("range.pressure", case.pressure, ranges.pressure)
    check_range("range.mass_flux", case.mass_flux, ranges.mass_flux)
    check_range("range.diameter", case.diameter, ranges.diameter)
    check_range("range.length", case.length, ranges.length)
    if case.inlet_enthalpy is not None:
        try:
            x_in = waterprops.equilibrium_quality(case.inlet_enthalpy, case.pressure)
        except OutOfRange:
            pass  # already covered by range.pressure
        else:
            check_range("range.inlet_quality", x_in, ranges.inlet_quality)

    for name in sorted(case.derived_fields):
        warn(f"derived.{name}", f"{name} was derived from the other inlet field")

    return findings


def validate_dataset(cases, ranges: Envelope | None = None) -> list:
    findings = []
    for case in cases:
        findings.extend(validate_case(case, ranges))
    return findings


# ---------------------------------------------------------------------------
# convenience constructors
# ---------------------------------------------------------------------------

def uniform_case(test_id, diameter, length, pressure, mass_flux, heat_flux_avg,
                 inlet_enthalpy=None, inlet_temperature=None, source="synthetic",
                 outlet_quality=None) -> TestCase:
    """Build a consistent uniform-heating case from primary quantities."""
    perimeter = math.pi * diameter
    area = math.pi * diameter**2 / 4.0
    case = TestCase(
        test_id=test_id, diameter=diameter, perimeter=perimeter, area=area,
        length=length, pressure=pressure,
        power=heat_flux_avg * perimeter * length,
        mass_flux=mass_flux, mass_flow=mass_flux * area,
        heat_flux_avg=heat_flux_avg, fluid="Water", source=source,
        profile=AxialProfile((1.0, 1.0), (length, length)),
        quality_samples=((length, 0.0),),
        inlet_temperature=inlet_temperature, inlet_enthalpy=inlet_enthalpy,
        heating="uniform")
    if outlet_quality is not None:
        case = replace(case, quality_samples=((length, outlet_quality),))
    return case
