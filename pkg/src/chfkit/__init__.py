"""chfkit: critical-heat-flux dataset and prediction toolkit.

Benchmark XML dataset I/O with validation, water/steam saturation
properties, channel heat-balance profiles, classical CHF correlations
(Bowring, Biasi), a lookup-table engine with diameter and axial
corrections plus critical-power search, digitized-curve post-processing,
a from-scratch feedforward CHF regressor, and an evaluation harness.
"""

__version__ = "0.1.0"

from .dataset import (AxialProfile, Envelope, TestCase,  # noqa: F401
                      ValidationFinding, parse_dataset, validate_case,
                      validate_dataset, write_dataset)
from .waterprops import (SaturationState, equilibrium_quality,  # noqa: F401
                         saturation_state, subcooled_liquid_enthalpy)
