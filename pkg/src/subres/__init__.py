"""Numerical laboratory for parametric subresonance.

Direct simulation of u'' + (w^2 + eps q(t)) u = 0 with the almost-periodic
modulation q(t) = sum n^-k cos((2 - n^-p) t), plus the averaged slow-envelope
system, its WKB turning-point analysis, lattice-sum asymptotics, and
(delta, epsilon) stability sweeps.
"""

from .coefficient import CoefficientSpec, TruncationPolicy, eval_q, truncation_order
from .errors import (
    DomainError,
    HorizonError,
    NumericError,
    PolicyError,
    QuadratureError,
    SubresError,
)
from .sums import AsymptoticConstants, constants
from .solver import OscillatorParams, State, Trajectory, integrate
from .envelope import EnvelopeParams, EnvelopeState, integrate_envelope
from .wkb import WkbResult, turning_point
from .sweep import GridSpec, StabilityMap, stability_map

__version__ = "0.1.0"

__all__ = [
    "CoefficientSpec",
    "TruncationPolicy",
    "eval_q",
    "truncation_order",
    "AsymptoticConstants",
    "constants",
    "OscillatorParams",
    "State",
    "Trajectory",
    "integrate",
    "EnvelopeParams",
    "EnvelopeState",
    "integrate_envelope",
    "WkbResult",
    "turning_point",
    "GridSpec",
    "StabilityMap",
    "stability_map",
    "SubresError",
    "DomainError",
    "PolicyError",
    "NumericError",
    "HorizonError",
    "QuadratureError",
    "__version__",
]
