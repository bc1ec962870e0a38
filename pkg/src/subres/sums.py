"""Secular lattice sums and their asymptotic constants.

Two slowly growing sums drive the averaged envelope dynamics:

    S_sin(t)  = sum_n n^(p-k) sin(t / n^p)          ~  t^(1-a) * C_s
    S_vers(t) = sum_n n^(p-k) 2 sin^2(t / (2 n^p))  ~  t^(1-a) * C_vers

with a = (k-1)/p in (0, 1).  The sums are computed directly (compensated,
descending order) for validation; the model constants come from singular
quadrature.  C_s is the continuum-limit integral

    C_s = (1/p) * int_0^inf  u^(a-2) sin(u) du,

evaluated with the endpoint singularity split off as a Taylor series and
the oscillatory tail handled by weighted quadrature.  The model constant
C_c is the closed-form detuning term

    C_c = - 1 / (2 pi^(1-a) p (1-a)),

which together with C_s reproduces the amplitude constant
A = sqrt(C_s^2 + C_c^2) used downstream (A = 1.09264... for k=2, p=5).
Note C_c is NOT the coefficient of the versine sum; `versine_constant`
computes that separately for the lattice cross-check.  See
`printed_variants` for the alternative readings of these constants.

Sign convention: C_c < 0 is stored as-is; the versine sum is nonnegative
and every use-site applies cos(x) - 1 = -2 sin^2(x/2) explicitly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.integrate import quad

from .coefficient import CoefficientSpec
from .errors import DomainError, QuadratureError

__all__ = [
    "AsymptoticConstants",
    "alpha",
    "c_s",
    "c_c",
    "versine_constant",
    "constants",
    "printed_variants",
    "lattice_sum_sin",
    "lattice_sum_versine",
    "lattice_samples",
    "fit_asymptotic_constant",
]

# Series split point for the u^(a-2) endpoint singularity and number of
# Taylor terms kept there.  Eight terms keep the series error below 1e-12
# for any split point up to 0.5.
SPLIT_POINT = 0.25
SERIES_TERMS = 8

_QUAD_RTOL = 1e-10


@dataclass(frozen=True)
class AsymptoticConstants:
    """Bundle (alpha, C_s, C_c, A, phi) with A = |C_s + i C_c|."""

    alpha: float
    c_s: float
    c_c: float
    a_alpha: float
    phi_alpha: float

    def __post_init__(self) -> None:
        expected = math.hypot(self.c_s, self.c_c)
        if abs(self.a_alpha - expected) > 16 * math.ulp(expected):
            raise DomainError("a_alpha inconsistent with sqrt(c_s^2 + c_c^2)")
        if self.c_s == 0.0:
            raise DomainError("c_s must be nonzero for the phase to be defined")
        if not (-math.pi / 2 < self.phi_alpha < math.pi / 2):
            raise DomainError("phi_alpha outside the principal branch")


def alpha(spec: CoefficientSpec) -> float:
    """Growth-deficit exponent a = (k-1)/p; must lie in (0, 1)."""
    a = (spec.k - 1.0) / spec.p
    if not (0.0 < a < 1.0):
        raise DomainError(
            f"regime violation: alpha=(k-1)/p={a} outside (0,1); "
            "the slow-time exponent 1/(1-alpha) requires alpha < 1"
        )
    return a


def _sin_series(a_split: float, a: float) -> float:
    """int_0^s u^(a-2) sin(u) du by term-wise integration of the sine series."""
    total = 0.0
    for m in range(SERIES_TERMS):
        power = a + 2 * m
        term = (-1.0) ** m * a_split ** power / (math.factorial(2 * m + 1) * power)
        total += term
    return total


def _versine_series(a_split: float, a: float) -> float:
    """int_0^s u^(a-2) (1 - cos u) du by term-wise integration."""
    total = 0.0
    for m in range(1, SERIES_TERMS + 1):
        power = a + 2 * m - 1.0
        term = (-1.0) ** (m + 1) * a_split ** power / (math.factorial(2 * m) * power)
        total += term
    return total


def _checked_quad(f: Callable[[float], float], lo: float, hi: float, **kw) -> float:
    val, err = quad(f, lo, hi, epsabs=1e-13, epsrel=_QUAD_RTOL, limit=200, **kw)
    if err > max(1e-11, 10 * _QUAD_RTOL * abs(val)):
        raise QuadratureError(
            f"quadrature on [{lo}, {hi}] did not converge (error estimate {err:.2e})"
        )
    return val


def _oscillatory_tail(a: float, lo: float, weight: str) -> float:
    """int_lo^inf u^(a-2) * {sin,cos}(u) du via weighted quadrature."""
    val, err = quad(
        lambda u: u ** (a - 2.0),
        lo,
        np.inf,
        weight=weight,
        wvar=1.0,
        limlst=200,
        limit=200,
        epsabs=1e-12,
    )
    if err > 1e-9:
        raise QuadratureError(
            f"oscillatory tail quadrature (weight={weight}) error estimate {err:.2e}"
        )
    return val


def _sin_integral(a: float, split: float = SPLIT_POINT) -> float:
    """int_0^inf u^(a-2) sin(u) du, split-point independent to ~1e-12."""
    finite = _sin_series(split, a) + _checked_quad(
        lambda u: u ** (a - 2.0) * math.sin(u), split, math.pi / 2
    )
    return finite + _oscillatory_tail(a, math.pi / 2, "sin")


def _versine_integral(a: float, split: float = SPLIT_POINT) -> float:
    """int_0^inf u^(a-2) (1 - cos u) du."""
    finite = _versine_series(split, a) + _checked_quad(
        lambda u: u ** (a - 2.0) * (1.0 - math.cos(u)), split, math.pi
    )
    # Tail: split 1 - cos(u); the pure power part has a closed form.
    power_tail = math.pi ** (a - 1.0) / (1.0 - a)
    return finite + power_tail - _oscillatory_tail(a, math.pi, "cos")


def c_s(spec: CoefficientSpec, split: float = SPLIT_POINT) -> float:
    """Sine-sum constant C_s = (1/p) int_0^inf u^(a-2) sin(u) du > 0."""
    a = alpha(spec)
    return _sin_integral(a, split) / spec.p


def c_c(spec: CoefficientSpec) -> float:
    """Detuning constant C_c = -1 / (2 pi^(1-a) p (1-a)) < 0."""
    a = alpha(spec)
    return -1.0 / (2.0 * math.pi ** (1.0 - a) * spec.p * (1.0 - a))


def versine_constant(spec: CoefficientSpec, split: float = SPLIT_POINT) -> float:
    """Coefficient of t^(1-a) in the versine lattice sum (positive)."""
    a = alpha(spec)
    return _versine_integral(a, split) / spec.p


def constants(spec: CoefficientSpec) -> AsymptoticConstants:
    a = alpha(spec)
    cs = c_s(spec)
    cc = c_c(spec)
    return AsymptoticConstants(
        alpha=a,
        c_s=cs,
        c_c=cc,
        a_alpha=math.hypot(cs, cc),
        phi_alpha=math.atan(cc / cs),
    )


def printed_variants(spec: CoefficientSpec) -> dict[str, float]:
    """Alternative readings of the constants, for the provenance report.

    'cs_half_period' truncates the sine integral at pi/2 and
    'cc_with_integral' adds the versine integral over [0, pi] to the
    closed-form term.  Neither combination reproduces the reference
    amplitude A = 1.09264... nor the measured lattice-sum coefficients;
    they are reported so the discrepancy is visible, not hidden.
    """
    a = alpha(spec)
    cs_half = (
        _sin_series(SPLIT_POINT, a)
        + _checked_quad(lambda u: u ** (a - 2.0) * math.sin(u), SPLIT_POINT, math.pi / 2)
    ) / spec.p
    versine_pi = (
        _versine_series(SPLIT_POINT, a)
        + _checked_quad(lambda u: u ** (a - 2.0) * (1.0 - math.cos(u)), SPLIT_POINT, math.pi)
    ) / (2.0 * spec.p)
    cc_with_integral = c_c(spec) - versine_pi
    return {
        "cs_full": c_s(spec),
        "cs_half_period": cs_half,
        "cc_closed_term": c_c(spec),
        "cc_with_integral": cc_with_integral,
        "versine_full": versine_constant(spec),
        "a_model": math.hypot(c_s(spec), c_c(spec)),
        "a_half_period_reading": math.hypot(cs_half, cc_with_integral),
        "a_versine_reading": math.hypot(c_s(spec), versine_constant(spec)),
    }


def _check_horizon(spec: CoefficientSpec, t: float, n_terms: int) -> None:
    if not (t >= 0.0):
        raise DomainError("t must be nonnegative")
    required = 4 * math.ceil(t ** (1.0 / spec.p)) if t > 0 else 1
    if n_terms < required:
        raise DomainError(
            f"horizon rule violated: t={t} needs N >= {required}, got {n_terms}"
        )


def lattice_sum_sin(spec: CoefficientSpec, t: float, n_terms: int) -> float:
    """Direct sum S_sin(t) with N terms, compensated, descending order."""
    _check_horizon(spec, t, n_terms)
    k, p = spec.k, spec.p
    return math.fsum(
        n ** (p - k) * math.sin(t / n ** p) for n in range(n_terms, 0, -1)
    )


def lattice_sum_versine(spec: CoefficientSpec, t: float, n_terms: int) -> float:
    """Direct sum S_vers(t) >= 0 with N terms."""
    _check_horizon(spec, t, n_terms)
    k, p = spec.k, spec.p
    return math.fsum(
        n ** (p - k) * 2.0 * math.sin(t / (2.0 * n ** p)) ** 2
        for n in range(n_terms, 0, -1)
    )


def lattice_samples(
    spec: CoefficientSpec,
    kind: str,
    t_min: float,
    t_max: float,
    n_samples: int = 16,
    margin: int = 10,
) -> list[tuple[float, float]]:
    """Log-spaced samples of a lattice sum, truncated with a safety margin.

    `margin` multiplies the horizon rule N = 4*ceil(t^(1/p)) so the
    asymptotic tail is fully resolved at each sample.
    """
    if kind == "sin":
        f = lattice_sum_sin
    elif kind == "versine":
        f = lattice_sum_versine
    else:
        raise DomainError(f"unknown lattice sum kind {kind!r}")
    ts = np.logspace(math.log10(t_min), math.log10(t_max), n_samples)
    out = []
    for t in ts:
        n = 4 * math.ceil(float(t) ** (1.0 / spec.p)) * margin
        out.append((float(t), f(spec, float(t), n)))
    return out


def fit_asymptotic_constant(
    samples: Sequence[tuple[float, float]], a: float
) -> tuple[float, float]:
    """Power-law fit S(t) ~ C * t^(1-a) from (t, S) samples.

    Returns (constant, exponent).  The exponent is the free least-squares
    slope of log|S| against log t; the constant is estimated with the
    exponent pinned at 1-a (geometric mean of S(t)/t^(1-a)), which keeps
    the two estimates decoupled.
    """
    if len(samples) < 8:
        raise DomainError("need at least 8 samples for the asymptotic fit")
    ts = np.array([s[0] for s in samples], dtype=float)
    vals = np.array([s[1] for s in samples], dtype=float)
    if ts.min() <= 0.0 or np.any(vals == 0.0):
        raise DomainError("samples must have positive t and nonzero S")
    if ts.max() / ts.min() < 100.0 * (1.0 - 1e-12):
        raise DomainError("insufficient span: samples must cover >= 2 decades of t")
    logt = np.log(ts)
    logs = np.log(np.abs(vals))
    slope, _ = np.polyfit(logt, logs, 1)
    constant = math.exp(float(np.mean(logs - (1.0 - a) * logt)))
    return constant, float(slope)
