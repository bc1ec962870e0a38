"""WKB analysis of the rescaled second-order envelope equation

    w'' + Q(theta) w = 0,   Q = 1 - lambda^2/theta^(2a) + a*lambda/theta^(a+1).

Q < 0 at small theta (exponential growth of the envelope) and Q -> 1 at
large theta (bounded oscillation); the largest root theta* of Q is the
turning point where growth hands over to oscillation, approximately
lambda^(1/a).  WKB is invalid in a collar around theta*, so the amplitude
table refuses ranges where |Q| dips below a floor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .errors import DomainError, NumericError

__all__ = [
    "WkbResult",
    "q_coefficient",
    "turning_point",
    "physical_turning_time",
    "wkb_amplitude",
]

ROOT_RTOL = 1e-10
Q_FLOOR = 0.05


@dataclass(frozen=True)
class WkbResult:
    theta_star_exact: float
    theta_star_approx: float
    lam: float
    alpha: float
    t_turn: float | None = None

    def __post_init__(self) -> None:
        if self.theta_star_exact <= 0.0:
            raise DomainError("theta_star must be positive")


def q_coefficient(lam: float, alpha: float, theta) -> float | np.ndarray:
    """Q(theta) of the second-order envelope equation."""
    theta = np.asarray(theta, dtype=float)
    if np.any(theta <= 0.0):
        raise DomainError("theta must be positive")
    q = 1.0 - lam ** 2 / theta ** (2.0 * alpha) + alpha * lam / theta ** (alpha + 1.0)
    return float(q) if q.ndim == 0 else q


def turning_point(lam: float, alpha: float) -> WkbResult:
    """Largest root of Q, bisected to 1e-10 relative; approx is lambda^(1/a)."""
    if lam <= 1.0:
        raise DomainError("lambda must exceed 1 for a turning point to exist")
    if not (0.0 < alpha < 1.0):
        raise DomainError("alpha must be in (0, 1)")
    approx = lam ** (1.0 / alpha)
    grid = np.geomspace(approx / 10.0, 10.0 * approx, 512)
    qs = q_coefficient(lam, alpha, grid)
    signs = np.sign(qs)
    crossings = np.nonzero(signs[:-1] * signs[1:] < 0)[0]
    if len(crossings) == 0:
        raise NumericError("no sign change of Q found in the scan bracket")
    i = crossings[-1]
    lo, hi = float(grid[i]), float(grid[i + 1])
    flo = q_coefficient(lam, alpha, lo)
    while hi - lo > ROOT_RTOL * hi:
        mid = 0.5 * (lo + hi)
        fm = q_coefficient(lam, alpha, mid)
        if fm == 0.0:
            lo = hi = mid
            break
        if (fm < 0.0) == (flo < 0.0):
            lo, flo = mid, fm
        else:
            hi = mid
    return WkbResult(
        theta_star_exact=0.5 * (lo + hi),
        theta_star_approx=approx,
        lam=lam,
        alpha=alpha,
    )


def physical_turning_time(
    theta_star: float, kappa: float, epsilon: float, gamma: float
) -> float:
    """Turning time in original time units: T = theta* / (kappa eps^gamma).

    Since kappa eps^gamma = delta by definition, this equals theta*/delta.
    """
    if kappa <= 0.0 or epsilon <= 0.0:
        raise DomainError("kappa and epsilon must be positive")
    return theta_star / (kappa * epsilon ** gamma)


def wkb_amplitude(
    lam: float, alpha: float, thetas, c1: float = 1.0
) -> np.ndarray:
    """WKB amplitude table over a range that stays clear of the turning point.

    Returns an array of rows (theta, w).  In the classically forbidden
    region (Q < 0) the envelope grows as exp(int sqrt(-Q)) / |Q|^(1/4);
    in the allowed region (Q > 0) the oscillation amplitude is |Q|^(-1/4).
    Raises if |Q| < 0.05 anywhere in the range (turning region).
    """
    thetas = np.asarray(thetas, dtype=float)
    if len(thetas) < 2 or np.any(np.diff(thetas) <= 0.0):
        raise DomainError("thetas must be an increasing array of length >= 2")
    q = q_coefficient(lam, alpha, thetas)
    if np.min(np.abs(q)) < Q_FLOOR:
        raise NumericError(
            "turning region: |Q| dips below the WKB validity floor on the range"
        )
    if np.any(q < 0.0) and np.any(q > 0.0):
        raise NumericError("range crosses the turning point; split it per branch")
    amp = np.abs(q) ** -0.25
    if q[0] < 0.0:
        expo = np.concatenate(
            ([0.0], cumulative_trapezoid(np.sqrt(-q), thetas))
        )
        # exp can saturate to inf on very long forbidden ranges; that is the
        # honest answer at this representation, not an error.
        with np.errstate(over="ignore"):
            w = c1 * np.exp(expo) * amp
    else:
        w = c1 * amp
    return np.column_stack([thetas, w])
