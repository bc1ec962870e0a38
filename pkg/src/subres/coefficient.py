"""Evaluation of the almost-periodic stiffness modulation

    q(t) = sum_{n>=1} n^{-k} cos((2 - n^{-p}) t),   k > 1, p > 0.

The series is truncated with a dual stopping rule: an absolute tail bound
(|cos| <= 1 gives a closed-form integral tail) plus a horizon rule, because
the secular behaviour of the driven oscillator up to time t is carried by
the modes with n of order t^{1/p}.  Summation is compensated and runs over
descending n (smallest terms first) so results are bit-reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, PolicyError

__all__ = [
    "CoefficientSpec",
    "TruncationPolicy",
    "truncation_order",
    "eval_q",
    "eval_q_grid",
    "abs_bound",
]


@dataclass(frozen=True)
class CoefficientSpec:
    """Exponent pair (k, p) defining the modulation series."""

    k: float
    p: float

    def __post_init__(self) -> None:
        if not (self.k > 1.0):
            raise DomainError(f"k must be > 1 for convergence, got {self.k}")
        if not (self.p > 0.0):
            raise DomainError(f"p must be > 0, got {self.p}")


@dataclass(frozen=True)
class TruncationPolicy:
    """Stopping rules for the series truncation.

    abs_tol:   bound on the absolute truncation error (0 disables the rule)
    max_terms: hard budget; exceeding it raises PolicyError
    t_max:     largest time the truncation must serve (horizon rule)
    """

    abs_tol: float = 1e-3
    max_terms: int = 10**7
    t_max: float = 1.0

    def __post_init__(self) -> None:
        if self.abs_tol < 0.0:
            raise DomainError("abs_tol must be >= 0")
        if self.max_terms < 1:
            raise DomainError("max_terms must be a positive integer")
        if not (self.t_max > 0.0):
            raise DomainError("t_max must be > 0")
        if self.abs_tol == 0.0 and self.max_terms >= 10**12:
            raise DomainError("at least one stopping rule must be active")


def truncation_order(spec: CoefficientSpec, policy: TruncationPolicy) -> int:
    """Smallest N satisfying both stopping rules, capped at max_terms.

    Rule (a): integral tail bound N^(1-k)/(k-1) <= abs_tol.
    Rule (b): N >= 4 * ceil(t_max^(1/p)); the factor-4 margin keeps all
    modes whose slow phase t/n^p still matters at the horizon.
    """
    k, p = spec.k, spec.p
    n_tail = 1
    if policy.abs_tol > 0.0:
        n_tail = math.ceil(((k - 1.0) * policy.abs_tol) ** (-1.0 / (k - 1.0)))
    n_horizon = 4 * math.ceil(policy.t_max ** (1.0 / p))
    n = max(1, n_tail, n_horizon)
    if n > policy.max_terms:
        raise PolicyError(
            f"policy unsatisfiable: need N={n} terms "
            f"(tail {n_tail}, horizon {n_horizon}) but max_terms={policy.max_terms}"
        )
    return n


def eval_q(spec: CoefficientSpec, t: float, n_terms: int) -> float:
    """Partial sum q_N(t), exact compensated summation over descending n."""
    if n_terms < 1:
        raise DomainError("n_terms must be >= 1")
    k, p = spec.k, spec.p
    return math.fsum(
        n ** -k * math.cos((2.0 - n ** -p) * t) for n in range(n_terms, 0, -1)
    )


def eval_q_grid(spec: CoefficientSpec, times: np.ndarray, n_terms: int) -> np.ndarray:
    """Vectorised q_N over an array of times.

    Kahan-compensated accumulation over descending n; agrees with eval_q
    to rounding (eval_q uses exact summation, this one is compensated).
    """
    if n_terms < 1:
        raise DomainError("n_terms must be >= 1")
    k, p = spec.k, spec.p
    times = np.asarray(times, dtype=float)
    acc = np.zeros_like(times)
    comp = np.zeros_like(times)
    for n in range(n_terms, 0, -1):
        term = n ** -k * np.cos((2.0 - n ** -p) * times)
        y = term - comp
        s = acc + y
        comp = (s - acc) - y
        acc = s
    return acc


def abs_bound(spec: CoefficientSpec, n_terms: int) -> float:
    """sum_{n<=N} n^-k: a global bound on |q_N(t)| for every t."""
    return math.fsum(n ** -spec.k for n in range(n_terms, 0, -1))
