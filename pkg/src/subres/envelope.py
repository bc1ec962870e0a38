"""Averaged slow-amplitude dynamics of the subresonant oscillator.

The rotated slow amplitudes (w, v) obey

    dw/dtau =  B w / tau^a + kappa v
    dv/dtau = -kappa w   - B v / tau^a

with B = A/(4 w0) the coupling, kappa = delta / eps^gamma the scaled
detuning and gamma = 1/(1 - a) the slow-time exponent.  Dividing through
by kappa and substituting theta = kappa*tau gives the one-parameter form
with lambda = B kappa^(a-1):

    dw/dtheta =  (lambda/theta^a) w + v
    dv/dtheta = -(lambda/theta^a) v - w

Both systems are linear, so integration reuses the per-step RK4 update
matrices; the state is renormalised on the fly and the log of the true
norm is carried separately, which lets runs pass through thousands of
e-foldings of growth without overflow.

For kappa = 0 the system decouples and has the closed form
w = C1 exp(B tau^(1-a)/(1-a)), v = C2 exp(-B tau^(1-a)/(1-a)), used as
the integrator oracle.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = [
    "EnvelopeParams",
    "EnvelopeState",
    "EnvelopeTrajectory",
    "derive_gamma",
    "derive_b",
    "derive_kappa",
    "derive_lambda",
    "derive_kappa_from_lambda",
    "integrate_envelope",
    "integrate_theta_form",
    "closed_form_kappa0",
    "ab_to_slow",
    "slow_to_ab",
    "peak_log_norm",
]

_RENORM_THRESHOLD = 1e100


def derive_gamma(alpha: float) -> float:
    """Slow-time exponent from the secular balance g - 1 = g*a."""
    if not (0.0 <= alpha < 1.0):
        raise DomainError(f"alpha must lie in [0, 1), got {alpha}")
    return 1.0 / (1.0 - alpha)


def derive_b(a_alpha: float, omega: float) -> float:
    """Envelope coupling B = A / (4 w0)."""
    if a_alpha <= 0.0 or omega <= 0.0:
        raise DomainError("a_alpha and omega must be positive")
    return a_alpha / (4.0 * omega)


def derive_kappa(delta: float, epsilon: float, gamma: float) -> float:
    """Scaled detuning from delta = eps^gamma * kappa."""
    if epsilon <= 0.0:
        raise DomainError("epsilon must be positive")
    return delta / epsilon ** gamma


def derive_lambda(b_coef: float, kappa: float, alpha: float) -> float:
    """Rescaled coupling lambda = B kappa^(a-1); undefined at kappa = 0."""
    if kappa == 0.0:
        raise DomainError(
            "kappa zero: lambda undefined, use the kappa=0 closed form instead"
        )
    if kappa < 0.0:
        raise DomainError("kappa must be positive for the theta rescaling")
    return b_coef * kappa ** (alpha - 1.0)


def derive_kappa_from_lambda(b_coef: float, lam: float, alpha: float) -> float:
    """Inverse map kappa = (B/lambda)^(1/(1-a))."""
    if lam <= 0.0 or b_coef <= 0.0:
        raise DomainError("b_coef and lambda must be positive")
    return (b_coef / lam) ** (1.0 / (1.0 - alpha))


@dataclass(frozen=True)
class EnvelopeParams:
    """(alpha, gamma, B, kappa, lambda, phi) bundle for one scenario.

    lam is NaN when kappa = 0 (the rescaling degenerates).
    """

    alpha: float
    gamma: float
    b_coef: float
    kappa: float
    lam: float
    phi: float = 0.0

    def __post_init__(self) -> None:
        if not (0.0 < self.alpha < 1.0):
            raise DomainError("alpha must be in (0, 1)")
        if self.b_coef < 0.0:
            raise DomainError("b_coef must be >= 0 (B = 0 is the pure-rotation case)")
        if self.kappa < 0.0:
            raise DomainError("kappa must be >= 0")
        if abs(self.gamma - derive_gamma(self.alpha)) > 1e-12 * self.gamma:
            raise DomainError("gamma inconsistent with 1/(1-alpha)")
        if self.kappa > 0.0:
            expected = derive_lambda(self.b_coef, self.kappa, self.alpha)
            if abs(self.lam - expected) > 1e-9 * abs(expected):
                raise DomainError("lambda inconsistent with B*kappa^(alpha-1)")

    @classmethod
    def make(
        cls, alpha: float, b_coef: float, kappa: float, phi: float = 0.0
    ) -> "EnvelopeParams":
        lam = (
            derive_lambda(b_coef, kappa, alpha) if kappa > 0.0 else math.nan
        )
        return cls(
            alpha=alpha,
            gamma=derive_gamma(alpha),
            b_coef=b_coef,
            kappa=kappa,
            lam=lam,
            phi=phi,
        )


@dataclass(frozen=True)
class EnvelopeState:
    tau: float
    w: float
    v: float

    def __post_init__(self) -> None:
        for x in (self.tau, self.w, self.v):
            if not math.isfinite(x):
                raise DomainError("envelope state must be finite")


@dataclass(frozen=True)
class EnvelopeTrajectory:
    """Sampled slow-amplitude run.

    w/v hold the unit direction of the state; log_norm is log|(w,v)| of
    the true state, finite even when the true amplitudes overflow float
    range.  true_w/true_v reconstruct the actual values (inf on overflow).
    """

    taus: np.ndarray
    w_dir: np.ndarray
    v_dir: np.ndarray
    log_norm: np.ndarray

    @property
    def true_w(self) -> np.ndarray:
        with np.errstate(over="ignore"):
            return self.w_dir * np.exp(self.log_norm)

    @property
    def true_v(self) -> np.ndarray:
        with np.errstate(over="ignore"):
            return self.v_dir * np.exp(self.log_norm)

    def __len__(self) -> int:
        return len(self.taus)


def _linear_step_matrices(g0, g1, g2, rot: float, h: float):
    """Vectorised RK4 update matrices for x' = A(t) x with
    A = [[g, rot], [-rot, -g]] sampled at step start/mid/end.

    Returns arrays (a, b, c, d): (w, v) -> (a w + b v, c w + d v).
    """
    ident = (1.0, 0.0, 0.0, 1.0)

    def apply(g, m):  # rows of A(t) @ M for M given entrywise
        m11, m12, m21, m22 = m
        return (
            g * m11 + rot * m21,
            g * m12 + rot * m22,
            -rot * m11 - g * m21,
            -rot * m12 - g * m22,
        )

    def axpy(s, k):  # I + s*K
        return (1.0 + s * k[0], s * k[1], s * k[2], 1.0 + s * k[3])

    k1 = apply(g0, ident)
    k2 = apply(g1, axpy(h / 2.0, k1))
    k3 = apply(g1, axpy(h / 2.0, k2))
    k4 = apply(g2, axpy(h, k3))
    out = []
    for i in range(4):
        ki = (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
        out.append(ki + (1.0 if i in (0, 3) else 0.0))
    return tuple(out)


def _integrate_linear(
    t0: float,
    w0: float,
    v0: float,
    t_end: float,
    h: float,
    rot: float,
    gain,
    output_stride: int,
) -> EnvelopeTrajectory:
    if t_end <= t0:
        raise DomainError("end time must exceed start time")
    n_steps = int(math.ceil((t_end - t0) / h - 1e-12))
    nodes = t0 + np.arange(2 * n_steps + 1) * (h / 2.0)
    g = gain(nodes)
    a, b, c, d = (
        x.tolist()
        for x in _linear_step_matrices(g[0:-2:2], g[1::2], g[2::2], rot, h)
    )

    w, v = w0, v0
    log_offset = 0.0
    taus = [t0]
    wd = []
    vd = []
    ln = []

    def record(ww, vv):
        norm = math.hypot(ww, vv)
        if norm == 0.0:
            wd.append(0.0)
            vd.append(0.0)
            ln.append(-math.inf)
        else:
            wd.append(ww / norm)
            vd.append(vv / norm)
            ln.append(log_offset + math.log(norm))

    record(w, v)
    for i in range(n_steps):
        w, v = a[i] * w + b[i] * v, c[i] * w + d[i] * v
        norm = math.hypot(w, v)
        if norm > _RENORM_THRESHOLD or (0.0 < norm < 1.0 / _RENORM_THRESHOLD):
            w /= norm
            v /= norm
            log_offset += math.log(norm)
        if (i + 1) % output_stride == 0 or i + 1 == n_steps:
            taus.append(t0 + (i + 1) * h)
            record(w, v)
    return EnvelopeTrajectory(
        taus=np.array(taus),
        w_dir=np.array(wd),
        v_dir=np.array(vd),
        log_norm=np.array(ln),
    )


def integrate_envelope(
    params: EnvelopeParams,
    init: EnvelopeState,
    tau_end: float,
    dtau: float,
    output_stride: int = 1,
) -> EnvelopeTrajectory:
    """RK4 integration of the (w, v) system from tau0 > 0."""
    if init.tau <= 0.0:
        raise DomainError("initial tau must be positive (tau^-alpha is singular at 0)")
    if dtau > init.tau / 10.0:
        raise DomainError("dtau must not exceed tau0/10")
    b_coef, al = params.b_coef, params.alpha

    def gain(taus: np.ndarray) -> np.ndarray:
        return b_coef * taus ** -al

    return _integrate_linear(
        init.tau, init.w, init.v, tau_end, dtau, params.kappa, gain, output_stride
    )


def integrate_theta_form(
    lam: float,
    alpha: float,
    init: tuple[float, float, float],
    theta_end: float,
    dtheta: float,
    output_stride: int = 1,
) -> EnvelopeTrajectory:
    """RK4 integration of the rescaled one-parameter system from theta0 > 0."""
    theta0, w0, v0 = init
    if theta0 <= 0.0:
        raise DomainError("initial theta must be positive")
    if lam < 0.0:
        raise DomainError("lambda must be >= 0")

    def gain(thetas: np.ndarray) -> np.ndarray:
        return lam * thetas ** -alpha

    return _integrate_linear(theta0, w0, v0, theta_end, dtheta, 1.0, gain, output_stride)


def closed_form_kappa0(
    b_coef: float,
    alpha: float,
    tau0: float,
    state0: tuple[float, float],
    tau: float,
) -> tuple[float, float]:
    """Exact kappa=0 solution anchored at tau0; w*v is invariant."""
    if tau0 <= 0.0 or tau <= 0.0:
        raise DomainError("tau values must be positive")
    w0, v0 = state0
    expo = b_coef * (tau ** (1.0 - alpha) - tau0 ** (1.0 - alpha)) / (1.0 - alpha)
    return w0 * math.exp(expo), v0 * math.exp(-expo)


def ab_to_slow(
    a: float, b: float, kappa: float, tau: float, phi: float
) -> tuple[float, float]:
    """Rotate the (a, b) amplitudes into the slow frame: Z = z e^{-i(kappa tau + phi/2)}."""
    z = complex(a, b) * cmath.exp(-1j * (kappa * tau + phi / 2.0))
    return z.real, z.imag


def slow_to_ab(
    w: float, v: float, kappa: float, tau: float, phi: float
) -> tuple[float, float]:
    """Inverse of ab_to_slow."""
    z = complex(w, v) * cmath.exp(1j * (kappa * tau + phi / 2.0))
    return z.real, z.imag


def peak_log_norm(traj: EnvelopeTrajectory) -> tuple[float, float]:
    """(time, value) of the maximum of log|(w, v)| over the samples."""
    i = int(np.argmax(traj.log_norm))
    return float(traj.taus[i]), float(traj.log_norm[i])
