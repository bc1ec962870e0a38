"""Acceptance suite: one test and one printed PASS/FAIL line per criterion.

Run with `pytest tests/test_acceptance.py -v -s` to see the lines as they
complete.  Criterion 7 (full-horizon direct confirmation) is expensive and
excluded by default; enable it with SUBRES_LONG=1 (see scripts/long_horizon.sh).
"""

import math
import os
import time

import numpy as np
import pytest

from subres.cli import ScenarioConfig, _DEFAULTS, build_comparison, _run_long
from subres.coefficient import CoefficientSpec
from subres.envelope import (
    EnvelopeParams,
    EnvelopeState,
    ab_to_slow,
    closed_form_kappa0,
    derive_lambda,
    integrate_envelope,
    integrate_theta_form,
    peak_log_norm,
    slow_to_ab,
)
from subres.solver import (
    OscillatorParams,
    State,
    classify_growth,
    integrate,
    precompute_q_nodes,
    wronskian_drift,
)
from subres.sums import (
    c_s,
    constants,
    fit_asymptotic_constant,
    lattice_samples,
    versine_constant,
)
from subres.sweep import GridSpec, stability_map
from subres.wkb import turning_point

SPEC = CoefficientSpec(k=2, p=5)


def _report(n: int, ok: bool, detail: str) -> None:
    line = f"[CRITERION {n}] {'PASS' if ok else 'FAIL'}: {detail}"
    print(line, flush=True)
    assert ok, line


def test_criterion_1_constant_reproduction():
    t0 = time.monotonic()
    a = constants(SPEC).a_alpha
    elapsed = time.monotonic() - t0
    ok = abs(a - 1.09264275) <= 1e-3 and elapsed <= 5.0
    _report(1, ok, f"a_alpha={a:.8f} vs 1.09264275 (|diff|={abs(a - 1.09264275):.2e}), {elapsed:.2f}s")


def test_criterion_2_lattice_cross_validation():
    t0 = time.monotonic()
    quad_sin = c_s(SPEC)
    quad_ver = versine_constant(SPEC)
    fs_c, fs_e = fit_asymptotic_constant(lattice_samples(SPEC, "sin", 1e3, 1e5, 16), 0.2)
    fv_c, fv_e = fit_asymptotic_constant(lattice_samples(SPEC, "versine", 1e3, 1e5, 16), 0.2)
    elapsed = time.monotonic() - t0
    d_sin = abs(fs_c - quad_sin) / quad_sin
    d_ver = abs(fv_c - quad_ver) / quad_ver
    ok = (
        d_sin <= 0.02
        and d_ver <= 0.02
        and abs(fs_e - 0.8) <= 0.05
        and abs(fv_e - 0.8) <= 0.05
        and elapsed <= 60.0
    )
    _report(
        2,
        ok,
        f"sin: fit {fs_c:.4f} vs quad {quad_sin:.4f} (rel {d_sin:.3f}), exp {fs_e:.4f}; "
        f"versine: fit {fv_c:.4f} vs quad {quad_ver:.4f} (rel {d_ver:.3f}), exp {fv_e:.4f}; "
        f"{elapsed:.1f}s",
    )


def test_criterion_3_kappa0_oracle():
    t0 = time.monotonic()
    c = constants(SPEC)
    b_coef = c.a_alpha / 4.0
    p = EnvelopeParams.make(alpha=0.2, b_coef=b_coef, kappa=0.0, phi=c.phi_alpha)
    traj = integrate_envelope(p, EnvelopeState(tau=1.0, w=1.0, v=1.0), 50.0, 0.001)
    worst = 0.0
    for idx in range(0, len(traj.taus), max(1, len(traj.taus) // 50)):
        wc, vc = closed_form_kappa0(b_coef, 0.2, 1.0, (1.0, 1.0), float(traj.taus[idx]))
        worst = max(
            worst,
            abs(traj.true_w[idx] - wc) / abs(wc),
            abs(traj.true_v[idx] - vc) / abs(vc),
        )
    elapsed = time.monotonic() - t0
    ok = worst <= 1e-6 and elapsed <= 5.0
    _report(3, ok, f"max relative deviation {worst:.2e} over tau in [1, 50], {elapsed:.2f}s")


def test_criterion_4_turning_point():
    t0 = time.monotonic()
    res = turning_point(5.0, 0.2)
    traj = integrate_theta_form(5.0, 0.2, (1.0, 1.0, 0.0), 6250.0, 0.05, output_stride=20)
    theta_pk, _ = peak_log_norm(traj)
    elapsed = time.monotonic() - t0
    root_ok = abs(res.theta_star_exact - 3125.0) / 3125.0 <= 0.01
    peak_ok = 0.5 * 3125.0 <= theta_pk <= 2.0 * 3125.0
    ok = root_ok and peak_ok and elapsed <= 30.0
    _report(
        4,
        ok,
        f"bisected theta*={res.theta_star_exact:.2f} (vs 3125), "
        f"numeric peak theta={theta_pk:.1f}, {elapsed:.1f}s",
    )


def test_criterion_5_physical_turning_time():
    t0 = time.monotonic()
    cfg = ScenarioConfig(values={**_DEFAULTS, "delta": 0.00347})
    report = build_comparison(cfg)
    elapsed = time.monotonic() - t0
    t_turn = report["turning_time"]
    ok = 8.9e5 <= t_turn <= 9.1e5 and elapsed <= 10.0
    variant = next(
        v for v in report["variants"] if v["label"] == "gamma=1/(1+alpha), B rounded"
    )
    _report(
        5,
        ok,
        f"derived-chain T={t_turn:.0f} vs required [8.9e5, 9.1e5] "
        f"(the band is only reached by the alternative-convention variant "
        f"T={variant['turning_time']:.0f}); {elapsed:.1f}s",
    )


def test_criterion_6_regime_reproduction():
    t0 = time.monotonic()
    t_end, dt = 2.0e4, 0.02
    n_terms = 4 * math.ceil(t_end ** 0.2)
    q_nodes = precompute_q_nodes(SPEC, n_terms, 0.0, t_end, dt)
    results = {}
    drifts = {}
    for delta in (0.01, 0.00347):
        params = OscillatorParams(delta=delta, epsilon=0.1, spec=SPEC, n_terms=n_terms)
        traj = integrate(
            params, State(t=0.0, u=1.0, du=0.0), t_end, dt,
            output_stride=500, q_nodes=q_nodes,
        )
        results[delta] = classify_growth(traj)
        drifts[delta] = wronskian_drift(params, t_end, dt, q_nodes=q_nodes)
    elapsed = time.monotonic() - t0
    ok = (
        results[0.01] == "bounded"
        and results[0.00347] == "growing"
        and max(drifts.values()) <= 1e-5
        and elapsed <= 300.0
    )
    _report(
        6,
        ok,
        f"delta=0.01 -> {results[0.01]}, delta=0.00347 -> {results[0.00347]}, "
        f"max Wronskian drift {max(drifts.values()):.2e}, {elapsed:.0f}s",
    )


@pytest.mark.skipif(
    os.environ.get("SUBRES_LONG") != "1",
    reason="full-horizon run (~10^7 steps); enable with SUBRES_LONG=1",
)
def test_criterion_7_full_horizon_confirmation():
    t0 = time.monotonic()
    cfg = ScenarioConfig(values={**_DEFAULTS, "delta": 0.00347})
    report = build_comparison(cfg)
    _run_long(cfg, report)
    elapsed = time.monotonic() - t0
    ratio = report["direct_peak_ratio"]
    ok = 0.5 <= ratio <= 2.0 and elapsed <= 3600.0
    _report(
        7,
        ok,
        f"direct envelope peak at t={report['direct_peak_time']:.0f}, "
        f"reported T={report['turning_time']:.0f}, ratio {ratio:.2f}, {elapsed:.0f}s",
    )


def test_criterion_8_property_suites():
    t0 = time.monotonic()
    failures = []

    # tail monotonicity of the lattice sum truncation
    from subres.sums import lattice_sum_sin

    base = 4 * math.ceil(1e3 ** 0.2)
    vals = [lattice_sum_sin(SPEC, 1e3, n) for n in (base, 4 * base, 16 * base, 64 * base)]
    deltas = [abs(vals[i + 1] - vals[i]) for i in range(3)]
    if not deltas[0] > deltas[1] > deltas[2]:
        failures.append("tail monotonicity")

    # Wronskian constancy with 4th-order convergence
    params = OscillatorParams(delta=0.0, epsilon=0.1, spec=SPEC, n_terms=64)
    d1 = wronskian_drift(params, 100.0, 0.04)
    d2 = wronskian_drift(params, 100.0, 0.02)
    if not (d2 < 1e-8 and d1 / d2 > 12.0):
        failures.append(f"Wronskian convergence (ratio {d1 / d2:.1f})")

    # linearity of the direct solver
    kw = dict(t_end=100.0, dt=0.02, output_stride=100)
    s1 = integrate(params, State(t=0.0, u=1.0, du=0.0), **kw)
    s2 = integrate(params, State(t=0.0, u=0.0, du=1.0), **kw)
    s3 = integrate(params, State(t=0.0, u=2.0, du=-3.0), **kw)
    if np.max(np.abs(2 * s1.us - 3 * s2.us - s3.us)) > 1e-12 * np.max(np.abs(s3.us)):
        failures.append("solver linearity")

    # rotation-norm conservation (B = 0 pure rotation)
    p0 = EnvelopeParams.make(alpha=0.2, b_coef=0.0, kappa=0.7, phi=0.0)
    rot = integrate_envelope(p0, EnvelopeState(tau=1.0, w=0.6, v=0.8), 50.0, 0.002)
    if np.max(np.abs(rot.log_norm)) > 1e-10:
        failures.append("rotation-norm conservation")

    # theta/tau rescaling equivalence
    kappa, b_coef = 0.5, 0.273
    lam = derive_lambda(b_coef, kappa, 0.2)
    pe = EnvelopeParams.make(alpha=0.2, b_coef=b_coef, kappa=kappa, phi=0.0)
    t_tau = integrate_envelope(pe, EnvelopeState(tau=2.0, w=1.0, v=0.3), 22.0, 0.001)
    t_th = integrate_theta_form(lam, 0.2, (1.0, 1.0, 0.3), 11.0, 0.0005)
    if np.max(np.abs(t_th.log_norm - t_tau.log_norm)) > 1e-8:
        failures.append("rescaling equivalence")

    # roundtrip conversions
    w, v = ab_to_slow(1.3, -0.4, 0.7, 5.0, 0.1)
    a2, b2 = slow_to_ab(w, v, 0.7, 5.0, 0.1)
    if abs(a2 - 1.3) > 1e-12 or abs(b2 + 0.4) > 1e-12:
        failures.append("rotation roundtrip")

    # CSV round-trip at the float level
    row = [0.1 + 0.2, 1.0 / 3.0, math.pi]
    if [float(repr(x)) for x in row] != row:
        failures.append("CSV float round-trip")

    # sweep determinism under varying worker counts
    grid = GridSpec(
        delta_min=0.0, delta_max=0.01, delta_count=2,
        epsilon_min=0.0, epsilon_max=0.1, epsilon_count=2,
        t_end=400.0, dt=0.02,
    )
    m1 = stability_map(grid, SPEC, workers=1)
    m2 = stability_map(grid, SPEC, workers=2)
    if not (
        np.array_equal(m1.verdicts, m2.verdicts)
        and np.array_equal(m1.envelope_ratios, m2.envelope_ratios)
    ):
        failures.append("sweep determinism")

    elapsed = time.monotonic() - t0
    ok = not failures and elapsed <= 600.0
    _report(8, ok, f"{'all invariants hold' if ok else 'failed: ' + ', '.join(failures)}, {elapsed:.0f}s")
