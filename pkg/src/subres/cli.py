"""Command-line front end: scenario configs, CSV emission, reports.

Subcommands:
  constants  quadrature constants plus lattice-fit cross-check
  simulate   direct integration of u'' + (w^2 + eps q(t)) u = 0
  envelope   averaged slow-amplitude system, tau- or theta-form
  sweep      (delta, epsilon) stability map
  compare    asymptotic chain (gamma, B, kappa, lambda, theta*, T) vs numerics

Exit codes: 0 success, 1 usage error, 2 domain/regime error, 3 numeric error
(horizon, truncation policy, quadrature).  Scenario files are flat JSON with
the same keys as the long flags (dashes as underscores); explicit flags
override file values.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import envelope as envmod
from . import sums, sweep, wkb
from .coefficient import CoefficientSpec, TruncationPolicy, truncation_order
from .errors import DomainError, NumericError, SubresError
from .solver import OscillatorParams, State, integrate

__all__ = ["main", "build_comparison", "ScenarioConfig"]

_DEFAULTS = {
    "k": 2.0,
    "p": 5.0,
    "epsilon": 0.1,
    "delta": None,
    "kappa": None,
    "lam": None,
    "t_end": 2.0e4,
    "dt": 0.02,
    "abs_tol": 1.0e-3,
    "max_terms": 10_000_000,
    "out": None,
    "threads": None,
    "long": False,
    "gnuplot": False,
    # envelope-specific
    "theta_form": False,
    "w0": 1.0,
    "v0": 0.0,
    "tau0": 1.0,
    "tau_end": 50.0,
    "dtau": 0.001,
    # sweep-specific
    "delta_min": 0.0,
    "delta_max": 0.01,
    "delta_count": 11,
    "epsilon_min": 0.0,
    "epsilon_max": 0.1,
    "epsilon_count": 3,
    "growth_factor": 3.0,
    # constants-specific
    "fit_t_min": 1.0e3,
    "fit_t_max": 1.0e5,
    "fit_samples": 16,
}


@dataclass(frozen=True)
class ScenarioConfig:
    """Merged scenario parameters: defaults < config file < explicit flags."""

    values: dict

    def __getattr__(self, name):
        try:
            return self.values[name]
        except KeyError:
            raise AttributeError(name) from None

    def spec(self) -> CoefficientSpec:
        return CoefficientSpec(k=self.values["k"], p=self.values["p"])

    def policy(self, t_max: float) -> TruncationPolicy:
        return TruncationPolicy(
            abs_tol=self.values["abs_tol"],
            max_terms=int(self.values["max_terms"]),
            t_max=t_max,
        )

    def threads(self) -> int:
        if self.values["threads"] is not None:
            return int(self.values["threads"])
        env = os.environ.get("SUBRES_THREADS")
        if env is not None:
            return int(env)
        return os.cpu_count() or 1


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; the contract reserves 2 for domain
    # errors and uses 1 for usage
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        sys.exit(1)


def _fmt(x) -> str:
    """Shortest round-trip decimal for CSV cells."""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _write_csv(path: str, header: list[str], rows) -> None:
    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(x) for x in row) + "\n")


def _emit_gnuplot(path: str, script: str) -> None:
    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        fh.write(script)


def _resolve_parameterization(cfg: ScenarioConfig) -> dict:
    """Resolve exactly one of {delta, kappa, lambda} into the full chain.

    Returns alpha, gamma, a_alpha, phi, b_coef, omega, delta, kappa, lam.
    B = A/(4 omega) depends on delta through omega, so the lambda route
    iterates the (B, kappa, delta) loop to a fixed point.
    """
    given = [n for n in ("delta", "kappa", "lam") if cfg.values[n] is not None]
    if len(given) != 1:
        raise DomainError(
            f"exactly one of --delta, --kappa, --lambda must be given (got {given or 'none'})"
        )
    spec = cfg.spec()
    consts = sums.constants(spec)
    al = consts.alpha
    gamma = envmod.derive_gamma(al)
    eps = cfg.epsilon
    if eps <= 0.0:
        raise DomainError("epsilon must be positive for the parameter chain")

    if given[0] == "delta":
        delta = float(cfg.delta)
        kappa = envmod.derive_kappa(delta, eps, gamma)
    elif given[0] == "kappa":
        kappa = float(cfg.kappa)
        delta = kappa * eps ** gamma
    else:
        lam_target = float(cfg.lam)
        delta = 0.0
        for _ in range(8):
            b_coef = envmod.derive_b(consts.a_alpha, 1.0 + delta)
            kappa = envmod.derive_kappa_from_lambda(b_coef, lam_target, al)
            delta = kappa * eps ** gamma
    omega = 1.0 + delta
    b_coef = envmod.derive_b(consts.a_alpha, omega)
    lam = envmod.derive_lambda(b_coef, kappa, al) if kappa > 0.0 else math.nan
    return {
        "alpha": al,
        "gamma": gamma,
        "a_alpha": consts.a_alpha,
        "phi": consts.phi_alpha,
        "b_coef": b_coef,
        "omega": omega,
        "delta": delta,
        "kappa": kappa,
        "lam": lam,
    }


# ---------------------------------------------------------------- commands


def cmd_constants(cfg: ScenarioConfig) -> int:
    spec = cfg.spec()
    c = sums.constants(spec)
    print(f"alpha      = {c.alpha!r}")
    print(f"c_s        = {c.c_s!r}")
    print(f"c_c        = {c.c_c!r}")
    print(f"a_alpha    = {c.a_alpha!r}")
    print(f"phi_alpha  = {c.phi_alpha!r}")
    v = sums.versine_constant(spec)
    print(f"versine    = {v!r}")
    samples = sums.lattice_samples(
        spec, "versine", cfg.fit_t_min, cfg.fit_t_max, int(cfg.fit_samples)
    )
    fit_c, fit_e = sums.fit_asymptotic_constant(samples, c.alpha)
    print(f"lattice fit (versine): constant = {fit_c!r}  exponent = {fit_e!r}")
    print(f"fit/quadrature discrepancy = {abs(fit_c - v) / v!r}")
    if cfg.out:
        _write_csv(
            cfg.out,
            ["name", "value"],
            [
                ("alpha", c.alpha),
                ("c_s", c.c_s),
                ("c_c", c.c_c),
                ("a_alpha", c.a_alpha),
                ("phi_alpha", c.phi_alpha),
                ("versine", v),
                ("fit_constant", fit_c),
                ("fit_exponent", fit_e),
            ],
        )
    return 0


def cmd_simulate(cfg: ScenarioConfig) -> int:
    if cfg.delta is None:
        raise DomainError("simulate requires --delta")
    spec = cfg.spec()
    n_terms = truncation_order(spec, cfg.policy(cfg.t_end))
    params = OscillatorParams(
        delta=float(cfg.delta), epsilon=cfg.epsilon, spec=spec, n_terms=n_terms
    )
    traj = integrate(params, State(t=0.0, u=1.0, du=0.0), cfg.t_end, cfg.dt)
    out = cfg.out or "trajectory.csv"
    _write_csv(
        out,
        ["t", "u", "du", "envelope"],
        zip(traj.ts.tolist(), traj.us.tolist(), traj.dus.tolist(), traj.envelopes.tolist()),
    )
    if traj.truncated:
        print(f"overflow at t = {traj.ts[-1]!r}; trajectory truncated", file=sys.stderr)
    print(f"wrote {len(traj)} samples to {out}")
    if cfg.gnuplot:
        _emit_gnuplot(
            out + ".gp",
            f'set datafile separator ","\n'
            f'plot "{out}" using 1:2 with lines title "u", '
            f'"{out}" using 1:4 with lines title "envelope"\n',
        )
    return 0


def cmd_envelope(cfg: ScenarioConfig) -> int:
    chain = _resolve_parameterization(cfg)
    out = cfg.out or "envelope.csv"
    if cfg.theta_form:
        lam = chain["lam"]
        if not math.isfinite(lam):
            raise DomainError("theta form needs kappa > 0 (lambda undefined at kappa=0)")
        traj = envmod.integrate_theta_form(
            lam,
            chain["alpha"],
            (cfg.tau0, cfg.w0, cfg.v0),
            cfg.tau_end,
            cfg.dtau,
            output_stride=max(1, int(round((cfg.tau_end - cfg.tau0) / cfg.dtau)) // 5000),
        )
        _write_csv(
            out,
            ["theta", "w_dir", "v_dir", "log_norm"],
            zip(
                traj.taus.tolist(),
                traj.w_dir.tolist(),
                traj.v_dir.tolist(),
                traj.log_norm.tolist(),
            ),
        )
        theta_pk, log_pk = envmod.peak_log_norm(traj)
        print(f"wrote {len(traj.taus)} samples to {out}")
        print(f"log-norm peak at theta = {theta_pk!r} (log norm {log_pk!r})")
        return 0

    params = envmod.EnvelopeParams.make(
        alpha=chain["alpha"],
        b_coef=chain["b_coef"],
        kappa=chain["kappa"],
        phi=chain["phi"],
    )
    traj = envmod.integrate_envelope(
        params,
        envmod.EnvelopeState(tau=cfg.tau0, w=cfg.w0, v=cfg.v0),
        cfg.tau_end,
        cfg.dtau,
        output_stride=max(1, int(round((cfg.tau_end - cfg.tau0) / cfg.dtau)) // 5000),
    )
    header = ["tau", "w", "v", "log_norm"]
    w = traj.true_w
    v = traj.true_v
    columns = [traj.taus.tolist(), w.tolist(), v.tolist(), traj.log_norm.tolist()]
    if chain["kappa"] == 0.0:
        closed = [
            envmod.closed_form_kappa0(
                chain["b_coef"], chain["alpha"], cfg.tau0, (cfg.w0, cfg.v0), float(t)
            )
            for t in traj.taus
        ]
        header += ["w_closed", "v_closed"]
        columns += [[c[0] for c in closed], [c[1] for c in closed]]
        scale = np.max(np.abs(closed))
        err = max(
            float(np.max(np.abs(w - np.array([c[0] for c in closed])))),
            float(np.max(np.abs(v - np.array([c[1] for c in closed])))),
        ) / float(scale)
        print(f"kappa=0 closed-form max relative deviation = {err!r}")
    _write_csv(out, header, zip(*columns))
    print(f"wrote {len(traj.taus)} samples to {out}")
    return 0


def cmd_sweep(cfg: ScenarioConfig) -> int:
    grid = sweep.GridSpec(
        delta_min=cfg.delta_min,
        delta_max=cfg.delta_max,
        delta_count=int(cfg.delta_count),
        epsilon_min=cfg.epsilon_min,
        epsilon_max=cfg.epsilon_max,
        epsilon_count=int(cfg.epsilon_count),
        t_end=cfg.t_end,
        dt=cfg.dt,
        growth_factor=cfg.growth_factor,
    )
    spec = cfg.spec()
    n_terms = truncation_order(spec, cfg.policy(cfg.t_end))
    smap = sweep.stability_map(grid, spec, n_terms=n_terms, workers=cfg.threads())
    out = cfg.out or "stability_map.csv"
    _write_csv(out, ["delta", "epsilon", "verdict", "envelope_ratio"], sweep.map_rows(smap))
    growing = int(np.sum(smap.verdicts == "growing"))
    print(f"wrote {smap.verdicts.size} cells to {out} ({growing} growing)")
    if cfg.gnuplot:
        _emit_gnuplot(
            out + ".gp",
            f'set datafile separator ","\n'
            f'plot "{out}" using 1:2:($3 eq "growing" ? 1 : 0) with points palette\n',
        )
    return 0


def build_comparison(cfg: ScenarioConfig) -> dict:
    """Asymptotic parameter chain plus numeric cross checks, as a flat dict.

    The primary chain uses the derived exponents gamma = 1/(1-alpha) and
    B = A/(4 omega).  The variants list reports the same pipeline under
    alternative exponent/rounding conventions for transparency.
    """
    chain = _resolve_parameterization(cfg)
    al, gamma = chain["alpha"], chain["gamma"]
    delta, kappa, lam = chain["delta"], chain["kappa"], chain["lam"]
    report = dict(chain)

    if kappa == 0.0:
        report["turning"] = "no turning point: pure subresonant growth"
        return report

    if lam > 1.0:
        res = wkb.turning_point(lam, al)
        report["theta_star_exact"] = res.theta_star_exact
        report["theta_star_approx"] = res.theta_star_approx
        report["turning_time"] = wkb.physical_turning_time(
            res.theta_star_exact, kappa, cfg.epsilon, gamma
        )
        # numeric saturation of the theta-form envelope
        theta_end = 2.5 * res.theta_star_approx
        dtheta = min(0.05, res.theta_star_approx / 2000.0)
        traj = envmod.integrate_theta_form(
            lam,
            al,
            (min(1.0, res.theta_star_approx / 100.0), 1.0, 0.0),
            theta_end,
            dtheta,
            output_stride=max(1, int(theta_end / dtheta) // 20000),
        )
        theta_pk, log_pk = envmod.peak_log_norm(traj)
        report["theta_saturation_numeric"] = theta_pk
        report["theta_saturation_ratio"] = theta_pk / res.theta_star_exact
        report["log_norm_peak"] = log_pk
        report["turning_time_numeric_envelope"] = theta_pk / (kappa * cfg.epsilon ** gamma)
    else:
        report["turning"] = "lambda <= 1: growth region never forms (no turning point)"

    # same chain under alternative exponent conventions, anchored at this delta
    variants = []
    a4 = chain["a_alpha"] / (4.0 * chain["omega"])
    for label, gamma_v, b_v in [
        ("derived", gamma, a4),
        ("gamma=1/(1+alpha)", 1.0 / (1.0 + al), a4),
        ("gamma=1/(1+alpha), B rounded", 1.0 / (1.0 + al), round(4.0 * a4) / 4.0),
    ]:
        kappa_v = delta / cfg.epsilon ** gamma_v
        lam_v = b_v * kappa_v ** (al - 1.0)
        if lam_v > 1.0:
            theta_v = wkb.turning_point(lam_v, al).theta_star_exact
            t_v = theta_v / delta
        else:
            theta_v = math.nan
            t_v = math.nan
        variants.append(
            {
                "label": label,
                "gamma": gamma_v,
                "b_coef": b_v,
                "kappa": kappa_v,
                "lam": lam_v,
                "theta_star": theta_v,
                "turning_time": t_v,
            }
        )
    report["variants"] = variants
    return report


def _run_long(cfg: ScenarioConfig, report: dict) -> None:
    """Direct simulation past the reported turning time; locates the peak."""
    t_turn = report["turning_time"]
    t_long = 2.5 * t_turn
    spec = cfg.spec()
    n_terms = truncation_order(spec, cfg.policy(t_long))
    params = OscillatorParams(
        delta=report["delta"], epsilon=cfg.epsilon, spec=spec, n_terms=n_terms
    )
    stride = max(1, int(round(t_long / cfg.dt)) // 200000)
    traj = integrate(
        params, State(t=0.0, u=1.0, du=0.0), t_long, cfg.dt, output_stride=stride
    )
    i = int(np.argmax(traj.envelopes))
    report["direct_peak_time"] = float(traj.ts[i])
    report["direct_peak_envelope"] = float(traj.envelopes[i])
    report["direct_peak_ratio"] = float(traj.ts[i]) / t_turn
    report["direct_truncated"] = traj.truncated


def cmd_compare(cfg: ScenarioConfig) -> int:
    report = build_comparison(cfg)
    if cfg.long:
        if "turning_time" not in report:
            raise DomainError("--long needs a finite turning time (kappa > 0, lambda > 1)")
        _run_long(cfg, report)

    for key in (
        "alpha",
        "gamma",
        "a_alpha",
        "b_coef",
        "omega",
        "delta",
        "kappa",
        "lam",
    ):
        print(f"{key:28s} = {report[key]!r}")
    if "turning" in report:
        print(report["turning"])
    for key in (
        "theta_star_exact",
        "theta_star_approx",
        "turning_time",
        "theta_saturation_numeric",
        "theta_saturation_ratio",
        "turning_time_numeric_envelope",
        "direct_peak_time",
        "direct_peak_ratio",
    ):
        if key in report:
            print(f"{key:28s} = {report[key]!r}")
    if "variants" in report:
        print("variants (same delta, alternative exponent conventions):")
        for v in report["variants"]:
            print(
                f"  {v['label']:32s} gamma={v['gamma']!r} B={v['b_coef']!r} "
                f"kappa={v['kappa']!r} lambda={v['lam']!r} "
                f"theta*={v['theta_star']!r} T={v['turning_time']!r}"
            )
    if cfg.out:
        rows = [(k, v) for k, v in report.items() if isinstance(v, (int, float, str))]
        for v in report.get("variants", []):
            for k in ("gamma", "b_coef", "kappa", "lam", "theta_star", "turning_time"):
                rows.append((f"variant[{v['label']}].{k}", v[k]))
        _write_csv(cfg.out, ["name", "value"], rows)
    return 0


# ---------------------------------------------------------------- plumbing


def _add_common(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--config", type=str, default=None, help="JSON scenario file")
    sp.add_argument("--k", type=float, default=None)
    sp.add_argument("--p", type=float, default=None)
    sp.add_argument("--epsilon", type=float, default=None)
    sp.add_argument("--delta", type=float, default=None)
    sp.add_argument("--t-end", dest="t_end", type=float, default=None)
    sp.add_argument("--dt", type=float, default=None)
    sp.add_argument("--out", type=str, default=None)
    sp.add_argument("--threads", type=int, default=None)
    sp.add_argument("--abs-tol", dest="abs_tol", type=float, default=None)
    sp.add_argument("--max-terms", dest="max_terms", type=int, default=None)


def _build_parser() -> _Parser:
    parser = _Parser(prog="subres", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("constants", help="asymptotic constants + lattice fit")
    _add_common(sp)
    sp.add_argument("--fit-t-min", dest="fit_t_min", type=float, default=None)
    sp.add_argument("--fit-t-max", dest="fit_t_max", type=float, default=None)
    sp.add_argument("--fit-samples", dest="fit_samples", type=int, default=None)
    sp.set_defaults(func=cmd_constants)

    sp = sub.add_parser("simulate", help="direct integration to CSV")
    _add_common(sp)
    sp.add_argument("--gnuplot", action="store_true", default=None)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("envelope", help="averaged slow-amplitude system to CSV")
    _add_common(sp)
    sp.add_argument("--kappa", type=float, default=None)
    sp.add_argument("--lambda", dest="lam", type=float, default=None)
    sp.add_argument("--theta-form", dest="theta_form", action="store_true", default=None)
    sp.add_argument("--w0", type=float, default=None)
    sp.add_argument("--v0", type=float, default=None)
    sp.add_argument("--tau0", type=float, default=None)
    sp.add_argument("--tau-end", dest="tau_end", type=float, default=None)
    sp.add_argument("--dtau", type=float, default=None)
    sp.set_defaults(func=cmd_envelope)

    sp = sub.add_parser("sweep", help="(delta, epsilon) stability map to CSV")
    _add_common(sp)
    sp.add_argument("--delta-min", dest="delta_min", type=float, default=None)
    sp.add_argument("--delta-max", dest="delta_max", type=float, default=None)
    sp.add_argument("--delta-count", dest="delta_count", type=int, default=None)
    sp.add_argument("--epsilon-min", dest="epsilon_min", type=float, default=None)
    sp.add_argument("--epsilon-max", dest="epsilon_max", type=float, default=None)
    sp.add_argument("--epsilon-count", dest="epsilon_count", type=int, default=None)
    sp.add_argument("--growth-factor", dest="growth_factor", type=float, default=None)
    sp.add_argument("--gnuplot", action="store_true", default=None)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("compare", help="asymptotic chain vs numerics")
    _add_common(sp)
    sp.add_argument("--kappa", type=float, default=None)
    sp.add_argument("--lambda", dest="lam", type=float, default=None)
    sp.add_argument("--long", action="store_true", default=None)
    sp.set_defaults(func=cmd_compare)

    return parser


def load_config(args: argparse.Namespace) -> ScenarioConfig:
    merged = dict(_DEFAULTS)
    if getattr(args, "config", None):
        with open(args.config, encoding="utf-8") as fh:
            data = json.load(fh)
        unknown = set(data) - set(_DEFAULTS)
        if unknown:
            raise DomainError(f"unknown config keys: {sorted(unknown)}")
        merged.update(data)
    for key, value in vars(args).items():
        if key in merged and value is not None:
            merged[key] = value
    return ScenarioConfig(values=merged)


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args)
        return args.func(cfg)
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 3
    except SubresError as exc:  # pragma: no cover - base-class safety net
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
