import json
import math
import subprocess
import sys

import pytest

from subres.cli import ScenarioConfig, _DEFAULTS, build_comparison, main


def _cfg(**overrides):
    values = dict(_DEFAULTS)
    values.update(overrides)
    return ScenarioConfig(values=values)


def test_usage_error_exit_code():
    # bad subcommand must exit 1, not argparse's default 2
    proc = subprocess.run(
        [sys.executable, "-m", "subres.cli", "bogus"], capture_output=True
    )
    assert proc.returncode == 1


def test_missing_subcommand_exit_code():
    proc = subprocess.run([sys.executable, "-m", "subres.cli"], capture_output=True)
    assert proc.returncode == 1


def test_regime_error_exit_code(capsys):
    # alpha = 1 boundary -> domain error
    assert main(["constants", "--k", "2", "--p", "1"]) == 2


def test_policy_error_exit_code(capsys):
    assert main(["simulate", "--delta", "0.01", "--t-end", "20000", "--max-terms", "10"]) == 3


def test_parameterization_exclusivity(capsys):
    assert main(["compare", "--delta", "0.01", "--kappa", "0.1"]) == 2
    assert main(["compare"]) == 2  # none given


def test_constants_reference(capsys):
    assert main(["constants", "--k", "2", "--p", "5"]) == 0
    out = capsys.readouterr().out
    a_line = next(l for l in out.splitlines() if l.startswith("a_alpha"))
    assert float(a_line.split("=")[1]) == pytest.approx(1.0926836901629995, rel=1e-9)


def test_config_file_and_flag_override(tmp_path, capsys):
    cfgfile = tmp_path / "scenario.json"
    cfgfile.write_text(json.dumps({"k": 3, "p": 4, "fit_t_min": 100.0}))
    assert main(["constants", "--config", str(cfgfile)]) == 0
    out = capsys.readouterr().out
    assert "alpha      = 0.5" in out
    # explicit flag wins over the file value
    assert main(["constants", "--config", str(cfgfile), "--p", "5"]) == 0
    out = capsys.readouterr().out
    assert "alpha      = 0.4" in out


def test_config_unknown_key_rejected(tmp_path, capsys):
    cfgfile = tmp_path / "bad.json"
    cfgfile.write_text(json.dumps({"delta_typo": 1}))
    assert main(["constants", "--config", str(cfgfile)]) == 2


def test_simulate_csv_round_trip(tmp_path, capsys):
    out = tmp_path / "traj.csv"
    rc = main(
        ["simulate", "--delta", "0.01", "--epsilon", "0.1",
         "--t-end", "200", "--out", str(out)]
    )
    assert rc == 0
    text = out.read_bytes()
    assert text.endswith(b"\n") and b"\r" not in text
    lines = text.decode().splitlines()
    assert lines[0] == "t,u,du,envelope"
    # shortest round-trip floats: parse and re-emit byte-identically
    rebuilt = [lines[0]]
    for line in lines[1:]:
        rebuilt.append(",".join(repr(float(x)) for x in line.split(",")))
    assert "\n".join(rebuilt) + "\n" == text.decode()


def test_envelope_kappa0_closed_form_column(tmp_path, capsys):
    out = tmp_path / "env.csv"
    rc = main(["envelope", "--kappa", "0", "--tau-end", "30", "--out", str(out)])
    assert rc == 0
    stdout = capsys.readouterr().out
    dev = float(stdout.splitlines()[0].rsplit("=", 1)[1])
    assert dev <= 1e-6
    header = out.read_text().splitlines()[0]
    assert header == "tau,w,v,log_norm,w_closed,v_closed"


def test_envelope_b_zero_not_rejected(tmp_path, capsys):
    # B = 0 is a legal pure-rotation scenario via a k,p pair? B comes from
    # quadrature so it is never 0 through the CLI chain; the flag contract
    # is exercised at the library level instead.  Here: theta-form needs
    # kappa > 0.
    assert main(["envelope", "--kappa", "0", "--theta-form"]) == 2


def test_sweep_csv(tmp_path, capsys):
    out = tmp_path / "map.csv"
    rc = main(
        ["sweep", "--delta-min", "0", "--delta-max", "0.01", "--delta-count", "2",
         "--epsilon-min", "0", "--epsilon-max", "0", "--epsilon-count", "1",
         "--t-end", "300", "--threads", "1", "--out", str(out)]
    )
    assert rc == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "delta,epsilon,verdict,envelope_ratio"
    assert len(lines) == 3
    assert all("bounded" in line for line in lines[1:])


def test_compare_report_chain(capsys):
    rc = main(["compare", "--k", "2", "--p", "5", "--epsilon", "0.1", "--delta", "0.00347"])
    assert rc == 0
    out = capsys.readouterr().out
    assert "turning_time" in out
    assert "variants" in out


def test_compare_kappa0_branch(capsys):
    rc = main(["compare", "--kappa", "0"])
    assert rc == 0
    assert "no turning point: pure subresonant growth" in capsys.readouterr().out


def test_build_comparison_values():
    report = build_comparison(_cfg(delta=0.00347))
    assert report["gamma"] == pytest.approx(1.25)
    assert report["kappa"] == pytest.approx(0.00347 / 0.1 ** 1.25, rel=1e-12)
    # numeric envelope saturation agrees with the bisected turning point
    assert 0.5 <= report["theta_saturation_ratio"] <= 2.0
    labels = [v["label"] for v in report["variants"]]
    assert "derived" in labels


def test_build_comparison_lambda_route():
    # specifying lambda resolves delta through the fixed-point loop
    report = build_comparison(_cfg(lam=5.0))
    assert report["lam"] == pytest.approx(5.0, rel=1e-9)
    delta = report["delta"]
    assert report["kappa"] == pytest.approx(delta / 0.1 ** 1.25, rel=1e-9)


def test_threads_env_override(monkeypatch):
    monkeypatch.setenv("SUBRES_THREADS", "3")
    assert _cfg().threads() == 3
    assert _cfg(threads=2).threads() == 2
