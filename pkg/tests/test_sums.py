import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import gamma as gamma_fn

from subres.coefficient import CoefficientSpec
from subres.errors import DomainError
from subres.sums import (
    AsymptoticConstants,
    alpha,
    c_c,
    c_s,
    constants,
    fit_asymptotic_constant,
    lattice_samples,
    lattice_sum_sin,
    lattice_sum_versine,
    printed_variants,
    versine_constant,
)

# Frozen quadrature values for k=2, p=5 (alpha = 0.2), cross-checked against
# the Gamma-function closed forms below before freezing.
CS_25 = 1.0915379568972734
CC_25 = -0.050025347582560546
A_25 = 1.0926836901629995
VERSINE_25 = 0.3546621813817493


def test_alpha(spec25):
    assert alpha(spec25) == pytest.approx(0.2, abs=1e-15)
    with pytest.raises(DomainError):
        alpha(CoefficientSpec(k=2, p=1))  # alpha = 1 boundary
    with pytest.raises(DomainError):
        alpha(CoefficientSpec(k=8, p=5))  # alpha > 1


def test_frozen_values(spec25):
    assert c_s(spec25) == pytest.approx(CS_25, rel=1e-12)
    assert c_c(spec25) == pytest.approx(CC_25, rel=1e-12)
    assert versine_constant(spec25) == pytest.approx(VERSINE_25, rel=1e-12)
    c = constants(spec25)
    assert c.a_alpha == pytest.approx(A_25, rel=1e-12)
    assert c.phi_alpha == pytest.approx(math.atan2(CC_25, CS_25), rel=1e-12)


def _gamma_sin_oracle(a: float, p: float) -> float:
    # int_0^inf u^(a-2) sin u du = Gamma(a-1) sin(pi (a-1) / 2) for 0 < a < 1
    mu = a - 1.0
    return float(gamma_fn(mu)) * math.sin(math.pi * mu / 2.0) / p


def _gamma_versine_oracle(a: float, p: float) -> float:
    # int_0^inf u^(a-2) (1 - cos u) du = -Gamma(a-1) cos(pi (a-1) / 2)
    mu = a - 1.0
    return -float(gamma_fn(mu)) * math.cos(math.pi * mu / 2.0) / p


@pytest.mark.parametrize("k,p", [(2, 5), (3, 4), (2, 3), (1.5, 2)])
def test_quadrature_matches_gamma_closed_forms(k, p):
    spec = CoefficientSpec(k=k, p=p)
    a = alpha(spec)
    assert c_s(spec) == pytest.approx(_gamma_sin_oracle(a, p), rel=1e-9)
    assert versine_constant(spec) == pytest.approx(_gamma_versine_oracle(a, p), rel=1e-9)


def test_split_point_invariance(spec25):
    # quadrature value must not depend on the series/quad split location
    assert c_s(spec25, split=0.1) == pytest.approx(c_s(spec25, split=0.5), rel=1e-10)
    assert versine_constant(spec25, split=0.1) == pytest.approx(
        versine_constant(spec25, split=0.5), rel=1e-10
    )


def test_constants_bundle_validation(spec25):
    with pytest.raises(DomainError):
        AsymptoticConstants(alpha=0.2, c_s=1.0, c_c=0.0, a_alpha=2.0, phi_alpha=0.0)
    with pytest.raises(DomainError):
        AsymptoticConstants(alpha=0.2, c_s=1.0, c_c=0.0, a_alpha=1.0, phi_alpha=3.0)


def test_printed_variants_structure(spec25):
    v = printed_variants(spec25)
    assert v["cs_full"] == pytest.approx(CS_25, rel=1e-12)
    assert v["a_model"] == pytest.approx(A_25, rel=1e-12)
    # the half-period and versine readings are distinct published-formula
    # interpretations and must not silently collapse onto the model value
    assert abs(v["a_half_period_reading"] - v["a_model"]) > 1e-3
    assert abs(v["a_versine_reading"] - v["a_model"]) > 1e-3


def test_lattice_sum_horizon_guard(spec25):
    with pytest.raises(DomainError):
        lattice_sum_sin(spec25, 1.0e4, n_terms=10)


def test_lattice_tail_monotone(spec25):
    # beyond the horizon order, adding terms changes the sum by ever less
    t = 1.0e3
    base = 4 * math.ceil(t ** 0.2)
    vals = [lattice_sum_sin(spec25, t, n) for n in (base, 4 * base, 16 * base, 64 * base)]
    deltas = [abs(vals[i + 1] - vals[i]) for i in range(len(vals) - 1)]
    assert deltas[0] > deltas[1] > deltas[2]


def test_fit_synthetic_power_law():
    a = 0.3
    const = 2.7
    samples = [(t, const * t ** (1.0 - a)) for t in [10.0 * 1.8 ** i for i in range(12)]]
    fc, fe = fit_asymptotic_constant(samples, a)
    assert fc == pytest.approx(const, rel=1e-12)
    assert fe == pytest.approx(1.0 - a, abs=1e-12)


def test_fit_requires_enough_samples():
    with pytest.raises(DomainError):
        fit_asymptotic_constant([(1.0, 1.0)] * 5, 0.2)


def test_lattice_fit_approaches_quadrature(spec25):
    # the versine lattice sum grows like versine_constant * t^(1-alpha)
    samples = lattice_samples(spec25, "versine", 1.0e3, 1.0e5, 16)
    fc, fe = fit_asymptotic_constant(samples, 0.2)
    assert fc == pytest.approx(VERSINE_25, rel=0.05)
    assert fe == pytest.approx(0.8, abs=0.05)


@settings(max_examples=15, deadline=None)
@given(st.floats(min_value=1.3, max_value=3.0), st.floats(min_value=2.1, max_value=6.0))
def test_a_alpha_consistency(k, p):
    spec = CoefficientSpec(k=k, p=p)
    c = constants(spec)
    assert c.a_alpha == pytest.approx(math.hypot(c.c_s, c.c_c), rel=1e-12)
    assert abs(c.phi_alpha) < math.pi / 2
