import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from qrholder import (
    DistortionParams,
    DomainError,
    OutOfIntervalWarning,
    SingularityError,
    alpha0,
    alpha1,
    alpha2,
    alpha_classical,
    alpha_from_split,
    alpha_of_t,
    distortion_from_k,
    kk_prime_constants,
    t0_of,
    t1_of,
    t_split,
)
from qrholder.exponents import alpha0_literal, alpha2_split

K_GRID = [i / 100 for i in range(1, 100)]
ks = st.floats(min_value=1e-3, max_value=0.999)

# frozen from the mpmath oracle (50 digits)
ALPHA1_HALF = 0.404071483483008727
ALPHA2_HALF = 0.411684396980704299
ALPHA0_HALF = 0.416955468472712282


def test_distortion_round_trip():
    p = DistortionParams.from_K(3.0)
    assert p.k == 0.5
    q = distortion_from_k(0.5)
    assert q.K == 3.0


@pytest.mark.parametrize("bad", [-0.1, 1.0, 1.5, float("nan")])
def test_distortion_rejects_bad_k(bad):
    with pytest.raises(DomainError):
        distortion_from_k(bad)


@pytest.mark.parametrize("bad", [0.5, float("inf"), float("nan")])
def test_distortion_rejects_bad_K(bad):
    with pytest.raises(DomainError):
        DistortionParams.from_K(bad)


def test_classical_exponent_is_reciprocal_K():
    assert alpha_classical(0.5) == pytest.approx(1 / 3, abs=1e-16)
    assert alpha_classical(DistortionParams.from_K(7.0)) == pytest.approx(1 / 7, rel=1e-15)


def test_frozen_values_at_half():
    assert alpha1(0.5) == pytest.approx(ALPHA1_HALF, abs=1e-15)
    assert alpha2(0.5) == pytest.approx(ALPHA2_HALF, abs=1e-15)
    assert alpha0(0.5) == pytest.approx(ALPHA0_HALF, abs=1e-15)
    # ten digits as printed for the reference exponent
    assert round(alpha0(0.5), 10) == 0.4169554685


@given(ks)
def test_alpha1_matches_oracle(k):
    assert alpha1(k) == pytest.approx(float(oracles.alpha1(k)), abs=1e-14)


@given(ks)
def test_alpha2_matches_oracle(k):
    assert alpha2(k) == pytest.approx(float(oracles.alpha2(k)), abs=1e-14)


def test_alpha0_literal_equals_composition():
    worst = max(abs(alpha0_literal(k) - float(oracles.alpha0(k))) for k in K_GRID)
    assert worst < 1e-13


def test_alpha0_conformal_limit():
    assert alpha0(0.0) == pytest.approx(1.0, abs=1e-15)


@given(ks)
def test_alpha_at_left_endpoint_is_alpha1(k):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", OutOfIntervalWarning)
        assert alpha_of_t(k, 1 - k) == pytest.approx(alpha1(k), abs=1e-12)


@given(ks, st.floats(min_value=0.01, max_value=0.99))
def test_alpha_of_t_matches_oracle(k, u):
    t = (1 - k) + u * (k - k * k)
    assert alpha_of_t(k, t) == pytest.approx(float(oracles.alpha_t(k, t)), rel=1e-12, abs=1e-14)


@given(st.floats(1e-6, 10.0), st.floats(1e-6, 10.0))
def test_split_formula_is_stable(a, b):
    ref = float(oracles.alpha_split(a, b))
    assert alpha_from_split(a, b) == pytest.approx(ref, rel=1e-13)


def test_alpha2_split_reproduces_alpha2():
    for k in K_GRID:
        assert alpha_from_split(*alpha2_split(k)) == pytest.approx(alpha2(k), abs=1e-15)


def test_t1_pole():
    with pytest.raises(SingularityError):
        t1_of(0.5, 1.0)


def test_t1_vanishes_at_right_endpoint():
    for k in (0.2, 0.5, 0.8):
        assert abs(t1_of(k, 1 - k * k)) < 1e-15


def test_t_split_fields():
    s = t_split(0.5, 0.6)
    assert s.S == pytest.approx(s.t1 + s.t2)
    assert s.P == pytest.approx(s.t1 * s.t2)
    assert s.in_interval
    assert not t_split(0.5, 0.4).in_interval


def test_alpha_of_t_warns_outside_interval():
    with pytest.warns(OutOfIntervalWarning):
        alpha_of_t(0.5, 0.45)


def test_alpha_of_t_rejects_nonpositive_t1():
    with pytest.raises(DomainError):
        alpha_of_t(0.5, 0.8)


def test_t0_inside_interval():
    for k in K_GRID:
        assert 1 - k < t0_of(k) < 1 - k * k


def test_elliptic_constants():
    c = kk_prime_constants(1.0, 3.0, g_sup=2.0)
    assert c.K_out == 4.0
    assert c.K_prime == 2.0
    assert kk_prime_constants(2.0, 2.0).K_out == 2.0


@pytest.mark.parametrize("args", [(0.0, 1.0), (2.0, 1.0), (1.0, 2.0, -1.0)])
def test_elliptic_constants_reject(args):
    with pytest.raises(DomainError):
        kk_prime_constants(*args)


def test_alpha2_exceeds_classical_only_past_crossover():
    root = float(oracles.crossover())
    for k in np.linspace(0.01, 0.99, 99):
        if abs(k - root) > 1e-9:
            assert (alpha2(k) > alpha_classical(k)) == (k > root)


def test_crossover_by_bisection():
    from qrholder import alpha2_crossover

    assert alpha2_crossover() == pytest.approx(float(oracles.crossover()), abs=1e-10)
