import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qrholder import (
    CoeffPairSample,
    DomainError,
    SingularityError,
    alpha_star,
    constant_coeff_sweep,
    discrete_coeff_inequality,
    discrete_sweep,
    discriminant_condition,
    jacobian_identity_check,
    jacobian_identity_sweep,
    lower_bound_margin,
    maximize_alpha,
    pqs_from_polar,
    reduced_quadratic_check,
    t1_of,
)
from qrholder.pointwise import (
    beltrami_residual,
    constant_coeff_gradient,
    jacobian_residual,
    reduced_discriminant,
    reduced_minimizer,
)

NINE_K = [0.1 * i for i in range(1, 10)]


def t_lattice(k, n=8):
    lo, hi = 1 - k, 1 - k * k
    return [lo + (hi - lo) * j / (n + 1) for j in range(1, n + 1)]


def _pqs_direct(fz, fzbar, theta):
    e2 = np.exp(2j * theta)
    A = fzbar + e2 * fz
    B = fzbar - e2 * fz
    return B.real, B.imag, A.real


@given(
    st.floats(0.0, 0.99),
    st.floats(0.0, 2 * math.pi),
    st.floats(0.0, 2 * math.pi),
    st.floats(0.1, 10.0),
    st.sampled_from([1.0, -1.0]),
)
def test_jacobian_identity_on_independent_points(mu, arg, theta, mod, sign):
    # f_z arbitrary, f_zbar real with |f_zbar| = mu |f_z|: a gradient map at one point
    fz = mod * complex(math.cos(arg), math.sin(arg))
    fzbar = sign * mu * mod
    p, q, s = _pqs_direct(fz, fzbar, theta)
    jac = abs(fz) ** 2 - fzbar**2
    assert jac == pytest.approx(q * q - p * s, abs=1e-12 * mod * mod)
    rhs = (1 - mu * mu) / (1 + mu * mu) * (q * q + 0.5 * (p * p + s * s))
    assert jac == pytest.approx(rhs, abs=1e-12 * mod * mod)


@given(st.floats(0.0, 0.98), st.floats(0.0, 2 * math.pi), st.floats(0.1, 5.0))
def test_polar_parametrisation_round_trip(mu, sig, p):
    if abs(math.cos(sig) - mu) < 1e-3:
        return
    smp = pqs_from_polar(mu, sig, p)
    assert jacobian_identity_check(smp) < 1e-12
    assert beltrami_residual(smp) < 1e-12
    assert jacobian_residual(smp) < 1e-12
    assert abs(abs(smp.fzbar) / abs(smp.fz) - mu) < 1e-12
    assert smp.jac > 0


def test_polar_singularity():
    with pytest.raises(SingularityError):
        pqs_from_polar(0.5, math.acos(0.5))


def test_polar_rejects_mu():
    with pytest.raises(DomainError):
        pqs_from_polar(1.0, 0.3)


def test_jacobian_identity_sweep():
    rep = jacobian_identity_sweep(n_samples=50_000, seed=3)
    assert rep.samples > 49_000
    assert rep.max_identity_residual < 1e-10
    assert rep.max_beltrami_residual < 1e-12
    assert rep.max_jacobian_residual < 1e-12
    assert rep.max_quotient_error < 1e-12


def test_jacobian_identity_sweep_deterministic_across_threads(monkeypatch):
    monkeypatch.setenv("HB_THREADS", "1")
    a = jacobian_identity_sweep(n_samples=40_000, seed=11)
    monkeypatch.setenv("HB_THREADS", "4")
    b = jacobian_identity_sweep(n_samples=40_000, seed=11)
    assert a == b


@pytest.mark.parametrize("k", NINE_K)
def test_lower_bound_no_violations(k):
    for t in t_lattice(k):
        rep = lower_bound_margin(k, t)
        assert rep.violations == 0
        assert rep.boundary_infimum < 1e-4


def test_lower_bound_sharp_under_inflation():
    rep = lower_bound_margin(0.5, 0.6, t1_scale=1.01)
    assert rep.violations > 0
    assert rep.min_margin < -1e-4


def test_lower_bound_rejects():
    with pytest.raises(DomainError):
        lower_bound_margin(0.0, 0.5)
    with pytest.raises(DomainError):
        lower_bound_margin(0.5, 0.6, grid=(8, 8))


@given(st.floats(0.05, 0.95), st.floats(0.01, 0.99), st.floats(0.0, 2.0))
def test_discriminant_condition(k, u, scale):
    t = (1 - k) + u * (k - k * k)
    t1 = t1_of(k, t) * scale
    assert discriminant_condition(k, t1, t) == (scale <= 1.0)


@given(
    st.floats(0.05, 0.95),
    st.integers(2, 50),
    st.complex_numbers(max_magnitude=1.0, allow_nan=False, allow_infinity=False),
    st.complex_numbers(max_magnitude=1.0, allow_nan=False, allow_infinity=False),
)
def test_discrete_inequality_holds_at_optimal_constant(k, n, dp, dm):
    cp = maximize_alpha(k)
    C = 2 * cp.alpha_star
    m = discrete_coeff_inequality(k, cp.t_star, CoeffPairSample(n, dp, dm), C)
    assert m >= -1e-12 * max(1.0, abs(dp) ** 2 + abs(dm) ** 2)


def test_reduced_quadratic_is_tight_at_n2():
    # the reduced discriminant vanishes at n = 2: the optimal constant is attained
    for k in NINE_K:
        cp = maximize_alpha(k)
        t1, t2 = t1_of(k, cp.t_star), cp.t_star
        C = 2 * cp.alpha_star
        disc = reduced_discriminant(t1, t2, C, 2)
        assert abs(disc) < 1e-12 * (t1 + t2 + C) ** 2
        z = reduced_minimizer(2, t1, t2, C)
        assert abs(reduced_quadratic_check(z, 2, t1, t2, C)) < 1e-12
        assert reduced_discriminant(t1, t2, 1.05 * C, 2) > 0


def test_reduced_quadratic_matches_full():
    k, t, C, n, z = 0.4, 0.7, 1.1, 3, 0.3
    full = discrete_coeff_inequality(k, t, CoeffPairSample(n, 1.0, z), C)
    assert full == pytest.approx(reduced_quadratic_check(z, n, t1_of(k, t), t, C), abs=1e-14)


def test_coeff_pair_rejects_small_n():
    with pytest.raises(DomainError):
        CoeffPairSample(1, 1.0, 0.0)


@pytest.mark.parametrize("k", [0.2, 0.5, 0.8])
def test_discrete_sweep_passes(k):
    rep = discrete_sweep(k, n_samples=20_000, seed=5)
    assert rep.violations == 0
    assert rep.witness is None
    assert rep.C == pytest.approx(2 * alpha_star(k))


@pytest.mark.parametrize("k", [0.2, 0.5, 0.8])
def test_discrete_sweep_inflated_gives_n2_witness(k):
    rep = discrete_sweep(k, n_samples=20_000, seed=5, c_scale=1.05)
    assert rep.violations > 0
    assert rep.witness.n == 2
    assert discrete_coeff_inequality(k, rep.t, rep.witness, rep.C) < 0


def test_discrete_sweep_n3_slack():
    rep = discrete_sweep(0.5, n_samples=20_000, seed=5, c_scale=1.02, n_range=(3, 64))
    assert rep.violations == 0


def test_discrete_sweep_seed_changes_samples_not_verdict():
    a = discrete_sweep(0.5, n_samples=20_000, seed=42)
    b = discrete_sweep(0.5, n_samples=20_000, seed=7)
    assert a.violations == b.violations == 0


def test_constant_coefficient_beltrami_bound():
    fz, fzbar, mu = constant_coeff_gradient(3.0, 1.0, 1.0, 0.0)
    assert mu == pytest.approx(0.5, abs=1e-15)
    assert isinstance(fzbar, float)
    mx, bound = constant_coeff_sweep(3.0, 1.0, n_samples=50_000)
    assert bound == 0.5
    assert mx <= bound + 1e-15
    assert mx > bound - 1e-3
