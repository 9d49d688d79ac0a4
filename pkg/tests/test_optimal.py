import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from qrholder import (
    DomainError,
    alpha_of_t,
    alpha_star,
    certify_concavity,
    eval_Nk,
    exponent_report,
    golden_section_max,
    isolate_real_roots,
    maximize_alpha,
    phi_coefficients,
    quartic_coeffs,
    quartic_roots_in_interval,
    stationarity_residuals,
)
from qrholder.optimal import (
    P_prime,
    S_prime,
    alpha_prime,
    alpha_prime_left,
    alpha_prime_left_sign_witness,
    alpha_prime_right,
    alpha_second,
    phi_min,
    scaled_quartic_coeffs,
)

NINE_K = [0.1 * i for i in range(1, 10)]
ks = st.floats(min_value=0.01, max_value=0.99)

# mpmath maximisers, frozen
T_STAR = {
    0.1: 0.92565436345005,
    0.3: 0.756942120768704,
    0.5: 0.564757876506425,
    0.7: 0.352126993374733,
    0.9: 0.121460065667183,
}
ALPHA_STAR_HALF = 0.416974428362388
ALPHA_STAR_TENTH = 0.864515285864691


@pytest.mark.parametrize("k", sorted(T_STAR))
def test_t_star_frozen(k):
    cp = maximize_alpha(k)
    assert cp.t_star == pytest.approx(T_STAR[k], abs=1e-12)


def test_alpha_star_frozen():
    assert alpha_star(0.5) == pytest.approx(ALPHA_STAR_HALF, abs=1e-14)
    assert alpha_star(0.1) == pytest.approx(ALPHA_STAR_TENTH, abs=1e-14)


@given(ks)
def test_maximiser_matches_oracle(k):
    cp = maximize_alpha(k)
    assert cp.t_star == pytest.approx(float(oracles.t_star(k)), abs=1e-9)
    assert cp.alpha_star == pytest.approx(float(oracles.alpha_star(k)), abs=1e-14)


@given(ks, st.floats(0.0, 1.0))
def test_alpha_star_dominates_interval(k, u):
    t = (1 - k) + u * (k - k * k)
    t = min(max(t, (1 - k) + 1e-12), 1 - k * k - 1e-12)
    assert alpha_star(k) >= alpha_of_t(k, t) - 1e-15


@pytest.mark.parametrize("k", NINE_K)
def test_quartic_root_agrees_with_maximiser(k):
    cp = maximize_alpha(k)
    assert cp.agrees, cp.discrepancy
    assert cp.discrepancy is None
    assert cp.stationarity.corrected < 1e-8


def test_quartic_has_extraneous_root():
    roots = quartic_roots_in_interval(quartic_coeffs(0.5))
    assert len(roots) == 2
    assert roots[0] == pytest.approx(0.5647578765, abs=1e-10)
    assert roots[1] == pytest.approx(0.5966428861, abs=1e-10)
    # the second root is where alpha' has the wrong sign structure
    assert abs(alpha_prime(0.5, roots[1])) > 1e-3


def test_printed_stationarity_form_does_not_vanish():
    for k in NINE_K:
        res = stationarity_residuals(k, maximize_alpha(k).t_star)
        assert res.corrected < 1e-8
        assert res.printed > 1e-2


@pytest.mark.parametrize("k", [1e-4, 1e-3, 0.01, 0.5, 0.99, 0.999])
def test_scaled_quartic_consistent(k):
    q = quartic_coeffs(k)
    for v in np.linspace(k, 1, 7):
        t = 1 - k * v
        lhs = eval_Nk(q, t)
        rhs = k**4 * sum(c * v ** (4 - i) for i, c in enumerate(scaled_quartic_coeffs(k)))
        assert lhs == pytest.approx(rhs, abs=1e-12 * q.scale)


@pytest.mark.parametrize("k", [1e-4, 1e-3, 0.01, 0.999])
def test_quartic_agreement_at_extreme_k(k):
    cp = maximize_alpha(k)
    assert cp.agreement < 1e-8


def test_isolate_simple_roots():
    coeffs = np.poly([0.2, 0.5, 0.7])
    assert isolate_real_roots(coeffs, 0, 1) == pytest.approx([0.2, 0.5, 0.7], abs=1e-13)


def test_isolate_touching_root():
    coeffs = np.poly([0.5, 0.5, 0.9])
    roots = isolate_real_roots(coeffs, 0, 0.8)
    assert roots == pytest.approx([0.5], abs=1e-7)


def test_isolate_no_roots():
    assert isolate_real_roots([1.0, 0.0, 1.0], -5, 5) == []


@given(st.lists(st.floats(0.05, 0.95), min_size=1, max_size=4, unique=True))
def test_isolate_random_roots(rs):
    rs = sorted(rs)
    if min(np.diff(rs), default=1.0) < 1e-3:
        return
    found = isolate_real_roots(np.poly(rs), 0.0, 1.0)
    assert found == pytest.approx(rs, abs=1e-9)


def test_golden_section_on_parabola():
    a, b = golden_section_max(lambda x: -(x - 0.3) ** 2, 0.0, 1.0, 1e-12, slope=lambda x: -2 * (x - 0.3))
    assert 0.5 * (a + b) == pytest.approx(0.3, abs=1e-12)


@given(ks, st.floats(0.05, 0.95))
def test_alpha_prime_matches_differentiation(k, u):
    t = (1 - k) + u * (k - k * k)
    assert alpha_prime(k, t) == pytest.approx(float(oracles.dalpha(k, t)), rel=1e-8, abs=1e-10)


@given(ks, st.floats(0.05, 0.95))
def test_alpha_second_matches_oracle(k, u):
    t = (1 - k) + u * (k - k * k)
    assert alpha_second(k, t) == pytest.approx(float(oracles.second_derivative(k, t)), rel=1e-4, abs=1e-6)


@given(ks, st.floats(0.0, 1.0))
def test_S_P_derivatives_by_differentiation(k, u):
    t = (1 - k) + u * (k - k * k)
    dS = oracles.mp.diff(lambda x: oracles.t1(k, x) + x, t)
    dP = oracles.mp.diff(lambda x: oracles.t1(k, x) * x, t)
    assert S_prime(k, t) == pytest.approx(float(dS), rel=1e-10, abs=1e-12)
    assert P_prime(k, t) == pytest.approx(float(dP), rel=1e-10, abs=1e-12)


@pytest.mark.parametrize("k", [0.3, 0.5, 0.7])
def test_right_endpoint_slope(k):
    # the limit is -3/k^2; -6/k^2 is the limit of 2 alpha'
    d = alpha_prime(k, 1 - k * k - 1e-8)
    ref = float(oracles.dalpha(k, 1 - k * k - 1e-8))
    assert d == pytest.approx(ref, rel=1e-9)
    assert abs(d - alpha_prime_right(k)) / abs(alpha_prime_right(k)) < 1e-3
    assert abs(2 * d + 6 / k**2) / (6 / k**2) < 1e-3


@given(ks)
def test_left_endpoint_closed_form(k):
    assert alpha_prime_left(k) == pytest.approx(float(oracles.dalpha(k, 1 - k)), rel=1e-12)


@given(ks)
def test_left_endpoint_sign_witness(k):
    shown = alpha_prime_left_sign_witness(k)
    assert shown > 0 and alpha_prime_left(k) > 0
    assert shown < alpha_prime_left(k)


@pytest.mark.parametrize("k", NINE_K)
def test_concavity_certificate(k):
    cert = certify_concavity(k)
    assert cert.holds


@given(ks)
def test_discriminant_closed_form(k):
    pc = phi_coefficients(k)
    ref = 80 * k**4 * (1 - k * k) ** 2
    # b^2 - 4ac cancels; allow the rounding that cancellation implies
    assert pc.delta == pytest.approx(ref, rel=max(1e-10, 1e-14 * pc.b**2 / ref))


@given(ks)
def test_phi_positive_on_interval(k):
    assert phi_min(k, 1 - k, 1 - k * k) > 0


def test_certificate_rejects_tiny_grid():
    with pytest.raises(DomainError):
        certify_concavity(0.5, grid_size=4)


@pytest.mark.parametrize("k", [0.0, 1.0, -0.2])
def test_maximize_rejects(k):
    with pytest.raises(DomainError):
        maximize_alpha(k)


def test_report_conformal_convention():
    r = exponent_report(0.0)
    assert (r.alpha_classical, r.alpha1, r.alpha0, r.alpha2, r.alpha_star, r.t_star) == (1, 1, 1, 1, 1, 1)


@pytest.mark.parametrize("k", [i / 100 for i in range(1, 100)])
def test_ordering_chain(k):
    r = exponent_report(k)
    assert r.alpha_star - r.alpha0 > 1e-12
    assert r.alpha0 - r.alpha1 > 1e-12
    assert r.alpha1 - r.alpha_classical > 1e-12


def test_report_from_K():
    from qrholder import DistortionParams

    assert exponent_report(0.5).as_dict() == pytest.approx(exponent_report(DistortionParams.from_K(3.0)).as_dict())
