"""The optimal split parameter t* and the certificates behind it.

``alpha(t)`` is strictly concave on ``(1 - k, 1 - k^2)``, so its maximiser is
found by golden-section search. The quartic ``N_k`` obtained by squaring
``alpha'(t) = 0`` is used only as an independent cross-check: squaring can add
roots, so the optimizer is the authority for ``t*``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .errors import DomainError, SingularityError
from .exponents import (
    DistortionParams,
    ExponentReport,
    _as_params,
    alpha0,
    alpha1,
    alpha2,
    alpha_classical,
    alpha_from_split,
    t1_of,
)

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
DEFAULT_TOL = 1e-12
AGREEMENT_TOL = 1e-8
ROOT_MERGE_TOL = 1e-10
ROOT_WIDTH_TOL = 1e-13
EPS = float(np.finfo(float).eps)


# --------------------------------------------------------------------------
# Quartic N_k
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class QuarticNk:
    k: float
    c4: float
    c3: float
    c2: float
    c1: float
    c0: float

    @property
    def coeffs(self) -> tuple[float, float, float, float, float]:
        """Coefficients from ``t^4`` down to ``t^0``."""
        return (self.c4, self.c3, self.c2, self.c1, self.c0)

    @property
    def scale(self) -> float:
        return max(abs(c) for c in self.coeffs)

    def __call__(self, t: float) -> float:
        return eval_Nk(self, t)


def quartic_coeffs(k: float) -> QuarticNk:
    k2 = k * k
    k4 = k2 * k2
    k6 = k4 * k2
    return QuarticNk(
        k=k,
        c4=16.0 - 16.0 * k2 + k4,
        c3=-(64.0 - 80.0 * k2 + 18.0 * k4),
        c2=96.0 - 160.0 * k2 + 69.0 * k4 - 5.0 * k6,
        c1=-(64.0 - 144.0 * k2 + 96.0 * k4 - 16.0 * k6),
        c0=16.0 - 48.0 * k2 + 48.0 * k4 - 16.0 * k6,
    )


def _horner(coeffs: Sequence[float], t: float) -> float:
    acc = 0.0
    for c in coeffs:
        acc = acc * t + c
    return acc


def eval_Nk(q: QuarticNk, t: float) -> float:
    return _horner(q.coeffs, t)


def _derivative(coeffs: Sequence[float]) -> list[float]:
    deg = len(coeffs) - 1
    return [c * (deg - i) for i, c in enumerate(coeffs[:-1])]


def _refine_root(coeffs: Sequence[float], a: float, b: float, fa: float) -> float:
    """Bisect ``[a, b]`` (sign change assumed) then polish with Newton."""
    while b - a > ROOT_WIDTH_TOL:
        m = 0.5 * (a + b)
        if m <= a or m >= b:
            break
        fm = _horner(coeffs, m)
        if fm == 0.0:
            return m
        if (fm > 0.0) == (fa > 0.0):
            a, fa = m, fm
        else:
            b = m
    x = 0.5 * (a + b)
    fx = _horner(coeffs, x)
    dcoeffs = _derivative(coeffs)
    for _ in range(50):
        d = _horner(dcoeffs, x)
        if d == 0.0:
            break
        x_new = x - fx / d
        if not (a <= x_new <= b):
            break
        f_new = _horner(coeffs, x_new)
        if abs(f_new) >= abs(fx):
            break
        x, fx = x_new, f_new
    return x


def isolate_real_roots(
    coeffs: Sequence[float], lo: float, hi: float, n_scan: int = 2048
) -> list[float]:
    """Real roots of a polynomial strictly inside ``(lo, hi)``.

    Stationary points (found recursively from the derivative) are merged into
    a uniform scan, so the polynomial is monotone between breakpoints and every
    simple root shows up as a sign change. Breakpoints where the polynomial is
    zero to within rounding are reported as touching (even-multiplicity) roots.
    """
    coeffs = [float(c) for c in coeffs]
    while len(coeffs) > 1 and coeffs[0] == 0.0:
        coeffs = coeffs[1:]
    if len(coeffs) <= 1 or not lo < hi:
        return []
    crit = isolate_real_roots(_derivative(coeffs), lo, hi, n_scan) if len(coeffs) > 2 else []
    crit_set = set(crit)
    pts = np.union1d(np.linspace(lo, hi, n_scan + 1), np.asarray(crit, dtype=float))
    vals = [_horner(coeffs, float(x)) for x in pts]
    abs_coeffs = [abs(c) for c in coeffs]
    roots: list[float] = []
    for i in range(len(pts) - 1):
        a, b = float(pts[i]), float(pts[i + 1])
        fa, fb = vals[i], vals[i + 1]
        # an exact zero, or a stationary point whose value is below the Horner rounding bound
        if fa == 0.0 or (a in crit_set and abs(fa) <= 4.0 * len(coeffs) * EPS * _horner(abs_coeffs, abs(a))):
            roots.append(a)
        elif fa != 0.0 and fb != 0.0 and (fa > 0.0) != (fb > 0.0):
            roots.append(_refine_root(coeffs, a, b, fa))
    roots = sorted(r for r in roots if lo < r < hi)
    merged: list[float] = []
    for r in roots:
        if merged and r - merged[-1] < ROOT_MERGE_TOL:
            continue
        merged.append(r)
    return merged


def scaled_quartic_coeffs(k: float) -> tuple[float, float, float, float, float]:
    """Coefficients of ``N_k(1 - k v) / k^4`` in powers of ``v``, highest first.

    Derived symbolically. Near ``k = 0`` the ``t``-form is ``16 (t - 1)^4`` up to
    ``O(k^2)``, so its interval roots drown in rounding; in ``v`` the polynomial
    tends to ``4 (2 v^2 - 1)^2`` and the roots stay resolvable.
    """
    k2 = k * k
    return (
        16.0 - 16.0 * k2 + k2 * k2,
        2.0 * k * (7.0 * k2 - 8.0),
        (1.0 - k2) * (5.0 * k2 - 16.0),
        2.0 * k * (4.0 - 3.0 * k2),
        4.0 - 5.0 * k2,
    )


def quartic_roots_in_interval(q: QuarticNk) -> list[float]:
    """Roots of ``N_k`` in ``(1 - k, 1 - k^2)``, ascending.

    Isolation runs on the scaled form (``t = 1 - k v``, ``v`` in ``(k, 1)``).
    """
    k = q.k
    if not 0.0 < k < 1.0:
        return []
    vs = isolate_real_roots(scaled_quartic_coeffs(k), k, 1.0)
    lo, hi = 1.0 - k, 1.0 - k * k
    return sorted(t for t in (1.0 - k * v for v in vs) if lo < t < hi)


# --------------------------------------------------------------------------
# Derivatives of alpha(t)
# --------------------------------------------------------------------------


def S_of(k: float, t: float) -> float:
    return t1_of(k, t) + t


def P_of(k: float, t: float) -> float:
    return t1_of(k, t) * t


def S_prime(k: float, t: float) -> float:
    u = (1.0 - t) ** 2
    return (2.0 * u - k * k * (1.0 + u)) / ((1.0 - k * k) * u)


def P_prime(k: float, t: float) -> float:
    u = (1.0 - t) ** 2
    return (2.0 * u - k * k * (2.0 - t)) * t / ((1.0 - k * k) * u)


def alpha_prime(k: float, t: float) -> float:
    if t == 1.0:
        raise SingularityError("alpha'(t) has a pole at t = 1")
    S, P = S_of(k, t), P_of(k, t)
    dS, dP = S_prime(k, t), P_prime(k, t)
    return 0.5 * ((S * dS + 6.0 * dP) / math.sqrt(S * S + 12.0 * P) - dS)


def alpha_prime_left(k: float) -> float:
    """alpha'(1 - k) in closed form: ``((8 + k)/r - 1) / 2`` with ``r = sqrt(16 + 16k + k^2)``."""
    r = math.sqrt(16.0 + 16.0 * k + k * k)
    return 0.5 * ((8.0 + k) / r - 1.0)


def alpha_prime_left_sign_witness(k: float) -> float:
    """A positive expression that stays below alpha'(1 - k) on (0, 1).

    Its positivity is enough for the sign of alpha' at the left end; the
    value itself is not alpha'(1 - k).
    """
    r = math.sqrt(16.0 + 16.0 * k + k * k)
    return (8.0 - k * k - 7.0 * k - 2.0 * (1.0 - k) / (1.0 + k) * r) / (2.0 * (1.0 - k) * r)


def alpha_prime_right(k: float) -> float:
    """Limit of alpha'(t) as ``t -> 1 - k^2``, namely ``-3/k^2``.

    There ``t1 = 0``, so ``2 alpha' = 6 P'/S = 6 t1'(1 - k^2) = -6/k^2``.
    """
    return -3.0 / (k * k)


def alpha_second(k: float, t: float, h: float | None = None) -> float:
    """alpha''(t) by central differences of the closed-form alpha'."""
    if h is None:
        h = 1e-5 * (k - k * k) if 0.0 < k < 1.0 else 1e-6
    return (alpha_prime(k, t + h) - alpha_prime(k, t - h)) / (2.0 * h)


class StationarityResiduals(NamedTuple):
    corrected: float
    printed: float


def stationarity_residuals(k: float, t: float) -> StationarityResiduals:
    """Normalised residuals of the squared condition ``alpha'(t) = 0``.

    ``corrected`` is ``S S' P' + 3 P'^2 - P S'^2``; ``printed`` replaces
    ``P'^2`` by ``P'``. Each is divided by the sum of its terms' magnitudes.
    """
    S, P = S_of(k, t), P_of(k, t)
    dS, dP = S_prime(k, t), P_prime(k, t)
    a, c = S * dS * dP, P * dS * dS
    b2, b1 = 3.0 * dP * dP, 3.0 * dP
    corrected = abs(a + b2 - c) / (abs(a) + abs(b2) + abs(c))
    printed = abs(a + b1 - c) / (abs(a) + abs(b1) + abs(c))
    return StationarityResiduals(corrected, printed)


# --------------------------------------------------------------------------
# Maximisation
# --------------------------------------------------------------------------


def golden_section_max(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: float = DEFAULT_TOL,
    slope: Callable[[float], float] | None = None,
) -> tuple[float, float]:
    """Maximise a unimodal ``f`` on ``[a, b]``; returns the final bracket.

    Once the two interior values agree to a few ulps the comparison carries no
    information. If ``slope`` is given (a derivative that is decreasing, as for
    a concave ``f``) the bracket is then closed by bisection on its sign;
    otherwise the search stops at the noise floor.
    """
    a, b = min(a, b), max(a, b)
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if abs(fc - fd) <= 8.0 * math.ulp(max(abs(fc), abs(fd))):
            break
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    if slope is not None:
        while b - a > tol:
            m = 0.5 * (a + b)
            if m <= a or m >= b:
                break
            if slope(m) > 0.0:
                a = m
            else:
                b = m
    return a, b


@dataclass(frozen=True)
class CriticalPoint:
    k: float
    t_star: float
    alpha_star: float
    quartic_residual: float
    derivative_residual: float
    agreement: float
    roots: tuple[float, ...] = ()
    stationarity: StationarityResiduals = StationarityResiduals(math.nan, math.nan)
    bracket_width: float = math.nan
    discrepancy: dict | None = field(default=None)

    @property
    def agrees(self) -> bool:
        return math.isfinite(self.agreement) and self.agreement <= AGREEMENT_TOL


def maximize_alpha(k: float, tol: float = DEFAULT_TOL) -> CriticalPoint:
    if not 0.0 < k < 1.0:
        raise DomainError(
            f"maximize_alpha needs 0 < k < 1 (got {k!r}); use exponent_report for k = 0"
        )
    if not tol > 0.0:
        raise DomainError(f"tol must be positive, got {tol!r}")
    lo, hi = 1.0 - k, 1.0 - k * k
    eps = 1e-12 * (hi - lo)

    def alpha(t: float) -> float:
        return alpha_from_split(t1_of(k, t), t)

    a, b = golden_section_max(alpha, lo + eps, hi - eps, tol, slope=lambda t: alpha_prime(k, t))
    t_star = 0.5 * (a + b)

    q = quartic_coeffs(k)
    roots = quartic_roots_in_interval(q)
    agreement = min((abs(r - t_star) for r in roots), default=math.nan)
    stat = stationarity_residuals(k, t_star)
    cp_kwargs = dict(
        k=k,
        t_star=t_star,
        alpha_star=alpha(t_star),
        quartic_residual=abs(eval_Nk(q, t_star)) / q.scale,
        derivative_residual=abs(alpha_prime(k, t_star)),
        agreement=agreement,
        roots=tuple(roots),
        stationarity=stat,
        bracket_width=b - a,
    )
    if not (math.isfinite(agreement) and agreement <= AGREEMENT_TOL):
        cp_kwargs["discrepancy"] = {
            "reason": "no interval root of N_k" if not roots else "nearest N_k root too far",
            "agreement": agreement,
            "abs_Nk_at_t_star": abs(eval_Nk(q, t_star)),
            "normalized_Nk_at_t_star": cp_kwargs["quartic_residual"],
            "stationarity_corrected": stat.corrected,
            "stationarity_printed": stat.printed,
            "roots": list(roots),
        }
    return CriticalPoint(**cp_kwargs)


# --------------------------------------------------------------------------
# Concavity certificate
# --------------------------------------------------------------------------


class PhiCoefficients(NamedTuple):
    a: float
    b: float
    c: float
    delta: float
    x1: float
    x2: float


def phi_coefficients(k: float) -> PhiCoefficients:
    """Quadratic ``a t^2 - b t + c`` whose positivity gives ``alpha'' < 0``."""
    k2 = k * k
    a = 16.0 - 20.0 * k2 + 5.0 * k2 * k2
    b = 32.0 - 52.0 * k2 + 20.0 * k2 * k2
    c = 16.0 * (1.0 - k2) ** 2
    delta = b * b - 4.0 * a * c
    root = math.sqrt(max(delta, 0.0))
    return PhiCoefficients(a, b, c, delta, (b - root) / (2.0 * a), (b + root) / (2.0 * a))


def phi_min(k: float, lo: float, hi: float) -> float:
    a, b, c, *_ = phi_coefficients(k)
    cands = [lo, hi]
    vertex = b / (2.0 * a)
    if lo < vertex < hi:
        cands.append(vertex)
    return min(a * t * t - b * t + c for t in cands)


@dataclass(frozen=True)
class ConcavityCertificate:
    k: float
    dalpha_left: float
    dalpha_right: float
    phi_min_on_interval: float
    grid_second_deriv_max: float

    @property
    def holds(self) -> bool:
        return (
            self.dalpha_left > 0.0
            and self.dalpha_right < 0.0
            and self.phi_min_on_interval > 0.0
            and self.grid_second_deriv_max < 0.0
        )


def certify_concavity(k: float, grid_size: int = 1000) -> ConcavityCertificate:
    if not 0.0 < k < 1.0:
        raise DomainError(f"certify_concavity needs 0 < k < 1, got {k!r}")
    if grid_size < 16:
        raise DomainError(f"grid_size must be >= 16, got {grid_size!r}")
    lo, hi = 1.0 - k, 1.0 - k * k
    w = hi - lo
    off = 1e-9 * w
    ts = lo + w * np.arange(1, grid_size + 1) / (grid_size + 1)
    second = max(alpha_second(k, float(t)) for t in ts)
    return ConcavityCertificate(
        k=k,
        dalpha_left=alpha_prime(k, lo + off),
        dalpha_right=alpha_prime(k, hi - off),
        phi_min_on_interval=phi_min(k, lo, hi),
        grid_second_deriv_max=second,
    )


# --------------------------------------------------------------------------
# Full report
# --------------------------------------------------------------------------


def exponent_report(params: DistortionParams | float, tol: float = DEFAULT_TOL) -> ExponentReport:
    p = _as_params(params)
    if p.k == 0.0:
        # conformal case: every exponent is reported as 1 (alpha2's formula would give 0.686)
        return ExponentReport(p.k, p.K, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0)
    cp = maximize_alpha(p.k, tol)
    return ExponentReport(
        k=p.k,
        K=p.K,
        alpha_classical=alpha_classical(p),
        alpha1=alpha1(p),
        alpha0=alpha0(p),
        alpha2=alpha2(p),
        alpha_star=cp.alpha_star,
        t_star=cp.t_star,
    )


def alpha_star(k: float, tol: float = DEFAULT_TOL) -> float:
    """``alpha(t*)``, with the conformal convention ``alpha* = 1`` at ``k = 0``."""
    if k == 0.0:
        return 1.0
    return maximize_alpha(k, tol).alpha_star
