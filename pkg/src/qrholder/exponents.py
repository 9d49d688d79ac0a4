"""Closed-form Hölder exponents for K-quasiregular gradient mappings.

Every function here is a pure binary64 evaluation. The distortion is carried
either as the Beltrami bound ``k`` in ``[0, 1)`` or as ``K = (1 + k) / (1 - k)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .errors import DomainError, OutOfIntervalWarning, SingularityError

SQRT33_FACTOR = (math.sqrt(33.0) - 3.0) / 4.0

# Literal alpha0 and the alpha(t0) composition may disagree by at most this.
ALPHA0_CROSSCHECK_TOL = 1e-10


@dataclass(frozen=True)
class DistortionParams:
    k: float
    K: float

    @classmethod
    def from_K(cls, K: float) -> "DistortionParams":
        K = float(K)
        if not math.isfinite(K) or K < 1.0:
            raise DomainError(f"distortion K must be a finite number >= 1, got {K!r}")
        return cls(k=(K - 1.0) / (K + 1.0), K=K)


def distortion_from_k(k: float) -> DistortionParams:
    k = float(k)
    if not (0.0 <= k < 1.0):
        raise DomainError(f"Beltrami bound k must lie in [0, 1), got {k!r}")
    return DistortionParams(k=k, K=(1.0 + k) / (1.0 - k))


def _as_params(params: DistortionParams | float) -> DistortionParams:
    if isinstance(params, DistortionParams):
        return params
    return distortion_from_k(params)


@dataclass(frozen=True)
class EllipticConstants:
    lambda_: float
    Lambda: float
    g_sup: float
    K_out: float
    K_prime: float


def kk_prime_constants(lambda_: float, Lambda: float, g_sup: float = 0.0) -> EllipticConstants:
    """Constants of the (K, K')-distortion inequality for ``L phi = g``.

    ``lambda_`` and ``Lambda`` are the extreme eigenvalues of the coefficient
    matrix and ``g_sup`` is the sup norm of the right-hand side.
    """
    if not lambda_ > 0.0:
        raise DomainError(f"lambda must be positive, got {lambda_!r}")
    if Lambda < lambda_:
        raise DomainError(f"Lambda ({Lambda!r}) must be >= lambda ({lambda_!r})")
    if g_sup < 0.0:
        raise DomainError(f"g_sup is a norm and cannot be negative, got {g_sup!r}")
    return EllipticConstants(
        lambda_=float(lambda_),
        Lambda=float(Lambda),
        g_sup=float(g_sup),
        K_out=1.0 + Lambda / lambda_,
        K_prime=g_sup * g_sup / (2.0 * lambda_ * lambda_),
    )


def alpha_classical(params: DistortionParams | float) -> float:
    p = _as_params(params)
    return (1.0 - p.k) / (1.0 + p.k)


def alpha1(params: DistortionParams | float) -> float:
    """Exponent of the split at the left end of the interval, t = 1 - k."""
    k = _as_params(params).k
    return (1.0 - k) * (math.sqrt(k * k + 16.0 * k + 16.0) - k - 2.0) / (2.0 * (1.0 + k))


def t1_of(k: float, t: float) -> float:
    """Coefficient of ``p**2`` in the lower bound ``J_f >= t1 p^2 + t q^2``."""
    if t == 1.0:
        raise SingularityError("t1(k, t) has a pole at t = 1")
    kk = 1.0 - k * k
    return (kk - t) * t / (kk * (1.0 - t))


def alpha_from_split(t1: float, t2: float) -> float:
    """Exponent obtained from ``J_f >= t1 p^2 + t2 q^2``.

    Written as ``6 P / (sqrt(S^2 + 12 P) + S)``, which equals
    ``(sqrt(S^2 + 12 P) - S) / 2`` without the cancellation when ``P << S^2``.
    """
    S = t1 + t2
    P = t1 * t2
    return 6.0 * P / (math.sqrt(S * S + 12.0 * P) + S)


@dataclass(frozen=True)
class TSplit:
    k: float
    t: float
    t1: float
    t2: float
    S: float
    P: float

    @property
    def in_interval(self) -> bool:
        return 1.0 - self.k < self.t < 1.0 - self.k * self.k

    @property
    def alpha(self) -> float:
        return alpha_from_split(self.t1, self.t2)


def t_split(k: float, t: float) -> TSplit:
    a = t1_of(k, t)
    return TSplit(k=k, t=t, t1=a, t2=t, S=a + t, P=a * t)


def alpha_of_t(k: float, t: float) -> float:
    """Hölder exponent attached to the split parameter ``t``.

    Outside ``(1 - k, 1 - k^2)`` the value is still returned (with an
    :class:`OutOfIntervalWarning`) as long as ``t1 > 0``.
    """
    split = t_split(k, t)
    if not split.t1 > 0.0:
        raise DomainError(f"t1 = {split.t1!r} <= 0 at k={k!r}, t={t!r}; need 0 < t < 1 - k^2")
    if not split.in_interval:
        warnings.warn(
            f"t={t!r} is outside (1-k, 1-k^2) for k={k!r}",
            OutOfIntervalWarning,
            stacklevel=2,
        )
    value = split.alpha
    if value > 1.0:
        warnings.warn(f"alpha(t)={value!r} exceeds 1", OutOfIntervalWarning, stacklevel=2)
    return value


def t0_of(k: float) -> float:
    return (1.0 - k) * (1.0 + 0.25 * k)


def alpha0_literal(k: float) -> float:
    """The explicit alpha0 expression, transcribed term by term."""
    u = k * (4.0 + k)
    root = math.sqrt(144.0 + u * (48.0 + u))
    return (
        (1.0 - k) * (4.0 + k) * root / ((1.0 + k) * (3.0 + k))
        + k * (3.0 + k)
        - (21.0 + 3.0 * k) / ((3.0 + k) * (1.0 + k))
        - 1.0
    ) / 8.0


def alpha0(params: DistortionParams | float) -> float:
    k = _as_params(params).k
    literal = alpha0_literal(k)
    if k == 0.0:
        return literal
    composed = alpha_from_split(t1_of(k, t0_of(k)), t0_of(k))
    if abs(literal - composed) > ALPHA0_CROSSCHECK_TOL:
        warnings.warn(
            f"explicit alpha0 disagrees with alpha(t0) by {abs(literal - composed):.3e} at k={k!r}; "
            "using alpha(t0)",
            RuntimeWarning,
            stacklevel=2,
        )
        return composed
    return literal


def alpha2_split(k: float) -> tuple[float, float]:
    r = (1.0 - k * k) / (1.0 + k * k)
    return 0.5 * r, r


def alpha2(params: DistortionParams | float) -> float:
    k = _as_params(params).k
    return SQRT33_FACTOR * (1.0 - k * k) / (1.0 + k * k)


def alpha2_crossover(tol: float = 1e-10) -> float:
    """Root of ``alpha2(k) = (1 - k)/(1 + k)`` on (0, 1), by bisection to width ``tol``.

    Past this point ``alpha2`` beats the classical exponent.
    """
    a, b = 0.0, 1.0 - 1e-12

    def gap(k: float) -> float:
        return alpha2(k) - alpha_classical(k)

    ga = gap(a)
    while b - a > tol:
        m = 0.5 * (a + b)
        gm = gap(m)
        if (gm > 0.0) == (ga > 0.0):
            a, ga = m, gm
        else:
            b = m
    return 0.5 * (a + b)


@dataclass(frozen=True)
class ExponentReport:
    k: float
    K: float
    alpha_classical: float
    alpha1: float
    alpha0: float
    alpha2: float
    alpha_star: float
    t_star: float

    def as_dict(self) -> dict[str, float]:
        return {
            "k": self.k,
            "K": self.K,
            "alpha_classical": self.alpha_classical,
            "alpha1": self.alpha1,
            "alpha0": self.alpha0,
            "alpha2": self.alpha2,
            "alpha_star": self.alpha_star,
            "t_star": self.t_star,
        }
