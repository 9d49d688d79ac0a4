"""Pointwise identities and inequalities behind the exponent estimates.

At a point ``z = r e^{i theta}`` a gradient mapping is described by three real
numbers ``p, q, s`` with ``f_zbar + e^{2i theta} f_z = s - i q`` and
``f_zbar - e^{2i theta} f_z = p + i q``. With the Beltrami coefficient written
as ``|mu| e^{i xi}`` and ``varsigma = xi - 2 theta``, ``s`` and ``q`` are fixed
multiples of ``p``; everything below is parameterised by ``(|mu|, varsigma)``.
``theta`` is taken as 0, which only rotates ``f_z``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DegenerateError, DomainError, SingularityError
from .exponents import alpha_of_t, t1_of
from .optimal import golden_section_max, maximize_alpha
from .sampling import DEFAULT_SEED, map_chunks, unit_disk

SINGULAR_TOL = 1e-12
BAND_HALF_WIDTH = 1e-6
VIOLATION_TOL = 1e-12


# --------------------------------------------------------------------------
# p, q, s samples
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class PQSSample:
    mu_abs: float
    varsigma: float
    p: float
    q: float
    s: float
    fz: complex
    fzbar: complex
    jac: float


def _pqs(mu, sig, p):
    c = np.cos(sig)
    d = mu - c
    s = p * (mu + c) / d
    q = -p * np.sin(sig) / d
    fzbar = 0.5 * (s + p)
    fz = 0.5 * (s - p) - 1j * q
    jac = q * q - p * s
    return s, q, fz, fzbar, jac


def pqs_from_polar(mu_abs: float, varsigma: float, p: float = 1.0) -> PQSSample:
    if not 0.0 <= mu_abs < 1.0:
        raise DomainError(f"|mu| must lie in [0, 1), got {mu_abs!r}")
    if abs(math.cos(varsigma) - mu_abs) <= SINGULAR_TOL:
        raise SingularityError(
            f"cos(varsigma) = |mu| at varsigma={varsigma!r}: f_z vanishes while f_zbar does not"
        )
    s, q, fz, fzbar, jac = _pqs(mu_abs, varsigma, p)
    return PQSSample(
        mu_abs=float(mu_abs),
        varsigma=float(varsigma),
        p=float(p),
        q=float(q),
        s=float(s),
        fz=complex(fz),
        fzbar=complex(fzbar),
        jac=float(jac),
    )


def _identity_residual(mu, p, q, s, jac):
    rhs = (1.0 - mu * mu) / (1.0 + mu * mu) * (q * q + 0.5 * (p * p + s * s))
    return np.abs(jac - rhs) / np.maximum(1.0, np.abs(jac))


def jacobian_identity_check(sample: PQSSample) -> float:
    """Normalised residual of ``J_f = (1-|mu|^2)/(1+|mu|^2) (q^2 + (p^2+s^2)/2)``."""
    return float(_identity_residual(sample.mu_abs, sample.p, sample.q, sample.s, sample.jac))


def beltrami_residual(sample: PQSSample) -> float:
    """Relative residual of ``(s+p)^2 = |mu|^2 ((s-p)^2 + 4 q^2)``."""
    lhs = (sample.s + sample.p) ** 2
    rhs = sample.mu_abs**2 * ((sample.s - sample.p) ** 2 + 4.0 * sample.q**2)
    return abs(lhs - rhs) / max(1.0, abs(lhs), abs(rhs))


def jacobian_residual(sample: PQSSample) -> float:
    """``q^2 - p s`` against ``|f_z|^2 - |f_zbar|^2``, relative."""
    direct = abs(sample.fz) ** 2 - abs(sample.fzbar) ** 2
    return abs(sample.jac - direct) / max(1.0, abs(sample.fz) ** 2)


class JacobianIdentitySweep(NamedTuple):
    samples: int
    max_identity_residual: float
    max_beltrami_residual: float
    max_jacobian_residual: float
    max_quotient_error: float


def jacobian_identity_sweep(n_samples: int = 100_000, mu_max: float = 0.99, seed: int = DEFAULT_SEED) -> JacobianIdentitySweep:
    """Monte Carlo over ``|mu|`` uniform on ``[0, mu_max]`` and ``varsigma`` on ``[0, 2 pi)``."""

    def chunk(rng, size):
        mu = mu_max * rng.random(size)
        sig = 2.0 * np.pi * rng.random(size)
        keep = np.abs(np.cos(sig) - mu) > 1e-6
        mu, sig = mu[keep], sig[keep]
        p = np.ones_like(mu)
        s, q, fz, fzbar, jac = _pqs(mu, sig, p)
        ident = _identity_residual(mu, p, q, s, jac)
        lhs = (s + p) ** 2
        rhs = mu * mu * ((s - p) ** 2 + 4.0 * q * q)
        belt = np.abs(lhs - rhs) / np.maximum(1.0, np.maximum(np.abs(lhs), np.abs(rhs)))
        direct = np.abs(fz) ** 2 - np.abs(fzbar) ** 2
        jres = np.abs(jac - direct) / np.maximum(1.0, np.abs(fz) ** 2)
        quot = np.abs(np.abs(fzbar) / np.abs(fz) - mu)
        return (len(mu), ident.max(), belt.max(), jres.max(), quot.max())

    parts = map_chunks(chunk, n_samples, seed)
    return JacobianIdentitySweep(
        samples=sum(x[0] for x in parts),
        max_identity_residual=float(max(x[1] for x in parts)),
        max_beltrami_residual=float(max(x[2] for x in parts)),
        max_jacobian_residual=float(max(x[3] for x in parts)),
        max_quotient_error=float(max(x[4] for x in parts)),
    )


# --------------------------------------------------------------------------
# Lower bound J_f >= t1 p^2 + t2 q^2
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class MarginReport:
    min_margin: float
    argmin: tuple[float, float]
    samples: int
    violations: int
    boundary_infimum: float
    k: float = math.nan
    t: float = math.nan
    t1: float = math.nan


def _margin(mu, sig, t1, t2):
    """``(J_f - t1 p^2 - t2 q^2) / p^2`` and the scale ``J_f / p^2``."""
    c = np.cos(sig)
    d2 = (mu - c) ** 2
    jac = (1.0 - mu * mu) / d2
    return jac - t1 - t2 * np.sin(sig) ** 2 / d2, jac


def _in_band(mu, sig):
    sing = np.arccos(np.clip(mu, -1.0, 1.0))
    dist = np.minimum(
        np.abs(np.angle(np.exp(1j * (sig - sing)))), np.abs(np.angle(np.exp(1j * (sig + sing))))
    )
    return dist < BAND_HALF_WIDTH


def lower_bound_margin(
    k: float, t: float, grid: tuple[int, int] = (128, 256), t1_scale: float = 1.0
) -> MarginReport:
    """Sweep the margin of ``J_f >= t1 p^2 + t q^2`` over ``|mu| <= k``.

    ``t1_scale`` multiplies the admissible ``t1``; values above 1 break the
    discriminant condition and are used as a sharpness probe.
    """
    if not 0.0 < k < 1.0:
        raise DomainError(f"k must lie in (0, 1), got {k!r}")
    n_mu, n_sig = grid
    if n_mu < 32 or n_sig < 32:
        raise DomainError(f"grid dimensions must be >= 32, got {grid!r}")
    t1 = t1_of(k, t) * t1_scale
    if not t1 > 0.0:
        raise DomainError(f"t1 = {t1!r} <= 0 at k={k!r}, t={t!r}")
    mu = np.linspace(0.0, k, n_mu)[:, None]
    sig = np.linspace(0.0, 2.0 * np.pi, n_sig, endpoint=False)[None, :]
    mu, sig = np.broadcast_arrays(mu, sig)
    band = _in_band(mu, sig)
    with np.errstate(divide="ignore", invalid="ignore"):
        margin, jac = _margin(mu, sig, t1, t)
    margin = np.where(band, np.inf, margin)
    scale = np.maximum(1.0, np.abs(jac))
    violations = int(np.count_nonzero(margin < -VIOLATION_TOL * scale))
    i = np.unravel_index(int(np.argmin(margin)), margin.shape)

    # refine the minimum along |mu| = k around the best grid node
    row = margin[-1]
    j = int(np.argmin(row))
    h = 2.0 * np.pi / n_sig

    def neg(x: float) -> float:
        if _in_band(np.array(k), np.array(x)):
            return -math.inf
        return -float(_margin(k, x, t1, t)[0])

    a, b = golden_section_max(neg, sig[-1, j] - h, sig[-1, j] + h, tol=1e-12)
    refined = -neg(0.5 * (a + b))
    return MarginReport(
        min_margin=float(margin[i]),
        argmin=(float(mu[i]), float(sig[i])),
        samples=int(np.count_nonzero(~band)),
        violations=violations,
        boundary_infimum=min(float(row[j]), refined),
        k=k,
        t=t,
        t1=t1,
    )


def discriminant_condition(k: float, t1: float, t2: float) -> bool:
    """True iff ``t1`` is admissible for ``t2``, i.e. ``t1 <= t1_of(k, t2)``."""
    return t1 <= t1_of(k, t2)


# --------------------------------------------------------------------------
# Discrete Fourier-coefficient inequality
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class CoeffPairSample:
    n: int
    d_plus: complex
    d_minus: complex

    def __post_init__(self):
        if self.n < 2:
            raise DomainError(f"n must be >= 2, got {self.n!r}")


def _discrete(t1, t2, C, n, dp, dm):
    w = np.conj(dm)
    lhs = t1 * np.abs(dp + w) ** 2 + t2 * np.abs(dp - w) ** 2
    rhs = C * (np.abs(dp) ** 2 / (n - 1) - np.abs(dm) ** 2 / (n + 1))
    return lhs - rhs, np.maximum(1.0, lhs)


def discrete_coeff_inequality(k: float, t: float, sample: CoeffPairSample, C: float) -> float:
    """LHS - RHS of the coefficient inequality for one pair ``(d_{n-1}, d_{-n-1})``.

    Nonnegative whenever ``C <= 2 alpha(t)``.
    """
    margin, _ = _discrete(t1_of(k, t), t, C, sample.n, sample.d_plus, sample.d_minus)
    return float(margin)


def reduced_quadratic_check(zeta: float, n: int, t1: float, t2: float, C: float) -> float:
    """The inequality with ``d_{n-1} = 1`` and a real ``zeta = conj(d_{-n-1})``."""
    if n < 2:
        raise DomainError(f"n must be >= 2, got {n!r}")
    return (t1 + t2 + C / (n + 1)) * zeta * zeta + 2.0 * (t1 - t2) * zeta + (t1 + t2 - C / (n - 1))


def reduced_discriminant(t1: float, t2: float, C: float, n: int = 2) -> float:
    return 4.0 * (t1 - t2) ** 2 - 4.0 * (t1 + t2 + C / (n + 1)) * (t1 + t2 - C / (n - 1))


def reduced_minimizer(n: int, t1: float, t2: float, C: float) -> float:
    """Real ``zeta`` minimising the reduced quadratic."""
    return (t2 - t1) / (t1 + t2 + C / (n + 1))


@dataclass(frozen=True)
class DiscreteSweepReport:
    k: float
    t: float
    C: float
    samples: int
    violations: int
    min_scaled_margin: float
    witness: CoeffPairSample | None
    witness_margin: float


def discrete_sweep(
    k: float,
    n_samples: int = 100_000,
    seed: int = DEFAULT_SEED,
    c_scale: float = 1.0,
    n_range: tuple[int, int] = (2, 64),
    t: float | None = None,
) -> DiscreteSweepReport:
    """Monte Carlo plus corner probes of the coefficient inequality.

    ``t`` defaults to ``t*`` and ``C`` to ``2 alpha(t*) * c_scale``. Pairs are
    uniform on the unit bidisk with ``n`` uniform on ``n_range`` (inclusive);
    the probes add, for every ``n``, the real minimiser of the reduced
    quadratic and a few unit-modulus corners.
    """
    n_lo, n_hi = n_range
    if n_lo < 2 or n_hi < n_lo:
        raise DomainError(f"bad n range {n_range!r}")
    if t is None:
        cp = maximize_alpha(k)
        t, alpha = cp.t_star, cp.alpha_star
    else:
        alpha = alpha_of_t(k, t)
    t1, t2 = t1_of(k, t), t
    C = 2.0 * alpha * c_scale

    def evaluate(n, dp, dm):
        margin, scale = _discrete(t1, t2, C, n, dp, dm)
        scaled = margin / scale
        j = int(np.argmin(scaled))
        bad = int(np.count_nonzero(margin < -VIOLATION_TOL * scale))
        return len(n), bad, float(scaled[j]), (int(n[j]), complex(dp[j]), complex(dm[j]))

    def chunk(rng, size):
        n = rng.integers(n_lo, n_hi + 1, size)
        return evaluate(n, unit_disk(rng, size), unit_disk(rng, size))

    parts = map_chunks(chunk, n_samples, seed)

    ns = np.arange(n_lo, n_hi + 1)
    corners_dm = [0.0, 1.0, -1.0, 1j, -1j]
    probe_n = np.concatenate([ns] * (len(corners_dm) + 1))
    probe_dm = np.concatenate(
        [np.array([reduced_minimizer(int(m), t1, t2, C) for m in ns], dtype=complex)]
        + [np.full(len(ns), c, dtype=complex) for c in corners_dm]
    )
    parts.append(evaluate(probe_n, np.ones(len(probe_n), dtype=complex), probe_dm))

    best = min(parts, key=lambda x: x[2])
    violations = sum(x[1] for x in parts)
    witness = None
    if violations:
        n_w, dp_w, dm_w = best[3]
        witness = CoeffPairSample(n_w, dp_w, dm_w)
    return DiscreteSweepReport(
        k=k,
        t=t,
        C=C,
        samples=sum(x[0] for x in parts),
        violations=violations,
        min_scaled_margin=best[2],
        witness=witness,
        witness_margin=best[2] if witness else math.nan,
    )


# --------------------------------------------------------------------------
# Constant coefficients
# --------------------------------------------------------------------------


def constant_coeff_gradient(Lambda: float, lambda_: float, a: float, b: float) -> tuple[complex, float, float]:
    """``(f_z, f_zbar, |mu|)`` of ``f = phi_z`` when ``Lambda phi_xx + lambda phi_yy = 0``.

    ``a = phi_xx`` and ``b = phi_xy`` are free; ``phi_yy = -(Lambda/lambda) a``.
    """
    if not (Lambda >= lambda_ > 0.0):
        raise DomainError(f"need Lambda >= lambda > 0, got Lambda={Lambda!r}, lambda={lambda_!r}")
    if a == 0.0 and b == 0.0:
        raise DegenerateError("a = b = 0 gives f_z = 0")
    m = Lambda / lambda_
    fz = complex((1.0 + m) * a, -2.0 * b) / 4.0
    fzbar = (1.0 - m) * a / 4.0
    return fz, fzbar, abs(fzbar) / abs(fz)


def constant_coeff_sweep(
    Lambda: float, lambda_: float, n_samples: int = 100_000, seed: int = DEFAULT_SEED
) -> tuple[float, float]:
    """Largest ``|mu|`` over random Hessians, together with ``(Lambda-lambda)/(Lambda+lambda)``."""
    m = Lambda / lambda_
    bound = (Lambda - lambda_) / (Lambda + lambda_)

    def chunk(rng, size):
        a = rng.standard_normal(size)
        b = rng.standard_normal(size)
        fz = np.abs((1.0 + m) * a - 2j * b) / 4.0
        return float(np.max(np.abs((1.0 - m) * a / 4.0) / fz))

    return max(map_chunks(chunk, n_samples, seed)), bound
