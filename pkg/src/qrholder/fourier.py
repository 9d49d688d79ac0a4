"""Fields on polar grids, circle-wise Fourier profiles and Morrey ratios.

Fields are produced by closed-form generators, so ``f_z`` and ``f_zbar`` are
exact at every node and discretisation error lives only in the quadratures.
Fourier coefficients follow ``c_n(r) = (1/2pi) int f(r e^{i theta}) e^{-i n theta}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np
from scipy.integrate import simpson

from .errors import AliasingError, DegenerateError, DomainError
from .exponents import alpha_classical, distortion_from_k
from .optimal import alpha_star

LADDER_RATIO = 2.0 ** (-1.0 / 8.0)
LADDER_RUNGS = 33
DEFAULT_N_THETA = 256
CORE_FRACTION = 1e-3
FINE_RUNGS = 1025
FINE_R_MIN = 1e-2
GRADIENT_TOL = 1e-12


# --------------------------------------------------------------------------
# Grids and samples
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class PolarGrid:
    radii: np.ndarray
    n_theta: int

    def __post_init__(self):
        radii = np.asarray(self.radii, dtype=float)
        if radii.ndim != 1 or len(radii) == 0:
            raise DomainError("radii must be a non-empty 1-D sequence")
        if not (radii[0] > 0.0 and np.all(np.diff(radii) > 0.0)):
            raise DomainError("radii must be positive and strictly increasing")
        n = int(self.n_theta)
        if n < 64 or n & (n - 1):
            raise DomainError(f"n_theta must be a power of two >= 64, got {self.n_theta!r}")
        object.__setattr__(self, "radii", radii)
        object.__setattr__(self, "n_theta", n)

    @classmethod
    def ladder(
        cls,
        n_radii: int = LADDER_RUNGS,
        ratio: float = LADDER_RATIO,
        r_max: float = 1.0,
        n_theta: int = DEFAULT_N_THETA,
    ) -> "PolarGrid":
        """Geometric radii ``r_max * ratio**j``, ``j = 0 .. n_radii - 1``."""
        return cls(r_max * ratio ** np.arange(n_radii - 1, -1, -1, dtype=float), n_theta)

    @classmethod
    def log_uniform(
        cls, n_radii: int, r_min: float, r_max: float = 1.0, n_theta: int = DEFAULT_N_THETA
    ) -> "PolarGrid":
        return cls(np.geomspace(r_min, r_max, n_radii), n_theta)

    @classmethod
    def fine(cls, n_theta: int = DEFAULT_N_THETA) -> "PolarGrid":
        """Dense log-uniform grid on which radial Simpson resolves steep power laws to ~1e-9."""
        return cls.log_uniform(FINE_RUNGS, FINE_R_MIN, 1.0, n_theta)

    def refined(self) -> "PolarGrid":
        """Twice the angular samples and a geometric midpoint between radii."""
        mids = np.sqrt(self.radii[:-1] * self.radii[1:])
        return PolarGrid(np.sort(np.concatenate([self.radii, mids])), 2 * self.n_theta)

    @property
    def theta(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.n_theta) / self.n_theta

    @property
    def r_max(self) -> float:
        return float(self.radii[-1])

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.radii, self.theta, indexing="ij")

    def index_of(self, r: float) -> int:
        i = int(np.argmin(np.abs(self.radii - r)))
        if not math.isclose(self.radii[i], r, rel_tol=1e-12, abs_tol=0.0):
            raise DomainError(f"r={r!r} is not a grid radius")
        return i


@dataclass(frozen=True)
class FieldSample:
    """Values of ``f``, ``f_z`` and ``f_zbar`` on a grid, shape ``(n_radii, n_theta)``."""

    grid: PolarGrid
    f: np.ndarray
    fz: np.ndarray
    fzbar: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def jac(self) -> np.ndarray:
        return np.abs(self.fz) ** 2 - np.abs(self.fzbar) ** 2

    @property
    def f_r(self) -> np.ndarray:
        """Radial derivative, ``e^{i theta} f_z + e^{-i theta} f_zbar``."""
        e = np.exp(1j * self.grid.theta)[None, :]
        return e * self.fz + np.conj(e) * self.fzbar

    @property
    def name(self) -> str:
        return str(self.meta.get("name", "field"))

    def is_gradient(self, tol: float = GRADIENT_TOL) -> bool:
        scale = max(1.0, float(np.max(np.abs(self.fzbar))))
        return float(np.max(np.abs(self.fzbar.imag))) <= tol * scale

    def beltrami_abs(self) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.abs(self.fzbar) / np.abs(self.fz)

    def __add__(self, other: "FieldSample") -> "FieldSample":
        if other.grid is not self.grid and not (
            np.array_equal(other.grid.radii, self.grid.radii) and other.grid.n_theta == self.grid.n_theta
        ):
            raise DomainError("cannot add fields sampled on different grids")
        return FieldSample(
            self.grid,
            self.f + other.f,
            self.fz + other.fz,
            self.fzbar + other.fzbar,
            {"name": f"{self.name}+{other.name}", "terms": [self.meta, other.meta]},
        )


def superpose(fields: Iterable[FieldSample], name: str | None = None) -> FieldSample:
    fields = list(fields)
    out = fields[0]
    for fld in fields[1:]:
        out = out + fld
    if name is not None:
        out = FieldSample(out.grid, out.f, out.fz, out.fzbar, {**out.meta, "name": name})
    return out


def scale_field(fld: FieldSample, factor: complex) -> FieldSample:
    return FieldSample(
        fld.grid, factor * fld.f, factor * fld.fz, factor * fld.fzbar, {**fld.meta, "scale": factor}
    )


# --------------------------------------------------------------------------
# Generators
# --------------------------------------------------------------------------


def gen_radial_power_field(
    beta: float, coeffs: Sequence[tuple[int, complex]], grid: PolarGrid, name: str | None = None
) -> FieldSample:
    """``f(r e^{i theta}) = r^beta sum a_n e^{i n theta}`` with exact derivatives.

    Per mode, ``f_z = (beta + n)/2 r^(beta-1) e^{i(n-1) theta}`` and
    ``f_zbar = (beta - n)/2 r^(beta-1) e^{i(n+1) theta}``.
    """
    if not beta > 0.0:
        raise DomainError(f"beta must be positive, got {beta!r}")
    r, th = grid.mesh()
    rb = r**beta
    rb1 = r ** (beta - 1.0)
    f = np.zeros(r.shape, dtype=complex)
    fz = np.zeros_like(f)
    fzbar = np.zeros_like(f)
    for n, a in coeffs:
        a = complex(a)
        f += a * rb * np.exp(1j * n * th)
        fz += a * 0.5 * (beta + n) * rb1 * np.exp(1j * (n - 1) * th)
        fzbar += a * 0.5 * (beta - n) * rb1 * np.exp(1j * (n + 1) * th)
    meta = {
        "name": name or "radial_power",
        "generator": "radial_power",
        "beta": float(beta),
        "coeffs": [[int(n), [complex(a).real, complex(a).imag]] for n, a in coeffs],
    }
    return FieldSample(grid, f, fz, fzbar, meta)


def gradient_partner(beta: float, n: int, a_n: complex) -> tuple[int, complex]:
    """The mode that makes ``f_zbar`` real when paired with ``(n, a_n)``.

    Returns ``(-n - 2, conj(a_n) (beta - n) / (beta + n + 2))``.
    """
    if beta + n + 2 == 0:
        raise DegenerateError(f"no partner for n={n} at beta={beta}")
    return -n - 2, np.conj(complex(a_n)) * (beta - n) / (beta + n + 2)


def gen_homogeneous_gradient(beta: float, grid: PolarGrid, amplitude: complex = 1.0) -> FieldSample:
    """Gradient mapping ``r^beta (a e^{i theta} + a' e^{-3 i theta})``, homogeneous of degree beta.

    For ``0 < beta < 1`` this is quasiregular with Hölder exponent exactly
    ``beta`` at the origin.
    """
    partner = gradient_partner(beta, 1, amplitude)
    fld = gen_radial_power_field(beta, [(1, amplitude), partner], grid, name=f"homogeneous_gradient_b{beta:g}")
    fld.meta["generator"] = "homogeneous_gradient"
    return fld


def gen_scaled_harmonic_gradient(
    Lambda: float, lambda_: float, m: int, grid: PolarGrid, name: str | None = None
) -> FieldSample:
    """``f = phi_z`` for ``phi = Re((x/sqrt(Lambda) + i y/sqrt(lambda))^m)``.

    ``phi`` solves ``Lambda phi_xx + lambda phi_yy = 0``.
    """
    if not (Lambda >= lambda_ > 0.0):
        raise DomainError(f"need Lambda >= lambda > 0, got {Lambda!r}, {lambda_!r}")
    if m < 2:
        raise DomainError(f"m must be >= 2, got {m!r}")
    r, th = grid.mesh()
    sL, sl = math.sqrt(Lambda), math.sqrt(lambda_)
    w = r * np.cos(th) / sL + 1j * r * np.sin(th) / sl
    g = m * w ** (m - 1)
    f = 0.5 * (g.real / sL + 1j * g.imag / sl)
    H = m * (m - 1) * w ** (m - 2)
    pxx = H.real / Lambda
    pyy = -H.real / lambda_
    pxy = -H.imag / (sL * sl)
    fz = 0.25 * (pxx - pyy - 2j * pxy)
    fzbar = (0.25 * (pxx + pyy)).astype(complex)
    meta = {
        "name": name or f"scaled_harmonic_L{Lambda:g}_l{lambda_:g}_m{m}",
        "generator": "scaled_harmonic",
        "Lambda": float(Lambda),
        "lambda": float(lambda_),
        "m": int(m),
    }
    return FieldSample(grid, f, fz, fzbar, meta)


# --------------------------------------------------------------------------
# Fourier profiles
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class FourierProfile:
    """``c[i, n + N]`` is ``c_n(radii[i])`` for ``|n| <= N``."""

    radii: np.ndarray
    N: int
    c: np.ndarray

    @property
    def modes(self) -> np.ndarray:
        return np.arange(-self.N, self.N + 1)

    @property
    def d(self) -> np.ndarray:
        return self.modes[None, :] * self.c

    def coef(self, n: int) -> np.ndarray:
        """Column ``c_n`` over all radii; zero outside the truncation."""
        if abs(n) > self.N:
            return np.zeros(len(self.radii), dtype=complex)
        return self.c[:, n + self.N]

    def index_of(self, r: float) -> int:
        i = int(np.argmin(np.abs(self.radii - r)))
        if not math.isclose(self.radii[i], r, rel_tol=1e-12, abs_tol=0.0):
            raise DomainError(f"r={r!r} is not a profile radius")
        return i


def _circle_dft(values: np.ndarray, N: int) -> np.ndarray:
    n_theta = values.shape[-1]
    if n_theta < 2 * N + 2:
        raise AliasingError(f"n_theta={n_theta} cannot resolve |n| <= {N}; need >= {2 * N + 2}")
    spec = np.fft.fft(values, axis=-1) / n_theta
    return spec[..., np.arange(-N, N + 1) % n_theta]


def fourier_profile(fld: FieldSample, N: int) -> FourierProfile:
    return FourierProfile(fld.grid.radii, N, _circle_dft(fld.f, N))


def radial_derivative_profile(fld: FieldSample, N: int) -> FourierProfile:
    """Coefficients ``c_n'(r)``, from the exact radial derivative of the generator."""
    return FourierProfile(fld.grid.radii, N, _circle_dft(fld.f_r, N))


def J_from_fourier(profile: FourierProfile, r: float) -> float:
    """``pi sum n |c_n(r)|^2``."""
    i = profile.index_of(r)
    return float(np.pi * np.sum(profile.modes * np.abs(profile.c[i]) ** 2))


def circle_energy(fld: FieldSample) -> np.ndarray:
    """``int_0^{2 pi} J_f(r e^{i theta}) d theta`` per radius (trapezoid)."""
    return 2.0 * np.pi * fld.jac.mean(axis=1)


def _core_energy(radii: np.ndarray, y: np.ndarray) -> float:
    """``int_0^{r_0} y(rho) d rho`` for ``y`` extrapolated as a power law from the first two rungs."""
    if len(radii) < 2 or y[0] == 0.0:
        return 0.0
    if y[0] < 0.0 or y[1] <= 0.0:
        raise DegenerateError("Jacobian energy is not positive near the core")
    gamma = math.log(y[1] / y[0]) / math.log(radii[1] / radii[0])
    if gamma <= -1.0:
        raise DegenerateError(f"core energy diverges (local exponent {gamma:.3g})")
    return float(y[0] * radii[0] / (gamma + 1.0))


def _energy_curve(fld: FieldSample) -> tuple[np.ndarray, np.ndarray]:
    """``(J(r), J'(r))`` at every grid radius."""
    radii = fld.grid.radii
    dJ = radii * circle_energy(fld)
    J = np.empty_like(dJ)
    core = _core_energy(radii, dJ)
    J[0] = core
    for i in range(1, len(radii)):
        J[i] = core + simpson(dJ[: i + 1], x=radii[: i + 1])
    return J, dJ


def J_direct(fld: FieldSample, r: float) -> float:
    """``int_{D(0, r)} J_f dx dy``: trapezoid in theta, composite Simpson in radius.

    The disk inside the innermost grid radius is added by extrapolating the
    circle energy as a power law, which is exact for homogeneous fields.
    """
    i = fld.grid.index_of(r)
    radii = fld.grid.radii[: i + 1]
    dJ = radii * circle_energy(fld)[: i + 1]
    core = _core_energy(fld.grid.radii[:2], fld.grid.radii[:2] * circle_energy(fld)[:2])
    if i == 0:
        return core
    return float(core + simpson(dJ, x=radii))


# --------------------------------------------------------------------------
# Parseval identities and the coefficient relation
# --------------------------------------------------------------------------


class ParsevalReport(NamedTuple):
    r: float
    p2: float
    q2: float
    main: float
    energy: float
    q_consistency: float

    @property
    def worst(self) -> float:
        return max(self.p2, self.q2, self.main, self.energy)


def _rel(a: float, b: float) -> float:
    return abs(a - b) / max(abs(b), 1e-300)


def _energy_residual(direct: float, series: float) -> float:
    return abs(direct - series) / max(1.0, abs(series))


def pqs_on_circles(fld: FieldSample) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """``p``, ``q`` and ``s`` per node, plus the second reading of ``q``.

    ``p + i q = f_zbar - e^{2i theta} f_z`` and ``s - i q' = f_zbar + e^{2i theta} f_z``;
    ``q' = q`` exactly when ``f_zbar`` is real.
    """
    e2 = np.exp(2j * fld.grid.theta)[None, :]
    A = fld.fzbar + e2 * fld.fz
    B = fld.fzbar - e2 * fld.fz
    return B.real, B.imag, A.real, -A.imag


def parseval_checks(
    fld: FieldSample, profile: FourierProfile, r: float, radial: FourierProfile | None = None
) -> ParsevalReport:
    """Relative residuals of the circle Parseval identities at radius ``r``.

    ``main`` uses the mean of the two readings of ``q^2``; for gradient fields
    they coincide. ``energy`` compares :func:`J_direct` with
    :func:`J_from_fourier`, relative to ``max(1, J)``. ``q_consistency`` is ``max |q - q'|`` on the circle.
    """
    i = fld.grid.index_of(r)
    if radial is None:
        radial = radial_derivative_profile(fld, profile.N)
    p, q, s, q_alt = (x[i] for x in pqs_on_circles(fld))
    h = 2.0 * np.pi / fld.grid.n_theta
    int_p2 = h * np.sum(p * p)
    int_q2 = h * np.sum(q * q)
    int_main = h * np.sum(0.5 * (q * q + q_alt * q_alt) + 0.5 * (p * p + s * s))

    N = profile.N
    ns = np.arange(-N - 1, N + 2)
    pad = np.zeros(2 * N + 5, dtype=complex)  # d_m at index m + N + 2
    pad[2 : 2 * N + 3] = profile.d[i]
    d_lo = pad[ns - 1 + N + 2]
    d_hi = np.conj(pad[-ns - 1 + N + 2])
    four_p2 = np.pi / (2.0 * r * r) * np.sum(np.abs(d_lo + d_hi) ** 2)
    four_q2 = np.pi / (2.0 * r * r) * np.sum(np.abs(d_lo - d_hi) ** 2)
    four_main = np.pi * np.sum((profile.modes / r) ** 2 * np.abs(profile.c[i]) ** 2) + np.pi * np.sum(
        np.abs(radial.c[i]) ** 2
    )
    return ParsevalReport(
        r=float(r),
        p2=_rel(int_p2, four_p2),
        q2=_rel(int_q2, four_q2),
        main=_rel(int_main, four_main),
        energy=_energy_residual(J_direct(fld, r), J_from_fourier(profile, r)),
        q_consistency=float(np.max(np.abs(q - q_alt))),
    )


def coefficient_relation_check(profile: FourierProfile, radial_derivs: FourierProfile) -> float:
    """Max of ``|c'_{-n-2} - conj(c'_n) + (n+2)/r c_{-n-2} + n/r conj(c_n)|``.

    Taken over all radii and ``n = -1, 0, ..., N - 2``; the ``n = -1`` term is
    the statement about the mean of ``q``. It vanishes iff ``q`` is read the
    same way from both decompositions, i.e. for gradient fields.
    """
    r = profile.radii
    worst = 0.0
    for n in range(-1, profile.N - 1):
        m = -n - 2
        res = (
            radial_derivs.coef(m)
            - np.conj(radial_derivs.coef(n))
            - (m / r) * profile.coef(m)
            + (n / r) * np.conj(profile.coef(n))
        )
        worst = max(worst, float(np.max(np.abs(res))))
    return worst


# --------------------------------------------------------------------------
# Morrey ratios and the bound check
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class MorreyEstimate:
    J_table: list[tuple[float, float, float]]
    alpha_ratio: float
    alpha_regression: float
    per_radius: list[float]

    @property
    def alpha_measured(self) -> float:
        return min(1.0, self.alpha_ratio)


def morrey_estimate(fld: FieldSample, core_fraction: float = CORE_FRACTION) -> MorreyEstimate:
    """Morrey ratio ``r J'(r) / (2 J(r))`` over the radii ladder.

    ``alpha_ratio`` is the minimum over interior radii (the innermost rung,
    whose ratio is fixed by the core extrapolation, and the outermost are
    left out). Radii below ``core_fraction * r_max`` are dropped.
    """
    grid = fld.grid
    keep = grid.radii >= core_fraction * grid.r_max
    if np.count_nonzero(keep) < 16:
        raise DomainError("morrey_estimate needs at least 16 radii outside the core")
    if not np.all(keep):
        sub = PolarGrid(grid.radii[keep], grid.n_theta)
        fld = FieldSample(sub, fld.f[keep], fld.fz[keep], fld.fzbar[keep], fld.meta)
    radii = fld.grid.radii
    J, dJ = _energy_curve(fld)
    if np.any(J <= 0.0):
        raise DegenerateError(f"J(r) vanishes on {fld.name}")
    ratios = radii * dJ / (2.0 * J)
    slope = float(np.polyfit(2.0 * np.log(radii), np.log(J), 1)[0])
    return MorreyEstimate(
        J_table=[(float(a), float(b), float(c)) for a, b, c in zip(radii, J, dJ)],
        alpha_ratio=float(np.min(ratios[1:-1])),
        alpha_regression=slope,
        per_radius=[float(x) for x in ratios],
    )


def sandwich_check(fld: FieldSample, Lambda: float, lambda_: float) -> float:
    """Largest normalised excess over ``lambda/(lambda+Lambda) |grad f|^2 <= J_f <= Lambda/(lambda+Lambda) |grad f|^2``.

    Non-positive when the bounds hold.
    """
    grad2 = 2.0 * (np.abs(fld.fz) ** 2 + np.abs(fld.fzbar) ** 2)
    jac = fld.jac
    lower = lambda_ / (lambda_ + Lambda) * grad2 - jac
    upper = jac - Lambda / (lambda_ + Lambda) * grad2
    return float(np.max(np.maximum(lower, upper) / np.maximum(1.0, grad2)))


class BoundCheck(NamedTuple):
    k_emp: float
    alpha_bound: float
    alpha_measured: float
    kind: str

    @property
    def holds(self) -> bool:
        return self.alpha_bound <= self.alpha_measured + 1e-4


def bound_vs_measured(fld: FieldSample, estimate: MorreyEstimate | None = None) -> BoundCheck:
    """Compare the predicted exponent at the field's own distortion with the measured one.

    Gradient fields are held to ``alpha(t*)``; other fields only to the
    classical ``1/K``.
    """
    mu = fld.beltrami_abs()
    if not np.all(np.isfinite(mu)):
        raise DegenerateError(f"f_z vanishes on a grid node of {fld.name}")
    k_emp = float(np.max(mu))
    if k_emp >= 1.0:
        raise DegenerateError(f"{fld.name} is not quasiregular on the grid (max |mu| = {k_emp:.6g})")
    if estimate is None:
        estimate = morrey_estimate(fld)
    if fld.is_gradient():
        bound, kind = alpha_star(k_emp), "gradient"
    else:
        bound, kind = alpha_classical(distortion_from_k(k_emp)), "classical"
    return BoundCheck(k_emp, bound, estimate.alpha_measured, kind)


# --------------------------------------------------------------------------
# Corpus
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class CorpusEntry:
    field: FieldSample
    gradient: bool
    constant_coeff: tuple[float, float] | None = None
    expected_alpha: float | None = None


def default_corpus(grid: PolarGrid | None = None) -> list[CorpusEntry]:
    """Closed-form fields used by the Morrey harness and the acceptance suite."""
    grid = grid or PolarGrid.ladder()
    one_third = 1.0 / 3.0
    return [
        CorpusEntry(gen_radial_power_field(1.0, [(1, 1.0)], grid, name="identity"), True, None, 1.0),
        CorpusEntry(
            gen_radial_power_field(one_third, [(1, 1.0)], grid, name="extremal_K3"), False, None, one_third
        ),
        CorpusEntry(gen_scaled_harmonic_gradient(3.0, 1.0, 2, grid), True, (3.0, 1.0), 1.0),
        CorpusEntry(gen_scaled_harmonic_gradient(3.0, 1.0, 3, grid), True, (3.0, 1.0), 1.0),
        CorpusEntry(gen_scaled_harmonic_gradient(3.0, 1.0, 5, grid), True, (3.0, 1.0), 1.0),
        CorpusEntry(
            superpose(
                [
                    gen_scaled_harmonic_gradient(2.0, 1.0, 2, grid),
                    scale_field(gen_scaled_harmonic_gradient(2.0, 1.0, 3, grid), 0.25),
                ],
                name="scaled_harmonic_L2_l1_m2+m3",
            ),
            True,
            (2.0, 1.0),
            None,
        ),
        CorpusEntry(gen_homogeneous_gradient(one_third, grid), True, None, one_third),
        CorpusEntry(gen_homogeneous_gradient(0.6, grid), True, None, 0.6),
        CorpusEntry(
            gen_radial_power_field(1.0, [(1, 1.0), (-1, 0.2j)], grid, name="nongradient_control"),
            False,
            None,
            1.0,
        ),
    ]
