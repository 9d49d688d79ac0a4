"""Command-line entry point: ``qrholder <subcommand> [options]``.

Exit codes: 0 when every checked contract holds, 1 when a mathematical
contract is violated, 2 on invalid input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict
from typing import Any, Sequence

import numpy as np

from .errors import DomainError
from .exponents import DistortionParams, distortion_from_k
from .fourier import (
    PolarGrid,
    bound_vs_measured,
    coefficient_relation_check,
    default_corpus,
    fourier_profile,
    morrey_estimate,
    parseval_checks,
    radial_derivative_profile,
    sandwich_check,
)
from .optimal import DEFAULT_TOL, certify_concavity, exponent_report, maximize_alpha
from .pointwise import discrete_sweep, jacobian_identity_sweep, lower_bound_margin
from .sampling import DEFAULT_SEED

SCHEMA_VERSION = 1
SWEEP_COLUMNS = ("k", "alpha_classical", "alpha1", "alpha0", "alpha2", "alpha_star", "t_star")
CHECK_KS = tuple(round(0.1 * i, 1) for i in range(1, 10))
T_PER_K = 8
ORDER_MARGIN = 1e-12
IDENTITY_TOL = 1e-10
SANDWICH_TOL = 1e-12
PARSEVAL_TOL = 1e-8
COEFF_TOL = 1e-8
COEFF_CONTROL_MIN = 1e-3
BOUND_SLACK = 1e-4
FOURIER_N = 12

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# --------------------------------------------------------------------------
# Output
# --------------------------------------------------------------------------


def _fmt(x: Any) -> str:
    if isinstance(x, (float, np.floating)):
        return "%.17g" % x
    return str(x)


def _jsonable(x: Any) -> Any:
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else None
    if isinstance(x, complex):
        return [x.real, x.imag]
    return x


def _render(payload: dict, rows: list[dict], columns: Sequence[str], fmt: str) -> str:
    if fmt == "json":
        doc = {"schema": SCHEMA_VERSION, **payload, "rows": rows}
        return json.dumps(_jsonable(doc), indent=2, allow_nan=False) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_fmt(row.get(c, "")) for c in columns])
        return buf.getvalue()
    cells = [list(columns)] + [[_fmt(row.get(c, "")) for c in columns] for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(columns))]
    lines = ["  ".join(v.ljust(w) for v, w in zip(r, widths)).rstrip() for r in cells]
    for key, value in payload.items():
        if key != "command" and not isinstance(value, (dict, list)):
            lines.append(f"# {key}: {_fmt(value)}")
    return "\n".join(lines) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# --------------------------------------------------------------------------
# Subcommands
# --------------------------------------------------------------------------


def _params(args) -> DistortionParams:
    if args.k is not None:
        return distortion_from_k(args.k)
    if args.K is not None:
        return DistortionParams.from_K(args.K)
    raise UsageError("one of --k or --K is required")


def _t_lattice(k: float) -> list[float]:
    lo, hi = 1.0 - k, 1.0 - k * k
    return [lo + (hi - lo) * j / (T_PER_K + 1) for j in range(1, T_PER_K + 1)]


def run_exponent(args) -> tuple[int, dict, list[dict], Sequence[str]]:
    rep = exponent_report(_params(args), args.tol)
    row = rep.as_dict()
    return EXIT_OK, {"command": "exponent"}, [row], list(row)


def run_sweep(args):
    if args.grid < 2:
        raise UsageError(f"--grid must be >= 2, got {args.grid}")
    rows, bad = [], []
    for i in range(1, args.grid + 1):
        k = i / (args.grid + 1)
        row = exponent_report(k, args.tol).as_dict()
        rows.append({c: row[c] for c in SWEEP_COLUMNS})
        chain = (
            row["alpha_star"] - row["alpha0"],
            row["alpha0"] - row["alpha1"],
            row["alpha1"] - row["alpha_classical"],
        )
        if min(chain) <= ORDER_MARGIN:
            bad.append(k)
    payload = {"command": "sweep", "grid": args.grid, "ordering_violations": bad}
    return (EXIT_VIOLATION if bad else EXIT_OK), payload, rows, SWEEP_COLUMNS


def run_quartic(args):
    p = _params(args)
    if p.k == 0.0:
        raise UsageError("the quartic degenerates at k = 0")
    cp = maximize_alpha(p.k, args.tol)
    row = {
        "k": cp.k,
        "t_star": cp.t_star,
        "alpha_star": cp.alpha_star,
        "nearest_root_distance": cp.agreement,
        "quartic_residual": cp.quartic_residual,
        "stationarity_residual": cp.stationarity.corrected,
        "printed_stationarity_residual": cp.stationarity.printed,
        "interval_roots": len(cp.roots),
    }
    payload = {"command": "quartic", "roots": list(cp.roots), "discrepancy": cp.discrepancy}
    ok = cp.stationarity.corrected < 1e-8 and (cp.agrees or cp.discrepancy is not None)
    return (EXIT_OK if ok else EXIT_VIOLATION), payload, [row], list(row)


def run_verify_pointwise(args):
    if args.grid < 32:
        raise UsageError(f"--grid must be >= 32, got {args.grid}")
    ident = jacobian_identity_sweep(n_samples=args.samples, seed=args.seed)
    rows, violations = [], 0
    for k in CHECK_KS:
        for t in _t_lattice(k):
            m = lower_bound_margin(k, t, grid=(args.grid, 2 * args.grid), t1_scale=1.0 + args.inject_t1_inflation)
            violations += m.violations
            rows.append(
                {
                    "k": k,
                    "t": t,
                    "t1": m.t1,
                    "min_margin": m.min_margin,
                    "boundary_infimum": m.boundary_infimum,
                    "violations": m.violations,
                }
            )
    ident_ok = max(ident.max_identity_residual, ident.max_beltrami_residual, ident.max_jacobian_residual) < IDENTITY_TOL
    payload = {
        "command": "verify-pointwise",
        "seed": args.seed,
        "jacobian_identity": ident._asdict(),
        "lower_bound_violations": violations,
        "min_margin": min(r["min_margin"] for r in rows),
    }
    code = EXIT_OK if (ident_ok and violations == 0) else EXIT_VIOLATION
    return code, payload, rows, ["k", "t", "t1", "min_margin", "boundary_infimum", "violations"]


def run_verify_discrete(args):
    if args.n_min < 2:
        raise UsageError(f"--n-min must be >= 2, got {args.n_min}")
    if not args.c_scale > 0.0:
        raise UsageError(f"--c-scale must be positive, got {args.c_scale}")
    rows, total = [], 0
    for i, k in enumerate(CHECK_KS):
        rep = discrete_sweep(
            k,
            n_samples=args.samples,
            seed=args.seed + i,
            c_scale=args.c_scale,
            n_range=(args.n_min, max(args.n_min, 64)),
        )
        total += rep.violations
        w = rep.witness
        rows.append(
            {
                "k": k,
                "t": rep.t,
                "C": rep.C,
                "samples": rep.samples,
                "violations": rep.violations,
                "min_scaled_margin": rep.min_scaled_margin,
                "witness_n": w.n if w else "",
                "witness_d_plus": repr(w.d_plus) if w else "",
                "witness_d_minus": repr(w.d_minus) if w else "",
            }
        )
    payload = {"command": "verify-discrete", "seed": args.seed, "c_scale": args.c_scale, "violations": total}
    return (EXIT_VIOLATION if total else EXIT_OK), payload, rows, list(rows[0])


def morrey_rows(grid: PolarGrid, fine: PolarGrid) -> tuple[list[dict], list[str]]:
    """One row per corpus field plus the list of breached contracts."""
    rows, breaches = [], []
    for entry, fine_entry in zip(default_corpus(grid), default_corpus(fine)):
        fld = entry.field
        name = fld.name
        est = morrey_estimate(fld)
        bound = bound_vs_measured(fld, est)
        ffld = fine_entry.field
        prof = fourier_profile(ffld, FOURIER_N)
        rprof = radial_derivative_profile(ffld, FOURIER_N)
        radii = ffld.grid.radii[:: max(1, len(ffld.grid.radii) // 16)]
        reps = [parseval_checks(ffld, prof, float(r), rprof) for r in radii]
        coeff = coefficient_relation_check(prof, rprof)
        sandwich = sandwich_check(fld, *entry.constant_coeff) if entry.constant_coeff else math.nan
        row = {
            "field": name,
            "gradient": entry.gradient,
            "k_emp": bound.k_emp,
            "bound_kind": bound.kind,
            "alpha_bound": bound.alpha_bound,
            "alpha_measured": bound.alpha_measured,
            "alpha_ratio": est.alpha_ratio,
            "alpha_regression": est.alpha_regression,
            "parseval_max": max(r.worst for r in reps),
            "coeff_relation": coeff,
            "sandwich": sandwich,
        }
        rows.append(row)
        if not bound.holds:
            breaches.append(f"{name}: bound {bound.alpha_bound:.6g} > measured {bound.alpha_measured:.6g}")
        if row["parseval_max"] >= PARSEVAL_TOL:
            breaches.append(f"{name}: Parseval residual {row['parseval_max']:.3g}")
        if entry.gradient and coeff >= COEFF_TOL:
            breaches.append(f"{name}: coefficient relation residual {coeff:.3g}")
        if name == "nongradient_control" and coeff <= COEFF_CONTROL_MIN:
            breaches.append(f"{name}: negative control not detected ({coeff:.3g})")
        if entry.constant_coeff and sandwich > SANDWICH_TOL:
            breaches.append(f"{name}: sandwich violated by {sandwich:.3g}")
        if entry.expected_alpha is not None and abs(bound.alpha_measured - entry.expected_alpha) > BOUND_SLACK:
            breaches.append(f"{name}: measured {bound.alpha_measured:.8g} != {entry.expected_alpha:.8g}")
    return rows, breaches


def run_morrey(args):
    grid = PolarGrid.ladder(n_theta=args.n_theta)
    rows, breaches = morrey_rows(grid, PolarGrid.fine(n_theta=args.n_theta))
    payload = {"command": "morrey", "breaches": breaches}
    return (EXIT_VIOLATION if breaches else EXIT_OK), payload, rows, list(rows[0])


def run_report(args):
    p = _params(args)
    rep = exponent_report(p, args.tol)
    row = rep.as_dict()
    payload: dict[str, Any] = {"command": "report", "exponents": dict(row)}
    ok = True
    if p.k > 0.0:
        cp = maximize_alpha(p.k, args.tol)
        cert = certify_concavity(p.k)
        m = lower_bound_margin(p.k, cp.t_star)
        payload["critical_point"] = {
            "t_star": cp.t_star,
            "alpha_star": cp.alpha_star,
            "roots": list(cp.roots),
            "nearest_root_distance": cp.agreement,
            "stationarity_residual": cp.stationarity.corrected,
            "discrepancy": cp.discrepancy,
        }
        payload["concavity"] = {**asdict(cert), "holds": cert.holds}
        payload["lower_bound_at_t_star"] = {
            "min_margin": m.min_margin,
            "boundary_infimum": m.boundary_infimum,
            "violations": m.violations,
        }
        row.update(concavity=cert.holds, lower_bound_violations=m.violations)
        ok = cert.holds and m.violations == 0
    return (EXIT_OK if ok else EXIT_VIOLATION), payload, [row], list(row)


COMMANDS = {
    "exponent": run_exponent,
    "sweep": run_sweep,
    "quartic": run_quartic,
    "verify-pointwise": run_verify_pointwise,
    "verify-discrete": run_verify_discrete,
    "morrey": run_morrey,
    "report": run_report,
}


# --------------------------------------------------------------------------
# Parser
# --------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _seed(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError(f"seed must be a 64-bit unsigned integer, got {text}")
    return v


def _positive(text: str) -> float:
    v = float(text)
    if not (v > 0.0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--tol", type=_positive, default=DEFAULT_TOL, help="optimiser tolerance (default 1e-12)")
    common.add_argument("--seed", type=_seed, default=DEFAULT_SEED, help=f"RNG seed (default {DEFAULT_SEED})")
    common.add_argument("--format", choices=("csv", "json", "table"), default="table")
    common.add_argument("--out", help="write output to this path instead of stdout")

    dist = _Parser(add_help=False)
    g = dist.add_mutually_exclusive_group()
    g.add_argument("--k", type=float, help="Beltrami bound in [0, 1)")
    g.add_argument("--K", type=float, help="distortion K >= 1")

    parser = _Parser(prog="qrholder", description="Hölder exponents for quasiregular gradient mappings.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("exponent", parents=[common, dist], help="all exponents at one distortion")
    sp = sub.add_parser("sweep", parents=[common], help="exponent table on k = i/(grid+1)")
    sp.add_argument("--grid", type=int, default=99, help="number of k values (default 99)")
    sub.add_parser("quartic", parents=[common, dist], help="maximiser vs. quartic roots")
    vp = sub.add_parser("verify-pointwise", parents=[common], help="Jacobian identity and lower-bound sweeps")
    vp.add_argument("--grid", type=int, default=128, help="|mu| rows; angles use twice as many (default 128)")
    vp.add_argument("--samples", type=int, default=100_000, help="Monte Carlo samples (default 1e5)")
    vp.add_argument("--inject-t1-inflation", type=float, default=0.0, help=argparse.SUPPRESS)
    vd = sub.add_parser("verify-discrete", parents=[common], help="Fourier-coefficient inequality sweep")
    vd.add_argument("--samples", type=int, default=100_000, help="samples per k (default 1e5)")
    vd.add_argument("--c-scale", type=float, default=1.0, help="multiply C = 2 alpha* by this (default 1)")
    vd.add_argument("--n-min", type=int, default=2, help="smallest mode index n (default 2)")
    mp = sub.add_parser("morrey", parents=[common], help="Morrey-ratio harness over the field corpus")
    mp.add_argument("--n-theta", type=int, default=256, help="samples per circle (default 256)")
    sub.add_parser("report", parents=[common, dist], help="exponents, maximiser and certificates at one k")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        sys.stderr.write(f"{exc}\n")
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    if getattr(args, "samples", 1) < 1:
        sys.stderr.write("--samples must be positive\n")
        return EXIT_USAGE
    try:
        code, payload, rows, columns = COMMANDS[args.command](args)
    except (UsageError, DomainError) as exc:
        sys.stderr.write(f"qrholder {args.command}: {exc}\n")
        return EXIT_USAGE
    _emit(_render(payload, rows, columns, args.format), args.out)
    if code == EXIT_VIOLATION:
        sys.stderr.write(f"qrholder {args.command}: contract violation\n")
    return code


if __name__ == "__main__":
    raise SystemExit(main())
