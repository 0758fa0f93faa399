"""Command line interface.

Subcommands: verify (seeded campaign), svd (decompose one instance file),
lemma1 (norm inequality sweep), bench (closed form vs oracle timings).
Exit codes: 0 success, 1 verification failure, 2 configuration or parse error.
"""

from __future__ import annotations

import argparse
import sys

from .closed_form import BRANCH_ZERO_VECTOR, full_svd, spectrum
from .core import invariant_scalars
from .harness import (
    CampaignConfig,
    ConfigError,
    bench_csv,
    bench_speedups,
    run_bench,
    run_lemma1,
    run_verify,
)
from .oracle import (
    NEAR_PARALLEL_EPSILON_DEFAULT,
    Q_MODES,
    VECTOR_MODES,
)
from .instance_io import load_instance


def _parse_dims(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(","))
    except ValueError:
        raise ConfigError(f"bad dims {text!r}; expected comma-separated integers") from None


def _parse_scale_range(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise ConfigError(f"bad scale range {text!r}; expected lo,hi")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError:
        raise ConfigError(f"bad scale range {text!r}; expected two numbers") from None


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="orthorank1",
        description=(
            "Closed-form SVD of an orthogonal matrix plus a rank-one update, "
            "with seeded verification tooling."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    verify = sub.add_parser("verify", help="run a seeded verification campaign")
    verify.add_argument("--trials", type=int, default=200, help="trials per dimension")
    verify.add_argument("--dims", default="2,3,8,16", help="comma-separated dimensions")
    verify.add_argument("--q-mode", default="haar", choices=Q_MODES)
    verify.add_argument("--vector-mode", default="gaussian", choices=VECTOR_MODES)
    verify.add_argument("--seed", type=int, default=0)
    verify.add_argument(
        "--epsilon",
        type=float,
        default=NEAR_PARALLEL_EPSILON_DEFAULT,
        help="tilt angle for vector_mode near_parallel",
    )
    verify.add_argument("--scale-range", default="1e-3,1e3", help="lo,hi bounds for |a| and |b|")
    verify.add_argument("--tol-theorem", type=float, default=1e-10)
    verify.add_argument("--tol-oracle", type=float, default=1e-8)
    verify.add_argument("--tol-reconstruction", type=float, default=1e-9)
    verify.add_argument(
        "--oracle-cutoff", type=int, default=64, help="largest dim compared against the oracle"
    )
    verify.add_argument("--report", metavar="PATH", help="write the JSON report to this file")
    verify.add_argument(
        "--json", action="store_true", help="print the JSON report instead of the table"
    )

    svd = sub.add_parser("svd", help="decompose one instance file")
    svd.add_argument("--input", required=True, metavar="PATH")
    svd.add_argument("--precision", type=int, default=12, help="significant digits printed")
    svd.add_argument("--vectors", action="store_true", help="also print U, sigma, V")
    svd.add_argument("--tol-orthogonal", type=float, default=1e-10)

    lemma1 = sub.add_parser("lemma1", help="random sweep of the two norm inequalities")
    lemma1.add_argument("--trials", type=int, default=100_000)
    lemma1.add_argument("--seed", type=int, default=0)

    bench = sub.add_parser("bench", help="time the closed form against the Jacobi oracle")
    bench.add_argument("--dims", default="64")
    bench.add_argument("--trials", type=int, default=100)
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--out", metavar="CSV", help="write the CSV here instead of stdout")
    return parser


def _cmd_verify(args) -> int:
    cfg = CampaignConfig(
        trials=args.trials,
        dims=_parse_dims(args.dims),
        q_mode=args.q_mode,
        vector_mode=args.vector_mode,
        seed=args.seed,
        epsilon=args.epsilon,
        scale_range=_parse_scale_range(args.scale_range),
        theorem_tol=args.tol_theorem,
        oracle_tol=args.tol_oracle,
        reconstruction_tol=args.tol_reconstruction,
        oracle_cutoff=args.oracle_cutoff,
        emit="json" if args.json else "table",
    )
    report = run_verify(cfg)
    sys.stdout.write(report.to_json() if cfg.emit == "json" else report.table())
    if args.report:
        with open(args.report, "w", encoding="utf-8") as handle:
            handle.write(report.to_json())
    return 0 if not report.failures else 1


def _fmt(value: float, precision: int) -> str:
    return format(float(value), f".{precision}g")


def _fmt_vector(vec, precision: int) -> str:
    return "[" + ", ".join(_fmt(x, precision) for x in vec) + "]"


def _fmt_matrix(mat, precision: int) -> list[str]:
    return ["  " + _fmt_vector(row, precision) for row in mat]


def _cmd_svd(args) -> int:
    m = load_instance(args.input, args.tol_orthogonal)
    scal = invariant_scalars(m)
    spec = spectrum(m)
    svd = full_svd(m)
    p = args.precision
    lhs = spec.sigma_max - spec.sign_term * spec.sigma_min
    rhs = scal.alpha * scal.beta
    lines = [
        f"n: {m.dim}",
        f"branch: {spec.branch}",
        f"sign_term: {spec.sign_term:+d}",
        f"unit_multiplicity: {spec.unit_multiplicity}",
        "sigma: " + _fmt_vector(svd.sigma, p),
        f"theorem lhs (sigma_1 - sign*sigma_n): {_fmt(lhs, p)}",
        f"theorem rhs (|a| |b|): {_fmt(rhs, p)}",
        f"theorem residual: {_fmt(abs(lhs - rhs), p)}",
    ]
    if spec.branch == BRANCH_ZERO_VECTOR:
        lines.append("note: rank-one update is zero; A equals Q")
    if args.vectors:
        lines.append("u:")
        lines.extend(_fmt_matrix(svd.u, p))
        lines.append("v:")
        lines.extend(_fmt_matrix(svd.v, p))
    sys.stdout.write("\n".join(lines) + "\n")
    return 0


def _cmd_lemma1(args) -> int:
    report = run_lemma1(args.trials, args.seed)
    sys.stdout.write(report.table())
    return 0 if report.violations == 0 else 1


def _cmd_bench(args) -> int:
    rows = run_bench(_parse_dims(args.dims), args.trials, args.seed)
    csv_text = bench_csv(rows)
    ratio_lines = [
        f"dim {dim}: spectrum {ratio:.1f}x faster than jacobi"
        for dim, ratio in bench_speedups(rows).items()
    ]
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(csv_text)
        for line in ratio_lines:
            sys.stdout.write(line + "\n")
    else:
        sys.stdout.write(csv_text)
        for line in ratio_lines:
            sys.stderr.write(line + "\n")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    handlers = {
        "verify": _cmd_verify,
        "svd": _cmd_svd,
        "lemma1": _cmd_lemma1,
        "bench": _cmd_bench,
    }
    try:
        return handlers[args.command](args)
    except (ValueError, OSError) as exc:
        # covers ConfigError, ParseError, NotOrthogonalError, bad files
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except RuntimeError as exc:
        # oracle disagreement or non-convergence surfaced past a campaign
        sys.stderr.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
