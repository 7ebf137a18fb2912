"""Command-line interface: one executable, one subcommand per pipeline stage.

Every run prints a single machine-parsable ``key=value`` line to stdout;
diagnostics go to stderr.  Exit codes: 0 success, 1 usage error, 2 runtime
or data error.  All randomness is seeded through ``--seed`` flags, so any
invocation is reproducible (timing fields aside); there is no environment
or config-file input.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

import numpy as np

from . import algrank, bench, cavity, gen, io, matching, plots
from .core import degree_distribution, degree_sequences
from .errors import SparseRankError

__all__ = ["main", "entrypoint"]

USAGE_ERROR = 1
RUNTIME_ERROR = 2


class _Parser(argparse.ArgumentParser):
    """argparse with the exit-code contract: usage errors exit 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(USAGE_ERROR)


def _fmt(value) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def _emit(**fields):
    print(" ".join(f"{k}={_fmt(v)}" for k, v in fields.items()))


def _parse_value_list(text: str) -> list[float]:
    """Accept '1,2,3' and '2..8' (inclusive integer range)."""
    text = text.strip()
    if ".." in text:
        lo, hi = text.split("..", 1)
        return [float(k) for k in range(int(lo), int(hi) + 1)]
    return [float(t) for t in text.split(",") if t]


def _solver_config(args) -> cavity.SolverConfig:
    return cavity.SolverConfig(
        tolerance=args.tol,
        max_iterations=args.max_iter,
        damping=args.damping,
        init=args.init,
    )


def _add_matrix_input(p):
    p.add_argument("--in", dest="in_path", required=True, help="matrix file")
    p.add_argument(
        "--format",
        choices=io.MATRIX_FORMATS,
        default=None,
        help="input format (default: detect from extension)",
    )


def _add_solver_flags(p):
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--max-iter", type=int, default=100_000)
    p.add_argument("--damping", type=float, default=0.5)
    p.add_argument("--init", type=float, default=0.5)
    p.add_argument(
        "--variant",
        choices=["symmetric-half", "symmetric-full"],
        default=cavity.DEFAULT_VARIANT.tag,
    )


def build_parser() -> _Parser:
    parser = _Parser(prog="sparserank", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("generate", help="write a seeded random matrix")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--kavg", type=float, required=True)
    p.add_argument("--dist", choices=["uniform", "powerlaw"], default="uniform")
    p.add_argument("--gamma", type=float, default=3.0)
    p.add_argument("--weights", choices=["random-iid", "all-ones"], default="random-iid")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=io.MATRIX_FORMATS, default=None)

    p = sub.add_parser("estimate", help="degree-distribution rank estimate")
    p.add_argument("--in", dest="in_path", help="matrix file")
    p.add_argument("--from-degdist", dest="degdist_path", help="degree-distribution CSV")
    p.add_argument("--n", type=int, default=None, help="node count override for --from-degdist")
    p.add_argument("--format", choices=io.MATRIX_FORMATS, default=None)
    p.add_argument("--dump-json", dest="dump_json", default=None,
                   help="write the full estimate (fixed point included) as JSON")
    _add_solver_flags(p)

    p = sub.add_parser("sprank", help="structural rank via maximum matching")
    _add_matrix_input(p)

    p = sub.add_parser("fieldrank", help="exact rank over a large prime field")
    _add_matrix_input(p)
    p.add_argument("--prime", type=int, default=algrank.DEFAULT_PRIME)
    p.add_argument("--digits", type=int, default=12, help="decimal precision of input values")
    p.add_argument("--randomize-weights", action="store_true",
                   help="ignore file values; draw iid field elements on the pattern")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("numrank", help="floating-point rank (small n)")
    _add_matrix_input(p)
    p.add_argument("--tol", type=float, default=None, help="relative singular-value tolerance")

    p = sub.add_parser("degdist", help="extract the degree-distribution CSV")
    _add_matrix_input(p)
    p.add_argument("--out", required=True)

    p = sub.add_parser("bench", help="benchmark sweeps")
    bsub = p.add_subparsers(dest="experiment", required=True, parser_class=_Parser)

    def _common_bench(bp, need_methods=True):
        bp.add_argument("--dist", choices=["uniform", "powerlaw"], default="uniform")
        bp.add_argument("--gamma", type=float, default=3.0)
        bp.add_argument("--reps", type=int, default=10)
        bp.add_argument("--seed", type=int, default=0)
        bp.add_argument("--out", required=True, help="records CSV path")
        if need_methods:
            bp.add_argument("--weights", choices=["random-iid", "all-ones"],
                            default="random-iid")
            bp.add_argument("--methods", default="fer,sprank",
                            help="comma list from fer,sprank,fieldrank,numrank")

    bp = bsub.add_parser("sweep-n", help="vary n at fixed mean row degree")
    bp.add_argument("--n", required=True, help="comma list of sizes")
    bp.add_argument("--kavg", type=float, required=True)
    _common_bench(bp)

    bp = bsub.add_parser("sweep-k", help="vary mean row degree at fixed n")
    bp.add_argument("--n", type=int, required=True)
    bp.add_argument("--k", required=True, help="comma list or a..b range")
    _common_bench(bp)

    bp = bsub.add_parser("corr", help="all-ones correlated-weights stress")
    bp.add_argument("--n", type=int, required=True)
    bp.add_argument("--k", required=True, help="comma list or a..b range")
    bp.add_argument("--weights", choices=["all-ones", "random-iid"], default="all-ones")
    _common_bench(bp, need_methods=False)

    p = sub.add_parser("calibrate", help="pick the density-formula coefficient")
    p.add_argument("--k", default="1.5,2,3,4", help="comma list of mean row degrees")
    p.add_argument("--n", type=int, default=100_000)
    p.add_argument("--seeds", type=int, default=5, help="number of seeds per k")
    p.add_argument("--seed", type=int, default=0, help="first seed")
    p.add_argument("--report", default=None, help="write the per-variant error table here")

    p = sub.add_parser("report", help="render figures from a bench records CSV")
    p.add_argument("--in", dest="in_path", required=True)
    p.add_argument("--out-dir", dest="out_dir", required=True)
    p.add_argument("--formats", default="png", help="comma list, e.g. png,pdf")

    return parser


def _cmd_generate(args) -> int:
    spec = gen.GenSpec(
        n=args.n, k_avg=args.kavg, dist=args.dist, gamma=args.gamma,
        weight_mode=args.weights, seed=args.seed,
    )
    matrix = gen.gen_matrix(spec)
    fmt = args.format or (
        io.MM_REAL if str(args.out).lower().endswith((".mtx", ".mm")) else io.EDGE_LIST
    )
    io.write_matrix(matrix, args.out, fmt)
    _emit(path=args.out, n=matrix.n, nnz=matrix.nnz, seed=args.seed)
    return 0


def _cmd_estimate(args) -> int:
    cfg = _solver_config(args)
    variant = cavity.variant_from_tag(args.variant)
    if args.degdist_path:
        p_in, p_out, n_file = io.read_degdist(args.degdist_path)
        n = args.n if args.n is not None else n_file
        est = cavity.estimate_rank_from_distributions(p_in, p_out, n, cfg, variant)
    elif args.in_path:
        matrix = io.read_matrix(args.in_path, args.format)
        est = cavity.estimate_rank(matrix.pattern, cfg, variant)
    else:
        sys.stderr.write("estimate: provide --in or --from-degdist\n")
        return USAGE_ERROR
    fp = est.fixed_point
    if args.dump_json:
        payload = {
            "n": est.n,
            "rank_est": est.rank_est,
            "r_m": est.r_m,
            "n_d": est.n_d,
            "n_c": est.n_c,
            "variant": est.variant.tag,
            "clamped": est.clamped,
            "fixed_point": {
                "w1": fp.w1, "w2": fp.w2, "wh1": fp.wh1, "wh2": fp.wh2,
                "residual": fp.residual, "iterations": fp.iterations,
                "converged": fp.converged,
            },
        }
        with open(args.dump_json, "w") as fh:
            json.dump(payload, fh, indent=2)
    _emit(
        rank_est=est.rank_est, r_m=est.r_m, n_d=est.n_d,
        converged=fp.converged, iterations=fp.iterations, variant=est.variant.tag,
    )
    return 0


def _cmd_sprank(args) -> int:
    matrix = io.read_matrix(args.in_path, args.format)
    rank = matching.sprank(matrix.pattern)
    _emit(sprank=rank, n=matrix.n, nnz=matrix.nnz)
    return 0


def _cmd_fieldrank(args) -> int:
    matrix = io.read_matrix(args.in_path, args.format)
    if args.randomize_weights:
        result = algrank.generic_rank(matrix.pattern, args.prime, args.seed)
        _emit(fieldrank=result.rank, prime=result.prime, n=matrix.n,
              nnz=matrix.nnz, seed=args.seed)
    else:
        result = algrank.field_rank(matrix, args.prime, args.digits)
        _emit(fieldrank=result.rank, prime=result.prime, n=matrix.n, nnz=matrix.nnz)
    return 0


def _cmd_numrank(args) -> int:
    matrix = io.read_matrix(args.in_path, args.format)
    rank = algrank.numerical_rank(matrix, args.tol)
    _emit(numrank=rank, n=matrix.n)
    return 0


def _cmd_degdist(args) -> int:
    matrix = io.read_matrix(args.in_path, args.format)
    in_seq, out_seq = degree_sequences(matrix.pattern)
    p_in = degree_distribution(in_seq, "in")
    p_out = degree_distribution(out_seq, "out")
    io.write_degdist(p_in, p_out, matrix.n, args.out)
    _emit(path=args.out, n=matrix.n)
    return 0


def _cmd_bench(args) -> int:
    methods = tuple(m for m in getattr(args, "methods", "").split(",") if m) or None
    if args.experiment == "sweep-n":
        result = bench.run_sweep_n(
            [int(v) for v in _parse_value_list(args.n)],
            args.kavg, dist=args.dist, weight_mode=args.weights,
            reps=args.reps, methods=methods, out_path=args.out,
            base_seed=args.seed, gamma=args.gamma,
        )
    elif args.experiment == "sweep-k":
        result = bench.run_sweep_k(
            args.n, _parse_value_list(args.k), dist=args.dist,
            weight_mode=args.weights, reps=args.reps, methods=methods,
            out_path=args.out, base_seed=args.seed, gamma=args.gamma,
        )
    else:
        result = bench.run_correlated(
            args.n, _parse_value_list(args.k), dist=args.dist, reps=args.reps,
            out_path=args.out, base_seed=args.seed, gamma=args.gamma,
            weight_mode=args.weights,
        )
    for err in result.errors:
        sys.stderr.write(f"bench: {err}\n")
    _emit(rows=len(result.rows), errors=len(result.errors), out=args.out)
    return RUNTIME_ERROR if result.errors else 0


def _cmd_calibrate(args) -> int:
    winner = cavity.calibrate_variant(
        _parse_value_list(args.k),
        args.n,
        range(args.seed, args.seed + args.seeds),
        report_path=args.report,
    )
    if args.report:
        _emit(variant=winner.tag, report=args.report)
    else:
        _emit(variant=winner.tag)
    return 0


def _cmd_report(args) -> int:
    formats = tuple(f for f in args.formats.split(",") if f)
    written = plots.render_report(args.in_path, args.out_dir, formats)
    _emit(figures=len(written), out=args.out_dir)
    return 0


_COMMANDS = {
    "generate": _cmd_generate,
    "estimate": _cmd_estimate,
    "sprank": _cmd_sprank,
    "fieldrank": _cmd_fieldrank,
    "numrank": _cmd_numrank,
    "degdist": _cmd_degdist,
    "bench": _cmd_bench,
    "calibrate": _cmd_calibrate,
    "report": _cmd_report,
}


def main(argv=None) -> int:
    logging.basicConfig(stream=sys.stderr, level=logging.WARNING, format="%(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except (SparseRankError, OSError, ValueError, np.linalg.LinAlgError) as exc:
        sys.stderr.write(f"sparserank {args.command}: {exc}\n")
        return RUNTIME_ERROR


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
