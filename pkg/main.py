import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from dotenv import load_dotenv

from app_logging import configure_logging, run_log
from bench import load_profile, run_bench, run_profile, violations, write_report
from builders import ACCURATE, ALGORITHMS, BuildParams, build
from config import Settings, resolve_seed
from core import CoresetError, DataError, InvalidArgument
from datasets import DISTRIBUTIONS, DatasetSpec, describe, generate, read_coreset, read_points, read_summary, write_coreset, write_points, write_summary
from sampling import MODES
from streaming import STREAM_ALGORITHMS, expected_depth, stream_file
from utils import print_bench_table, print_error, print_header, print_info, print_report, print_success, print_warning
from verify import CHECKS, summary_strong_error, verify_coreset

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_VIOLATION = 3


class UsageError(Exception):
    """Bad flags or flag combinations (exit code 1)."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _params(args, settings: Settings) -> BuildParams:
    return BuildParams(
        eps=args.eps,
        delta=args.delta,
        mode=args.mode,
        seed=resolve_seed(args.seed, settings),
        c=args.c_const if args.c_const is not None else settings.c_const,
        log_base=args.log_base or settings.log_base,
    )


def _default_out(args, settings: Settings, name: str) -> Path:
    return Path(args.out) if args.out else Path(settings.out_dir) / name

def gen_command(args, settings: Settings) -> int:
    """Handle the gen command."""
    spec = DatasetSpec(
        distribution=args.distribution,
        n=args.n,
        d=args.d,
        seed=resolve_seed(args.seed, settings),
        weighted=args.weighted,
        df=args.df,
        clusters=args.clusters,
        path=args.input,
    )
    wset = generate(spec)
    out = _default_out(args, settings, f"{spec.distribution}-n{spec.n}-d{spec.d}-seed{spec.seed}.csv")
    write_points(out, wset, weighted=args.weighted)
    print(json.dumps({"path": str(out), **describe(wset)}))
    print_success(f"Wrote {wset.n} points to {out}")
    return EXIT_OK

def build_command(args, settings: Settings) -> int:
    """Handle the build command."""
    wset = read_points(args.input, weighted=args.weighted, header=args.header)
    params = _params(args, settings)
    result = build(wset, args.algo, params)
    stem = Path(args.input).stem
    if result.summary is not None:
        out = _default_out(args, settings, f"{stem}.{args.algo}.json")
        write_summary(out, result.summary)
    else:
        out = _default_out(args, settings, f"{stem}.{args.algo}.csv")
        write_coreset(out, result.weights)
        if result.weights.fallback:
            print_warning("Sample size reached n; the coreset is the full input")
    print(json.dumps(result.summary_line()))
    print_success(f"Wrote {args.algo} coreset to {out}")
    return EXIT_OK

def verify_command(args, settings: Settings) -> int:
    """Handle the verify command."""
    wset = read_points(args.input, weighted=args.weighted, header=args.header)
    checks = [c.strip() for c in args.checks.split(",") if c.strip()]
    unknown = [c for c in checks if c not in CHECKS]
    if unknown:
        raise UsageError(f"unknown checks {unknown}; choose from {', '.join(CHECKS)}")
    queries = args.queries if args.queries is not None else settings.queries
    seed = resolve_seed(args.seed, settings)
    if Path(args.coreset).suffix == ".json":
        summary = read_summary(args.coreset)
        report = {"worst_case": summary_strong_error(wset, summary)}
    else:
        u = read_coreset(args.coreset, wset.n)
        report = verify_coreset(wset, u, checks, queries=queries, seed=seed).to_dict()
    print(json.dumps(report))
    print_report(report)
    if args.strict:
        if args.eps is None:
            raise UsageError("--strict needs --eps as the guarantee to check")
        measured = report.get("worst_case")
        if measured is None:
            measured = report.get("weak_ratio")
        if measured is not None and measured > args.eps:
            print_error(f"Guarantee violated: error {measured:.6g} > eps {args.eps}")
            return EXIT_VIOLATION
    return EXIT_OK

def bench_command(args, settings: Settings) -> int:
    """Handle the bench command."""
    seed = resolve_seed(args.seed, settings)
    queries = args.queries if args.queries is not None else settings.queries
    if args.input:
        if not args.algo:
            raise UsageError("bench on an input file needs --algo (comma-separated)")
        profile = None
        algos = [a.strip() for a in args.algo.split(",") if a.strip()]
        try:
            eps_grid = [float(e) for e in args.eps_grid.split(",")]
        except ValueError as exc:
            raise UsageError(f"bad --eps grid {args.eps_grid!r}") from exc
        label = Path(args.input).stem
    else:
        profile = load_profile(args.profile or settings.bench_profile, args.profiles_dir or settings.profiles_dir, seed=args.seed)
        label = profile.name
    with run_log("bench", seed) as run:
        print_header(f"Benchmark: {label}")
        if profile is None:
            wset = read_points(args.input, weighted=args.weighted, header=args.header)
            cells = run_bench(
                wset,
                algos,
                eps_grid,
                delta=args.delta,
                mode=args.mode,
                trials=args.trials or 10,
                seed=seed,
                queries=queries,
                c=args.c_const if args.c_const is not None else settings.c_const,
                log_base=args.log_base or settings.log_base,
                progress=sys.stderr.isatty(),
            )
        else:
            if args.trials is not None:
                profile = replace(profile, trials=args.trials)
            cells = run_profile(profile, progress=sys.stderr.isatty())
        out = _default_out(args, settings, f"bench-{label}")
        json_path, csv_path = write_report(cells, out)
        for cell in cells:
            run.logger.info(
                "%s eps=%s: %s/%s passed, max nnz %s, worst %s",
                cell.algo,
                cell.target_eps,
                cell.success_count,
                cell.trials,
                cell.nnz,
                cell.worst_error,
            )
    print_bench_table([cell.to_row() for cell in cells], title=f"Mean coresets ({label})")
    print_success(f"Report written to {json_path} and {csv_path}")
    print_info(f"Run log: {run.path}")
    bad = violations(cells)
    for cell in bad:
        print_warning(f"{cell.algo} eps={cell.target_eps}: {cell.success_count}/{cell.trials} below floor {cell.success_floor:.1f}")
    if args.strict and bad:
        return EXIT_VIOLATION
    return EXIT_OK

def stream_command(args, settings: Settings) -> int:
    """Handle the stream command."""
    if args.algo not in STREAM_ALGORITHMS:
        raise UsageError(f"stream needs a strong-coreset builder: one of {', '.join(STREAM_ALGORITHMS)}")
    params = _params(args, settings)
    with run_log("stream", params.seed) as run:
        result = stream_file(args.input, args.chunk, args.algo, params, weighted=args.weighted, header=args.header)
        out = _default_out(args, settings, f"{Path(args.input).stem}.stream-{args.algo}.csv")
        write_coreset(out, result.weights)
        wset = read_points(args.input, weighted=args.weighted, header=args.header)
        report = verify_coreset(wset, result.weights, ["worst"])
        bound = 0.0 if args.algo in ACCURATE else result.composition_bound(params.eps)
        run.logger.info(
            "stream %s: n=%s leaves=%s depth=%s (expected %s) nnz=%s worst=%.6g bound=%.6g",
            args.algo,
            result.n,
            result.leaves,
            result.depth,
            expected_depth(result.n, args.chunk),
            result.weights.nnz,
            report.worst_case,
            bound,
        )
    print(json.dumps({
        "algo": args.algo,
        "nnz": result.weights.nnz,
        "depth": result.depth,
        "leaves": result.leaves,
        "worst_case": report.worst_case,
        "bound": bound,
    }))
    if args.algo not in ACCURATE and report.worst_case > bound + 1e-9:
        print_warning(f"Measured error {report.worst_case:.6g} exceeds the composition bound {bound:.6g}")
    print_success(f"Wrote streamed coreset to {out}")
    print_info(f"Run log: {run.path}")
    return EXIT_OK

def _add_build_flags(p: argparse.ArgumentParser, *, eps_default=0.2):
    p.add_argument("--eps", type=float, default=eps_default, help="Approximation parameter eps")
    p.add_argument("--delta", type=float, default=0.1, help="Failure probability delta")
    p.add_argument("--mode", choices=MODES, default="strong", help="Strong or weak guarantee")
    p.add_argument("--c-const", type=float, help="Constant of the sensitivity sample-size bound (MEANCORE_C_CONST)")
    p.add_argument("--log-base", choices=["e", "2", "10"], help="Log base for the median-of-means group count")

def _add_io_flags(p: argparse.ArgumentParser):
    p.add_argument("--weighted", action="store_true", help="Last column of the point file is the weight")
    p.add_argument("--header", action="store_true", help="Skip the first row of the point file")
    p.add_argument("--seed", type=int, help="Random seed (default: MEANCORE_SEED)")
    p.add_argument("--out", help="Output path")

def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(description="Build and verify coresets for the weighted 1-mean problem")
    parser.add_argument("--log-level", help="Logging level (default: LOG_LEVEL or INFO)")
    subparsers = parser.add_subparsers(dest="command", help="Command to run", parser_class=_Parser)

    # Gen command
    gen_parser = subparsers.add_parser("gen", help="Generate a synthetic point file")
    gen_parser.add_argument("--distribution", choices=DISTRIBUTIONS, default="gaussian")
    gen_parser.add_argument("--n", type=int, default=1000, help="Number of points")
    gen_parser.add_argument("--d", type=int, default=2, help="Dimension")
    gen_parser.add_argument("--df", type=float, default=3.0, help="Degrees of freedom for student-t")
    gen_parser.add_argument("--clusters", type=int, default=3, help="Number of centers for clustered")
    gen_parser.add_argument("--input", help="Source file for from-file")
    _add_io_flags(gen_parser)

    # Build command
    build_parser = subparsers.add_parser("build", help="Build a coreset of a point file")
    build_parser.add_argument("input", help="Point file")
    build_parser.add_argument("--algo", choices=ALGORITHMS, required=True)
    _add_build_flags(build_parser)
    _add_io_flags(build_parser)

    # Verify command
    verify_parser = subparsers.add_parser("verify", help="Measure the error of a coreset")
    verify_parser.add_argument("input", help="Point file")
    verify_parser.add_argument("coreset", help="Coreset CSV or stats summary JSON")
    verify_parser.add_argument("--checks", default=",".join(CHECKS), help="Comma-separated checks")
    verify_parser.add_argument("--queries", type=int, help="Random queries for the empirical check")
    verify_parser.add_argument("--eps", type=float, help="Guarantee checked by --strict")
    verify_parser.add_argument("--strict", action="store_true", help="Exit 3 when the error exceeds --eps")
    _add_io_flags(verify_parser)

    # Bench command
    bench_parser = subparsers.add_parser("bench", help="Run a benchmark matrix")
    bench_parser.add_argument("input", nargs="?", help="Point file (otherwise a profile dataset is generated)")
    bench_parser.add_argument("--profile", help="Profile name (default: MEANCORE_BENCH_PROFILE)")
    bench_parser.add_argument("--profiles-dir", help="Profiles directory")
    bench_parser.add_argument("--algo", help="Comma-separated algorithms (with an input file)")
    bench_parser.add_argument("--eps", dest="eps_grid", default="0.5,0.2", help="Comma-separated eps grid")
    bench_parser.add_argument("--delta", type=float, default=0.1)
    bench_parser.add_argument("--mode", choices=MODES, default="strong")
    bench_parser.add_argument("--trials", type=int, help="Trials per cell")
    bench_parser.add_argument("--queries", type=int, help="Random queries for the empirical check")
    bench_parser.add_argument("--c-const", type=float)
    bench_parser.add_argument("--log-base", choices=["e", "2", "10"])
    bench_parser.add_argument("--strict", action="store_true", help="Exit 3 when a cell falls below its success floor")
    _add_io_flags(bench_parser)

    # Stream command
    stream_parser = subparsers.add_parser("stream", help="Merge-reduce a point file chunk by chunk")
    stream_parser.add_argument("input", help="Point file")
    stream_parser.add_argument("--chunk", type=int, required=True, help="Points per chunk")
    stream_parser.add_argument("--algo", choices=STREAM_ALGORITHMS, default="fw")
    _add_build_flags(stream_parser)
    _add_io_flags(stream_parser)

    return parser

COMMANDS = {
    "gen": gen_command,
    "build": build_command,
    "verify": verify_command,
    "bench": bench_command,
    "stream": stream_command,
}

def main(argv=None) -> int:
    """Main entry point for the script."""
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print_error(str(exc))
        return EXIT_USAGE

    if args.command is None:
        parser.print_help()
        return EXIT_USAGE

    # Load environment variables
    load_dotenv()
    settings = Settings.from_env(dotenv=False)
    configure_logging(level=args.log_level)

    if args.command == "bench" and args.trials is not None and args.trials < 1:
        print_error("--trials must be at least 1")
        return EXIT_USAGE

    try:
        return COMMANDS[args.command](args, settings)
    except (UsageError, InvalidArgument) as exc:
        print_error(str(exc))
        return EXIT_USAGE
    except (DataError, CoresetError, OSError) as exc:
        print_error(str(exc))
        return EXIT_DATA

if __name__ == "__main__":
    sys.exit(main())
