"""Command-line driver.

Exit codes: 0 estimate, 1 parse or usage error, 2 abort, 3 resource limit.
The ``solve``, ``mc`` and ``sample`` subcommands speak the external-oracle
protocols, so this package can serve as its own external oracle.
"""

from __future__ import annotations

import argparse
import random
import sys
from pathlib import Path

from .counting import ExactCounter, HashCounter
from .formula import FormatError, ProjectedFormula, parse_dimacs
from .harness import EXIT_ERROR, RunConfig, RunRecord, bench, records_to_csv, run_instance
from .sampling import ExactSampler, HashSampler, UnsatisfiableError
from .sat import solve, write_solver_output


def _add_limits(p: argparse.ArgumentParser) -> None:
    p.add_argument("--max-sat-calls", type=int, default=None)
    p.add_argument("--timeout-s", type=float, default=None)


def _add_params(p: argparse.ArgumentParser) -> None:
    p.add_argument("--epsilon", type=float, default=0.8)
    p.add_argument("--delta", type=float, default=0.4)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--oracle", default="exact", help="exact | hash | external:<cmd>")
    p.add_argument("--sampler", default=None, help="exact | hash | external:<cmd> (default follows --oracle)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="skolemcount", description="Count Skolem functions of a specification.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("count", help="approximate log Skolem count")
    p.add_argument("path")
    _add_params(p)
    p.add_argument("--log-base", choices=["e", "2"], default="e")
    _add_limits(p)

    p = sub.add_parser("baseline", help="exact log Skolem count by enumeration")
    p.add_argument("path")
    p.add_argument("--max-models", type=int, default=None)
    p.add_argument("--log-base", choices=["e", "2"], default="e")
    _add_limits(p)

    p = sub.add_parser("brute", help="exact count by truth table (tiny instances)")
    p.add_argument("path")
    p.add_argument("--log-base", choices=["e", "2"], default="e")

    p = sub.add_parser("bench", help="run a directory of instances and write CSV")
    p.add_argument("directory")
    p.add_argument("--mode", choices=["skolemfc", "baseline", "both"], default="both")
    _add_params(p)
    p.add_argument("--max-models", type=int, default=None)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--output", "-o", default=None, help="CSV path (default stdout)")
    _add_limits(p)

    p = sub.add_parser("solve", help="DIMACS SAT solver (exit 10 sat, 20 unsat)")
    p.add_argument("path", nargs="?", default="-")

    p = sub.add_parser("mc", help="projected model counter over 'c ind' DIMACS")
    p.add_argument("path", nargs="?", default="-")
    p.add_argument("--approx", action="store_true")
    p.add_argument("--epsilon", type=float, default=0.8)
    p.add_argument("--delta", type=float, default=0.2)
    p.add_argument("--seed", type=int, default=1)

    p = sub.add_parser("sample", help="projected sampler over 'c ind' DIMACS")
    p.add_argument("path", nargs="?", default="-")
    p.add_argument("-n", "--num", type=int, default=1)
    p.add_argument("--hash", action="store_true")
    p.add_argument("--seed", type=int, default=1)
    return parser


def _read(path: str) -> str:
    return sys.stdin.read() if path == "-" else Path(path).read_text()


def _read_projected(path: str) -> ProjectedFormula:
    cnf, proj = parse_dimacs(_read(path))
    return ProjectedFormula(cnf, tuple(proj) if proj is not None else tuple(range(1, cnf.num_vars + 1)))


def print_record(rec: RunRecord, log_base: str = "e", out=None) -> None:
    out = out or sys.stdout
    print(f"s {rec.status}", file=out)
    if rec.message:
        print(f"c {rec.message}", file=out)
    lc = rec.log_count
    if lc is not None:
        print(f"estimate {(lc.ln if log_base == 'e' else lc.log2)!r}", file=out)
        print(f"estimate_ln {lc.ln!r}", file=out)
        print(f"estimate_log2 {lc.log2!r}", file=out)
        if lc.exact is not None:
            print(f"exact_count {lc.exact}", file=out)
    st = rec.stats
    for key in ("t", "sat_calls", "count_calls", "sample_calls", "clamped"):
        print(f"{key} {getattr(st, key)}", file=out)
    print(f"wall_time_s {st.wall_time:.3f}", file=out)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except (FormatError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


def _dispatch(args: argparse.Namespace) -> int:
    if args.command in ("count", "baseline", "brute", "bench"):
        cfg = RunConfig(**{k: getattr(args, k) for k in RunConfig.__dataclass_fields__ if hasattr(args, k)})

    if args.command in ("count", "baseline", "brute"):
        mode = "skolemfc" if args.command == "count" else args.command
        rec = run_instance(args.path, mode, cfg)
        if rec.status == "error":
            print(f"error: {rec.message}", file=sys.stderr)
        else:
            print_record(rec, args.log_base)
        return rec.exit_code

    if args.command == "bench":
        if not Path(args.directory).is_dir():
            raise OSError(f"not a directory: {args.directory}")
        modes = ["skolemfc", "baseline"] if args.mode == "both" else [args.mode]
        text = records_to_csv(bench(args.directory, modes, cfg, jobs=args.jobs))
        if args.output:
            Path(args.output).write_text(text, newline="")
        else:
            sys.stdout.write(text)
        return 0

    if args.command == "solve":
        cnf, _ = parse_dimacs(_read(args.path))
        text, code = write_solver_output(solve(cnf))
        sys.stdout.write(text)
        return code

    if args.command == "mc":
        pf = _read_projected(args.path)
        if args.approx:
            res = HashCounter().count(pf, args.epsilon, args.delta, args.seed)
        else:
            res = ExactCounter().count(pf)
        print(res.count)
        return 0

    if args.command == "sample":
        pf = _read_projected(args.path)
        sampler = HashSampler() if args.hash else ExactSampler()
        rng = random.Random(args.seed)
        try:
            for _ in range(args.num):
                got = sampler.sample(pf, 0.16, rng.getrandbits(63)).assignment
                print(" ".join(str(v if got[v] else -v) for v in pf.projection) + " 0")
        except UnsatisfiableError as exc:
            print(f"c {exc}", file=sys.stderr)
            return 20
        return 0
    raise AssertionError(args.command)


if __name__ == "__main__":
    sys.exit(main())
