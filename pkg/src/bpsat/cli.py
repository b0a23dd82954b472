"""Command line entry point: ``bpsat {solve,bench,estimate,decode,baseline}``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import bench
from .cnf import DimacsError, TriviallyUnsat, read_dimacs
from .engine import EngineConfig
from .factor_graph import from_parity_matrix, read_alist
from .ldpc import ParityInstance, decode, read_priors
from .restart import SolverConfig, solve

EXIT_SAT = 10
EXIT_UNKNOWN = 0
EXIT_INPUT_ERROR = 2


def _engine_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--max-iters", type=int, default=200)
    p.add_argument("--epsilon", type=float, default=1e-6)
    p.add_argument("--damping", type=float, default=0.0)
    p.add_argument("--tol", type=float, default=1e-9, help="convergence tolerance on q")


def _solver_args(p: argparse.ArgumentParser) -> None:
    _engine_args(p)
    p.add_argument("--max-restarts", type=int, default=49)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--all-random", action="store_true",
                   help="random start for the first attempt too")


def _spi_args(p: argparse.ArgumentParser) -> None:
    d = bench.SpiModel()
    p.add_argument("--spi-codeword", type=float, default=d.codeword_length)
    p.add_argument("--spi-throughput", type=float, default=d.throughput)
    p.add_argument("--spi-iters", type=float, default=d.reference_iterations)


def _engine_config(a) -> EngineConfig:
    return EngineConfig(max_iterations=a.max_iters, epsilon=a.epsilon,
                        convergence_tol=a.tol, damping=a.damping)


def _solver_config(a) -> SolverConfig:
    return SolverConfig(engine=_engine_config(a), max_restarts=a.max_restarts, seed=a.seed,
                        restart_policy="all_random" if a.all_random else
                        "uniform_first_then_random")


def _spi_model(a) -> bench.SpiModel:
    return bench.SpiModel(a.spi_codeword, a.spi_throughput, a.spi_iters)


def cmd_solve(a) -> int:
    try:
        f = read_dimacs(a.file)
    except TriviallyUnsat as exc:
        print(f"c input contains an empty clause: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except (OSError, DimacsError, UnicodeDecodeError) as exc:
        print(f"c input error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    out = solve(f, _solver_config(a))
    print(f"c vars {f.num_vars} clauses {f.num_clauses} tautologies_dropped {f.tautologies_dropped}")
    print(f"c attempts {out.num_attempts} iterations {out.total_iterations}")
    for k, att in enumerate(out.attempts, start=1):
        print(f"c attempt {k}: {att.reason.value} after {att.iterations} ({att.init})")
    if out.sat:
        print("s SATISFIABLE")
        print("v " + " ".join(map(str, out.assignment.to_literals())) + " 0")
        return EXIT_SAT
    print("s UNKNOWN")
    return EXIT_UNKNOWN


def cmd_bench(a) -> int:
    try:
        if a.gen:
            instances = bench.generate(bench.GenSpec.parse(s, a.seed) for s in a.gen)
        elif a.dir:
            instances = bench.scan_directory(a.dir)
        else:
            print("bench: give a directory or --gen n,m,count", file=sys.stderr)
            return EXIT_INPUT_ERROR
        baseline = bench.read_baseline(a.baseline) if a.baseline else None
        model = _spi_model(a)
        config = _solver_config(a)
    except (OSError, ValueError) as exc:
        print(f"bench: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    report = bench.run_bench(instances, config, baseline, model, jobs=a.jobs)
    out = Path(a.out)
    bench.write_report_csv(report, out)
    detail = Path(a.detail) if a.detail else bench.detail_path_for(out)
    bench.write_detail_csv(report, detail)
    for row in report.classes:
        mi = "-" if row.mean_iters is None else f"{row.mean_iters:.2f}"
        sp = "-" if row.mean_speedup is None else f"{row.mean_speedup:.4g}"
        print(f"{row.cls:>16}  {row.solved:4d}/{row.total:<4d} "
              f"completeness {row.completeness:.3f}  mean_iters {mi}  speedup {sp}")
    print(f"wrote {out} and {detail}")
    return 0


def cmd_estimate(a) -> int:
    try:
        model = _spi_model(a)
        s = bench.estimate_speedup(a.t_baseline, a.iters, model)
    except ValueError as exc:
        print(f"estimate: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    print(f"spi {bench.spi(model):.6e} s/iter")
    print(f"hw_seconds {a.iters * bench.spi(model):.6e}")
    print(f"speedup {s:.6g}")
    return 0


def cmd_decode(a) -> int:
    try:
        inst = ParityInstance(from_parity_matrix(read_alist(a.alist)), read_priors(a.priors))
    except (OSError, ValueError) as exc:
        print(f"decode: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    res = decode(inst, _engine_config(a))
    if res.ok:
        print("codeword " + "".join(map(str, res.bits.tolist())))
        print(f"iterations {res.iterations}")
        return 0
    print(f"failed after {res.iterations} iterations")
    return 1


def cmd_baseline(a) -> int:
    paths = sorted(Path(a.dir).rglob("*.cnf"))
    if not paths:
        print(f"baseline: no .cnf files under {a.dir}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    times = bench.measure_baseline(paths, a.solver, a.timeout)
    with open(a.out, "w") as fh:
        for name, secs in times.items():
            fh.write(f"{name} {secs!r}\n")
    print(f"wrote {len(times)} timings to {a.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bpsat", description="Belief-propagation SAT solver")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("solve", help="solve one DIMACS file")
    p.add_argument("file")
    _solver_args(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("bench", help="run a benchmark and write CSV reports")
    p.add_argument("dir", nargs="?")
    p.add_argument("--gen", action="append", metavar="N,M,COUNT",
                   help="generated random 3-SAT class (repeatable)")
    p.add_argument("--baseline", help="file of 'instance seconds' lines")
    p.add_argument("--out", default="report.csv")
    p.add_argument("--detail", help="per-instance CSV (default: <out>_detail.csv)")
    p.add_argument("--jobs", type=int, default=1)
    _solver_args(p)
    _spi_args(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("estimate", help="estimated hardware speedup")
    p.add_argument("--t-baseline", type=float, required=True, metavar="SEC")
    p.add_argument("--iters", type=float, required=True)
    _spi_args(p)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("decode", help="XOR-check BP decoding of an alist code")
    p.add_argument("alist")
    p.add_argument("priors")
    _engine_args(p)
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("baseline", help="time an external solver to build a baseline file")
    p.add_argument("dir")
    p.add_argument("--solver", required=True, help="command line, the file path is appended")
    p.add_argument("--out", default="baseline.txt")
    p.add_argument("--timeout", type=float)
    p.set_defaults(func=cmd_baseline)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    a = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if a.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return a.func(a)
    except ValueError as exc:  # bad flag values surface from config validation
        print(f"{a.cmd}: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
