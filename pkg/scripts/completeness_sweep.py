#!/usr/bin/env python3
"""Completeness and iteration counts across instance sizes, with and without restarts.

Writes one report/detail CSV pair per restart setting, e.g.

    python scripts/completeness_sweep.py --ratio 4.26 --count 100 --out-dir results/
"""
import argparse
import time
from pathlib import Path

from bpsat.bench import GenSpec, generate, run_bench, write_detail_csv, write_report_csv
from bpsat.restart import SolverConfig


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", default="20,50,75,100")
    ap.add_argument("--ratio", type=float, default=4.26)
    ap.add_argument("--count", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--restarts", default="0,49", help="max_restarts values to compare")
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out-dir", default="results")
    args = ap.parse_args()

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    sizes = [int(s) for s in args.sizes.split(",")]
    specs = [GenSpec(n, round(args.ratio * n), args.count, args.seed) for n in sizes]
    instances = generate(specs)

    for r in (int(x) for x in args.restarts.split(",")):
        t0 = time.perf_counter()
        rep = run_bench(instances, SolverConfig(max_restarts=r, seed=args.seed), jobs=args.jobs)
        tag = f"ratio{args.ratio:g}_restarts{r}"
        write_report_csv(rep, out / f"{tag}.csv")
        write_detail_csv(rep, out / f"{tag}_detail.csv")
        print(f"max_restarts={r}  ({time.perf_counter() - t0:.1f}s)")
        for row in rep.classes:
            mi = "-" if row.mean_iters is None else f"{row.mean_iters:7.1f}"
            mf = "-" if row.mean_final_iters is None else f"{row.mean_final_iters:6.1f}"
            print(f"  {row.cls:>12}  completeness {row.completeness:.2f}  "
                  f"mean_iters {mi}  solving-attempt {mf}")


if __name__ == "__main__":
    main()
