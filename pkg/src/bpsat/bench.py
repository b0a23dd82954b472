"""Benchmark harness: completeness, iteration statistics and hardware-time estimates."""

from __future__ import annotations

import csv
import hashlib
import logging
import math
import os
import re
import shlex
import statistics
import subprocess
import time
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

from .cnf import CnfFormula, DimacsError, gen_random_3sat, read_dimacs
from .restart import SolverConfig, derive_seed, solve_batch

log = logging.getLogger(__name__)

PathLike = Union[str, os.PathLike]


@dataclass(frozen=True)
class SpiModel:
    """Seconds-per-iteration model of an LDPC decoder pipeline.

    Defaults are the FPGA decoder figures: 3969-symbol codewords at 1417 Msym/s
    with 15 decoding iterations.
    """

    codeword_length: float = 3969
    throughput: float = 1417e6
    reference_iterations: float = 15

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise ValueError(f"{f.name} must be positive, got {v!r}")


def spi(model: SpiModel = SpiModel()) -> float:
    return model.codeword_length / (model.throughput * model.reference_iterations)


def estimate_speedup(t_baseline: float, iterations: float, model: SpiModel = SpiModel()) -> float:
    """Baseline wall time over the modeled hardware time ``iterations * spi``."""
    if not t_baseline > 0:
        raise ValueError("baseline time must be positive")
    if not iterations >= 1:
        raise ValueError("iterations must be >= 1")
    return t_baseline / (iterations * spi(model))


# ---------------------------------------------------------------- instances

_CLASS_RE = re.compile(r"^(.*)-\d+\.cnf$")


def class_name(filename: str) -> str:
    """``uf20-01.cnf`` -> ``uf20``; names without a numeric suffix keep their stem."""
    base = os.path.basename(filename)
    m = _CLASS_RE.match(base)
    return m.group(1) if m else Path(base).stem


@dataclass(frozen=True)
class GenSpec:
    n: int
    m: int
    count: int
    seed: int = 0

    @classmethod
    def parse(cls, text: str, seed: int = 0) -> "GenSpec":
        try:
            n, m, count = (int(x) for x in text.split(","))
        except ValueError:
            raise ValueError(f"generator spec must be 'n,m,count', got {text!r}") from None
        return cls(n, m, count, seed)

    @property
    def class_name(self) -> str:
        return f"gen{self.n}-{self.m}"

    def instance(self, k: int) -> tuple[str, str, CnfFormula]:
        s = derive_seed(self.seed, self.n, self.m, k)
        name = f"{self.class_name}-{k:04d}"
        return name, f"gen:{self.n},{self.m},{s}", gen_random_3sat(self.n, self.m, s)


@dataclass(frozen=True)
class Instance:
    cls: str
    name: str
    source: str
    formula: Optional[CnfFormula]
    error: Optional[str] = None


def load_source(source: str) -> CnfFormula:
    """Rebuild a formula from a detail-row ``source`` field."""
    if source.startswith("gen:"):
        n, m, s = (int(x) for x in source[4:].split(","))
        return gen_random_3sat(n, m, s)
    return read_dimacs(source)


def scan_directory(root: PathLike) -> list[Instance]:
    root = Path(root)
    if not root.is_dir():
        raise FileNotFoundError(f"not a directory: {root}")
    out = []
    for path in sorted(root.rglob("*.cnf")):
        name = path.relative_to(root).with_suffix("").as_posix()
        try:
            out.append(Instance(class_name(path.name), name, str(path), read_dimacs(path)))
        except (OSError, DimacsError, UnicodeDecodeError) as exc:
            log.warning("skipping %s: %s", path, exc)
            out.append(Instance(class_name(path.name), name, str(path), None,
                                f"{type(exc).__name__}: {exc}"))
    return out


def generate(specs: Iterable[GenSpec]) -> list[Instance]:
    out = []
    for spec in specs:
        for k in range(spec.count):
            name, source, f = spec.instance(k)
            out.append(Instance(spec.class_name, name, source, f))
    return out


# ---------------------------------------------------------------- baselines

def parse_baseline(text: str) -> dict[str, float]:
    """Two columns per line, instance name and seconds (whitespace or comma)."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = [p for p in re.split(r"[,\s]+", line) if p]
        if len(parts) != 2:
            raise ValueError(f"baseline line {lineno}: expected 'name seconds'")
        try:
            secs = float(parts[1])
        except ValueError:
            if lineno == 1:
                continue  # header row
            raise ValueError(f"baseline line {lineno}: bad seconds {parts[1]!r}") from None
        out[parts[0]] = secs
    return out


def read_baseline(path: PathLike) -> dict[str, float]:
    with open(path) as fh:
        return parse_baseline(fh.read())


def _baseline_keys(inst: Instance) -> list[str]:
    keys = [inst.name, Path(inst.name).name]
    if not inst.source.startswith("gen:"):
        keys.append(Path(inst.source).name)
    return keys


def match_baseline(instances: Sequence[Instance], baseline: dict[str, float]) -> dict[str, float]:
    """Map instance name -> baseline seconds; unknown baseline entries are warned and ignored."""
    matched, used = {}, set()
    for inst in instances:
        for key in _baseline_keys(inst):
            if key in baseline:
                matched[inst.name] = baseline[key]
                used.add(key)
                break
    unknown = sorted(set(baseline) - used)
    if unknown:
        log.warning("baseline names %d unknown instance(s), ignored: %s",
                    len(unknown), ", ".join(unknown[:5]) + (" ..." if len(unknown) > 5 else ""))
    return matched


def measure_baseline(paths: Sequence[PathLike], solver_cmd: str,
                     timeout: Optional[float] = None) -> dict[str, float]:
    """Time an external solver (``solver_cmd <file>``) on each file, wall clock."""
    argv = shlex.split(solver_cmd)
    out = {}
    for p in paths:
        t0 = time.perf_counter()
        proc = subprocess.run(argv + [str(p)], stdout=subprocess.DEVNULL,
                              stderr=subprocess.DEVNULL, timeout=timeout)
        elapsed = time.perf_counter() - t0
        if proc.returncode not in (0, 10, 20):
            log.warning("%s exited with %d on %s", argv[0], proc.returncode, p)
        out[Path(p).name] = elapsed
    return out


# ---------------------------------------------------------------- report

@dataclass(frozen=True)
class ClassRow:
    cls: str
    total: int
    solved: int
    completeness: float
    mean_iters: Optional[float]
    median_iters: Optional[float]
    mean_hw_seconds: Optional[float]
    mean_baseline_seconds: Optional[float]
    mean_speedup: Optional[float]
    mean_final_iters: Optional[float] = None


@dataclass(frozen=True)
class DetailRow:
    cls: str
    instance: str
    source: str
    num_vars: int
    num_clauses: int
    status: str
    attempts: int
    iterations: int
    hw_seconds: Optional[float]
    baseline_seconds: Optional[float]
    speedup: Optional[float]
    assignment_hash: str
    assignment: str
    final_iters: int = 0


@dataclass(frozen=True)
class BenchReport:
    classes: tuple[ClassRow, ...]
    details: tuple[DetailRow, ...]

    def by_class(self) -> dict[str, ClassRow]:
        return {c.cls: c for c in self.classes}


def _mean(xs):
    return statistics.fmean(xs) if xs else None


def _median(xs):
    return float(statistics.median(xs)) if xs else None


def _natural_key(name: str):
    return [int(t) if t.isdigit() else t for t in re.split(r"(\d+)", name)]


def summarize(details: Sequence[DetailRow]) -> tuple[ClassRow, ...]:
    groups: dict[str, list[DetailRow]] = {}
    for d in details:
        groups.setdefault(d.cls, []).append(d)
    rows = []
    for cls in sorted(groups, key=_natural_key):
        rs = [d for d in groups[cls] if d.status != "ERROR"]
        solved = [d for d in rs if d.status == "SAT"]
        its = [d.iterations for d in solved]
        rows.append(ClassRow(
            cls=cls,
            total=len(rs),
            solved=len(solved),
            completeness=len(solved) / len(rs) if rs else 0.0,
            mean_iters=_mean(its),
            median_iters=_median(its),
            mean_hw_seconds=_mean([d.hw_seconds for d in solved]),
            mean_baseline_seconds=_mean([d.baseline_seconds for d in solved
                                         if d.baseline_seconds is not None]),
            mean_speedup=_mean([d.speedup for d in solved if d.speedup is not None]),
            mean_final_iters=_mean([d.final_iters for d in solved]),
        ))
    return tuple(rows)


def run_bench(instances: Sequence[Instance], config: SolverConfig = SolverConfig(),
              baseline: Optional[dict[str, float]] = None, model: SpiModel = SpiModel(),
              jobs: int = 1) -> BenchReport:
    """Solve every instance and aggregate per class.

    Each instance's seed derives from its name, so results are independent of
    ordering and of ``jobs``.
    """
    base = match_baseline(instances, baseline) if baseline else {}
    good = [i for i in instances if i.formula is not None]
    keys = [_name_key(i.name) for i in good]
    outcomes = dict(zip((i.name for i in good),
                        solve_batch([i.formula for i in good], config, keys, jobs=jobs)))
    per_iter = spi(model)
    details = []
    for inst in instances:
        if inst.formula is None:
            details.append(DetailRow(inst.cls, inst.name, inst.source, 0, 0, "ERROR",
                                     0, 0, None, base.get(inst.name), None, "", ""))
            continue
        out = outcomes[inst.name]
        hw = speed = None
        bits = digest = ""
        if out.sat:
            bits, digest = out.assignment.bits(), out.assignment.digest()
            iters = max(out.total_iterations, 1)
            hw = iters * per_iter
            if inst.name in base:
                speed = estimate_speedup(base[inst.name], iters, model)
        details.append(DetailRow(
            inst.cls, inst.name, inst.source, inst.formula.num_vars, inst.formula.num_clauses,
            out.status, out.num_attempts, out.total_iterations, hw, base.get(inst.name),
            speed, digest, bits, out.final_iterations))
    details.sort(key=lambda d: (_natural_key(d.cls), d.instance))
    return BenchReport(summarize(details), tuple(details))


def _name_key(name: str) -> int:
    return int.from_bytes(hashlib.sha256(name.encode()).digest()[:8], "big")


# ---------------------------------------------------------------- CSV

def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _write_rows(rows, cls, path: PathLike) -> None:
    names = [f.name for f in fields(cls)]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["class" if n == "cls" else n for n in names])
        for r in rows:
            w.writerow([_fmt(v) for v in asdict(r).values()])


def _read_rows(cls, path: PathLike):
    types = {f.name: f.type for f in fields(cls)}
    out = []
    with open(path, newline="") as fh:
        for rec in csv.DictReader(fh):
            kw = {}
            for key, raw in rec.items():
                name = "cls" if key == "class" else key
                t = str(types[name])
                if "Optional" in t and raw == "":
                    kw[name] = None
                elif "float" in t:
                    kw[name] = float(raw)
                elif "int" in t:
                    kw[name] = int(raw)
                else:
                    kw[name] = raw
            out.append(cls(**kw))
    return tuple(out)


def write_report_csv(report: BenchReport, path: PathLike) -> None:
    _write_rows(report.classes, ClassRow, path)


def write_detail_csv(report: BenchReport, path: PathLike) -> None:
    _write_rows(report.details, DetailRow, path)


def read_report_csv(path: PathLike) -> tuple[ClassRow, ...]:
    return _read_rows(ClassRow, path)


def read_detail_csv(path: PathLike) -> tuple[DetailRow, ...]:
    return _read_rows(DetailRow, path)


def detail_path_for(report_path: PathLike) -> Path:
    p = Path(report_path)
    return p.with_name(p.stem + "_detail" + p.suffix)
