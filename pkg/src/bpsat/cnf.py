"""CNF formulas: DIMACS I/O, assignment checking, model counting, random 3-SAT.

Literals are DIMACS-style signed integers throughout: ``3`` is x3, ``-3`` is
its negation. :class:`Literal` exists for callers that prefer named fields.
"""

from __future__ import annotations

import hashlib
import io
import os
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence, Union

import numpy as np

MAX_COUNT_VARS = 26


class DimacsError(ValueError):
    """Malformed DIMACS input."""


class TriviallyUnsat(DimacsError):
    """The input contains an empty clause, which no assignment satisfies."""


class Literal(NamedTuple):
    variable: int
    positive: bool

    @classmethod
    def from_int(cls, lit: int) -> "Literal":
        if lit == 0:
            raise ValueError("0 is not a literal")
        return cls(abs(lit), lit > 0)

    def to_int(self) -> int:
        return self.variable if self.positive else -self.variable


@dataclass(frozen=True)
class CnfFormula:
    num_vars: int
    clauses: tuple[tuple[int, ...], ...]
    declared_clauses: int | None = None
    tautologies_dropped: int = 0
    duplicates_dropped: int = 0

    def __post_init__(self):
        if self.num_vars < 0:
            raise ValueError("num_vars must be non-negative")
        clauses = tuple(tuple(int(l) for l in c) for c in self.clauses)
        for i, clause in enumerate(clauses):
            if not clause:
                raise TriviallyUnsat(f"clause {i + 1} is empty")
            seen = set()
            for lit in clause:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise ValueError(
                        f"clause {i + 1}: literal {lit} outside 1..{self.num_vars}")
                if -lit in seen:
                    raise ValueError(f"clause {i + 1} is tautological")
                if lit in seen:
                    raise ValueError(f"clause {i + 1} repeats literal {lit}")
                seen.add(lit)
        object.__setattr__(self, "clauses", clauses)

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)

    def literals(self, clause_index: int) -> list[Literal]:
        return [Literal.from_int(l) for l in self.clauses[clause_index]]

    def to_dimacs(self) -> str:
        out = [f"p cnf {self.num_vars} {len(self.clauses)}"]
        out.extend(" ".join(map(str, c)) + " 0" for c in self.clauses)
        return "\n".join(out) + "\n"

    @classmethod
    def from_clauses(cls, num_vars: int, clauses: Iterable[Iterable[int]]) -> "CnfFormula":
        """Normalize raw clauses (dedup literals, drop tautologies) into a formula."""
        kept, taut, dup = _normalize(clauses)
        return cls(num_vars, kept, tautologies_dropped=taut, duplicates_dropped=dup)


@dataclass(frozen=True)
class Assignment:
    """One bit per variable; ``values[j - 1]`` is the value of x_j."""

    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.uint8).copy()
        if v.ndim != 1 or np.any(v > 1):
            raise ValueError("assignment must be a 1-D array of bits")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def zeros(cls, num_vars: int) -> "Assignment":
        return cls(np.zeros(num_vars, dtype=np.uint8))

    @classmethod
    def from_bits(cls, bits: str) -> "Assignment":
        return cls(np.array([int(b) for b in bits], dtype=np.uint8))

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, var: int) -> int:
        if var < 1:
            raise IndexError("variables are 1-based")
        return int(self.values[var - 1])

    def __eq__(self, other) -> bool:
        return isinstance(other, Assignment) and np.array_equal(self.values, other.values)

    def __hash__(self):
        return hash(self.values.tobytes())

    def bits(self) -> str:
        return "".join("1" if b else "0" for b in self.values)

    def digest(self) -> str:
        return hashlib.sha256(self.bits().encode()).hexdigest()[:16]

    def to_literals(self) -> list[int]:
        return [j if b else -j for j, b in enumerate(self.values, start=1)]


@dataclass(frozen=True)
class VerifyResult:
    satisfied: bool
    failing_clause: int | None = None  # 1-based

    def __bool__(self) -> bool:
        return self.satisfied


def _normalize(clauses: Iterable[Iterable[int]]):
    kept = []
    taut = dup = 0
    for clause in clauses:
        lits = list(clause)
        uniq = list(dict.fromkeys(lits))
        dup += len(lits) - len(uniq)
        present = set(uniq)
        if any(-l in present for l in uniq):
            taut += 1
            continue
        kept.append(tuple(uniq))
    return kept, taut, dup


def parse_dimacs(source: Union[str, bytes, io.IOBase]) -> CnfFormula:
    """Parse DIMACS CNF text into a normalized formula.

    Accepts ``str``, ``bytes`` or a readable stream. A line holding a single
    ``%`` ends the clause section, as in the SATLIB uniform random files.
    """
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, bytes):
        source = source.decode("ascii", errors="strict")

    header = None
    raw: list[list[int]] = []
    current: list[int] = []
    finished = False
    for lineno, line in enumerate(source.splitlines(), start=1):
        s = line.strip()
        if not s or s.startswith("c"):
            continue
        if finished:
            # SATLIB files carry a stray "0" after the "%" marker
            if s == "0":
                continue
            raise DimacsError(f"line {lineno}: trailing data after end marker")
        if s.startswith("p"):
            if header is not None:
                raise DimacsError(f"line {lineno}: duplicate header")
            parts = s.split()
            if len(parts) != 4 or parts[0] != "p" or parts[1] != "cnf":
                raise DimacsError(f"line {lineno}: malformed header {s!r}")
            try:
                nv, nc = int(parts[2]), int(parts[3])
            except ValueError:
                raise DimacsError(f"line {lineno}: malformed header {s!r}") from None
            if nv < 0 or nc < 0:
                raise DimacsError(f"line {lineno}: negative counts in header")
            header = (nv, nc)
            continue
        if header is None:
            raise DimacsError(f"line {lineno}: clause data before 'p cnf' header")
        if s == "%":
            finished = True
            continue
        for tok in s.split():
            try:
                lit = int(tok)
            except ValueError:
                raise DimacsError(f"line {lineno}: bad token {tok!r}") from None
            if lit == 0:
                if not current:
                    raise TriviallyUnsat(f"line {lineno}: empty clause")
                raw.append(current)
                current = []
            else:
                if abs(lit) > header[0]:
                    raise DimacsError(
                        f"line {lineno}: literal {lit} exceeds declared {header[0]} variables")
                current.append(lit)
    if header is None:
        raise DimacsError("missing 'p cnf' header")
    if current:
        raise DimacsError("last clause is not terminated by 0")
    if len(raw) > header[1]:
        raise DimacsError(f"{len(raw)} clauses found, header declares {header[1]}")

    kept, taut, dup = _normalize(raw)
    return CnfFormula(header[0], kept, declared_clauses=header[1],
                      tautologies_dropped=taut, duplicates_dropped=dup)


def read_dimacs(path: Union[str, os.PathLike]) -> CnfFormula:
    with open(path, "rb") as fh:
        return parse_dimacs(fh.read())


def write_dimacs(formula: CnfFormula, path: Union[str, os.PathLike]) -> None:
    with open(path, "w") as fh:
        fh.write(formula.to_dimacs())


def verify(formula: CnfFormula, assignment: Assignment) -> VerifyResult:
    if len(assignment) != formula.num_vars:
        raise ValueError(
            f"assignment covers {len(assignment)} variables, formula has {formula.num_vars}")
    vals = assignment.values
    for i, clause in enumerate(formula.clauses):
        for lit in clause:
            if vals[abs(lit) - 1] == (lit > 0):
                break
        else:
            return VerifyResult(False, i + 1)
    return VerifyResult(True)


def count_models(formula: CnfFormula, chunk_bits: int = 20) -> int:
    """Exact model count by exhaustive enumeration (at most 26 variables)."""
    n = formula.num_vars
    if n > MAX_COUNT_VARS:
        raise ValueError(f"{n} variables exceeds enumeration limit {MAX_COUNT_VARS}")
    if not formula.clauses:
        return 1 << n
    low = min(n, chunk_bits)
    high = n - low
    codes = np.arange(1 << low, dtype=np.int64)
    low_cols = [((codes >> k) & 1).astype(bool) for k in range(low)]
    all_true = np.ones(len(codes), dtype=bool)
    total = 0
    for hi in range(1 << high):
        cols = low_cols + [all_true if (hi >> k) & 1 else ~all_true for k in range(high)]
        ok = all_true.copy()
        for clause in formula.clauses:
            sat = np.zeros(len(codes), dtype=bool)
            for lit in clause:
                sat |= cols[lit - 1] if lit > 0 else ~cols[-lit - 1]
            ok &= sat
        total += int(np.count_nonzero(ok))
    return total


def gen_random_3sat(n: int, m: int, seed: int) -> CnfFormula:
    """Uniform random 3-SAT: 3 distinct variables per clause, fair-coin signs."""
    if n < 3:
        raise ValueError("need at least 3 variables")
    if m < 0:
        raise ValueError("clause count must be non-negative")
    rng = np.random.default_rng(seed)
    clauses = []
    for _ in range(m):
        vs = rng.choice(n, size=3, replace=False) + 1
        signs = rng.integers(0, 2, size=3)
        clauses.append(tuple(int(v) if s else -int(v) for v, s in zip(vs, signs)))
    return CnfFormula(n, tuple(clauses), declared_clauses=m)


def evaluate(clauses: Sequence[Sequence[int]], bits: Sequence[int]) -> bool:
    """Plain Boolean evaluation of raw (unnormalized) clauses under 0/1 ``bits``."""
    return all(any(bool(bits[abs(l) - 1]) == (l > 0) for l in c) for c in clauses)
