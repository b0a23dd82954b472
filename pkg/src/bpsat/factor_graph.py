"""Bipartite check/variable graphs built from CNF formulas or parity-check matrices.

Node indices are 0-based internally. Each edge carries a polarity: ``POSITIVE``
or ``NEGATED`` for clause literals, ``PARITY`` for rows of a matrix H.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Union

import numpy as np

from .cnf import CnfFormula

POSITIVE = 1
NEGATED = -1
PARITY = 0


@dataclass(frozen=True, eq=False)
class FactorGraph:
    num_vars: int
    num_checks: int
    edge_check: np.ndarray      # (E,) check index of each edge
    edge_var: np.ndarray        # (E,) variable index of each edge
    edge_polarity: np.ndarray   # (E,) POSITIVE / NEGATED / PARITY
    check_edges: tuple          # per check: array of edge ids
    var_edges: tuple            # per variable: array of edge ids
    # padded (node, max_degree) edge-id tables, -1 = empty slot
    check_table: np.ndarray
    var_table: np.ndarray

    @property
    def num_edges(self) -> int:
        return len(self.edge_check)

    @property
    def is_parity(self) -> bool:
        return self.num_edges > 0 and bool(np.all(self.edge_polarity == PARITY))

    def check_degrees(self) -> np.ndarray:
        return np.bincount(self.edge_check, minlength=self.num_checks)

    def var_degrees(self) -> np.ndarray:
        return np.bincount(self.edge_var, minlength=self.num_vars)

    def edges(self) -> list[tuple[int, int, int]]:
        return list(zip(self.edge_check.tolist(), self.edge_var.tolist(),
                        self.edge_polarity.tolist()))

    def to_clauses(self) -> list[tuple[int, ...]]:
        """Signed 1-based literals per check, in edge order."""
        if self.is_parity:
            raise ValueError("parity graph has no clause literals")
        return [tuple(int(self.edge_var[e] + 1) * int(self.edge_polarity[e])
                      for e in es) for es in self.check_edges]

    def to_matrix(self) -> np.ndarray:
        H = np.zeros((self.num_checks, self.num_vars), dtype=np.uint8)
        H[self.edge_check, self.edge_var] = 1
        return H


def _padded(groups: list[np.ndarray]) -> np.ndarray:
    width = max((len(g) for g in groups), default=0)
    table = np.full((len(groups), max(width, 1)), -1, dtype=np.int64)
    for k, g in enumerate(groups):
        table[k, :len(g)] = g
    return table


def _build(num_vars: int, num_checks: int, checks, vars_, pols) -> FactorGraph:
    checks = np.asarray(checks, dtype=np.int64)
    vars_ = np.asarray(vars_, dtype=np.int64)
    pols = np.asarray(pols, dtype=np.int8)
    pairs = set(zip(checks.tolist(), vars_.tolist()))
    if len(pairs) != len(checks):
        raise ValueError("duplicate (check, variable) edge")
    eids = np.arange(len(checks))
    check_edges = tuple(eids[checks == i] for i in range(num_checks))
    # stable sort keeps per-variable edges in check order
    order = np.argsort(vars_, kind="stable")
    bounds = np.searchsorted(vars_[order], np.arange(num_vars + 1))
    var_edges = tuple(order[bounds[j]:bounds[j + 1]] for j in range(num_vars))
    for arr in (checks, vars_, pols):
        arr.setflags(write=False)
    return FactorGraph(num_vars, num_checks, checks, vars_, pols,
                       check_edges, var_edges,
                       _padded(list(check_edges)), _padded(list(var_edges)))


def from_cnf(formula: CnfFormula) -> FactorGraph:
    if not formula.clauses:
        raise ValueError("formula has no clauses")
    checks, vars_, pols = [], [], []
    for i, clause in enumerate(formula.clauses):
        for lit in clause:
            checks.append(i)
            vars_.append(abs(lit) - 1)
            pols.append(POSITIVE if lit > 0 else NEGATED)
    return _build(formula.num_vars, formula.num_clauses, checks, vars_, pols)


def from_parity_matrix(H) -> FactorGraph:
    H = np.asarray(H)
    if H.ndim != 2:
        raise ValueError("H must be a 2-D matrix")
    if not np.all((H == 0) | (H == 1)):
        raise ValueError("H must be 0/1 valued")
    empty = np.flatnonzero(H.sum(axis=1) == 0)
    if len(empty):
        raise ValueError(f"all-zero row(s) in H: {(empty + 1).tolist()}")
    rows, cols = np.nonzero(H)
    return _build(H.shape[1], H.shape[0], rows, cols, np.zeros(len(rows)))


def read_alist(path: Union[str, os.PathLike]) -> np.ndarray:
    """Read a parity-check matrix from an alist file.

    Layout: ``n m``, ``max_col_deg max_row_deg``, n column degrees, m row
    degrees, then n lines of 1-based row indices and m lines of 1-based column
    indices (zero padding allowed). Both index blocks must agree.
    """
    with open(path) as fh:
        return parse_alist(fh.read())


def parse_alist(text: str) -> np.ndarray:
    lines = [l.split() for l in text.splitlines() if l.strip()]
    try:
        n, m = map(int, lines[0][:2])
        col_deg = [int(x) for x in lines[2]]
        row_deg = [int(x) for x in lines[3]]
        col_lists = [[int(x) for x in l if int(x) != 0] for l in lines[4:4 + n]]
        row_lists = [[int(x) for x in l if int(x) != 0] for l in lines[4 + n:4 + n + m]]
    except (IndexError, ValueError) as exc:
        raise ValueError(f"malformed alist: {exc}") from None
    if len(col_deg) != n or len(row_deg) != m or len(col_lists) != n or len(row_lists) != m:
        raise ValueError("alist block sizes disagree with header")
    H = np.zeros((m, n), dtype=np.uint8)
    for j, rows in enumerate(col_lists):
        if len(rows) != col_deg[j]:
            raise ValueError(f"column {j + 1}: degree mismatch")
        for i in rows:
            if not 1 <= i <= m:
                raise ValueError(f"column {j + 1}: row index {i} out of range")
            H[i - 1, j] = 1
    H2 = np.zeros_like(H)
    for i, cols in enumerate(row_lists):
        if len(cols) != row_deg[i]:
            raise ValueError(f"row {i + 1}: degree mismatch")
        for j in cols:
            if not 1 <= j <= n:
                raise ValueError(f"row {i + 1}: column index {j} out of range")
            H2[i, j - 1] = 1
    if not np.array_equal(H, H2):
        raise ValueError("alist row and column lists describe different matrices")
    return H


def format_alist(H) -> str:
    H = np.asarray(H)
    m, n = H.shape
    col_lists = [np.flatnonzero(H[:, j]) + 1 for j in range(n)]
    row_lists = [np.flatnonzero(H[i]) + 1 for i in range(m)]
    cmax = max((len(c) for c in col_lists), default=0)
    rmax = max((len(r) for r in row_lists), default=0)

    def pad(xs, w):
        return " ".join(str(int(x)) for x in list(xs) + [0] * (w - len(xs)))

    out = [f"{n} {m}", f"{cmax} {rmax}",
           " ".join(str(len(c)) for c in col_lists),
           " ".join(str(len(r)) for r in row_lists)]
    out += [pad(c, cmax) for c in col_lists]
    out += [pad(r, rmax) for r in row_lists]
    return "\n".join(out) + "\n"


def write_alist(H, path: Union[str, os.PathLike]) -> None:
    with open(path, "w") as fh:
        fh.write(format_alist(H))
