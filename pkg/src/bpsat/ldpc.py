"""Probability-domain sum-product decoding over XOR checks.

This is classical BP with channel priors kept in every variable-side product.
It shares the graph and the flooding schedule with the SAT engine and serves
as a second, independently checkable constraint type.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .engine import EngineConfig, _exclusive_products, _gather, _normalize_pairs, _scatter
from .factor_graph import FactorGraph, from_parity_matrix

MAX_ORACLE_DEGREE = 10


@dataclass(frozen=True, eq=False)
class ParityInstance:
    graph: FactorGraph
    priors: np.ndarray  # P(v_j = 1) per variable

    def __post_init__(self):
        p = np.asarray(self.priors, dtype=float)
        if p.shape != (self.graph.num_vars,):
            raise ValueError("one prior per variable required")
        if np.any(p <= 0.0) or np.any(p >= 1.0):
            raise ValueError("priors must lie strictly inside (0, 1)")
        if not self.graph.is_parity:
            raise ValueError("graph must be built from a parity-check matrix")
        object.__setattr__(self, "priors", p)

    @classmethod
    def from_matrix(cls, H, priors) -> "ParityInstance":
        return cls(from_parity_matrix(H), priors)


@dataclass(frozen=True)
class DecodeResult:
    bits: Optional[np.ndarray]
    iterations: int

    @property
    def ok(self) -> bool:
        return self.bits is not None


def xor_check_to_var(q1_others: Sequence[float]) -> tuple[float, float]:
    """(r(0), r(1)) for a target bit given P(bit=1) of the other bits on its check."""
    if len(q1_others) < 1:
        raise ValueError("check needs at least one other edge")
    r0 = 0.5 + 0.5 * float(np.prod(1.0 - 2.0 * np.asarray(q1_others, dtype=float)))
    return r0, 1.0 - r0


def oracle_parity_marginal(q1_others: Sequence[float], target_value: int) -> float:
    """P(target xor others == 0) by enumerating the other bits."""
    if len(q1_others) > MAX_ORACLE_DEGREE:
        raise ValueError(f"degree above {MAX_ORACLE_DEGREE}")
    total = 0.0
    for bits in itertools.product((0, 1), repeat=len(q1_others)):
        w = 1.0
        for p, b in zip(q1_others, bits):
            w *= p if b else 1.0 - p
        if (sum(bits) + target_value) % 2 == 0:
            total += w
    return total


def parity_check_messages(g: FactorGraph, q1: np.ndarray) -> np.ndarray:
    """Vectorized :func:`xor_check_to_var` over every edge; returns r(0) per edge."""
    signed = _exclusive_products(_gather(1.0 - 2.0 * q1, g.check_table))
    return 0.5 + 0.5 * _scatter(signed, g.check_table, g.num_edges)


def syndrome(H, bits) -> np.ndarray:
    return (np.asarray(H, dtype=np.int64) @ np.asarray(bits, dtype=np.int64)) % 2


def decode(instance: ParityInstance, config: EngineConfig = EngineConfig()) -> DecodeResult:
    g = instance.graph
    H = g.to_matrix()
    p1 = instance.priors
    q1 = p1[g.edge_var].copy()
    for it in range(1, config.max_iterations + 1):
        r0 = parity_check_messages(g, q1)
        r1 = 1.0 - r0
        ex0 = _scatter(_exclusive_products(_gather(r0, g.var_table)), g.var_table, g.num_edges)
        ex1 = _scatter(_exclusive_products(_gather(r1, g.var_table)), g.var_table, g.num_edges)
        pv = p1[g.edge_var]
        new_q1 = np.clip(_normalize_pairs((1.0 - pv) * ex0, pv * ex1),
                         config.epsilon, 1.0 - config.epsilon)
        if config.damping > 0.0:
            new_q1 = (1.0 - config.damping) * new_q1 + config.damping * q1
        Q0 = (1.0 - p1) * np.prod(_gather(r0, g.var_table), axis=1)
        Q1 = p1 * np.prod(_gather(r1, g.var_table), axis=1)
        post = _normalize_pairs(Q0, Q1)
        bits = np.where(post > 0.5, 1, 0)
        bits = np.where(post == 0.5, config.tie_value, bits).astype(np.uint8)
        if not syndrome(H, bits).any():
            return DecodeResult(bits, it)
        q1 = new_q1
    return DecodeResult(None, config.max_iterations)


def parse_priors(text: str) -> np.ndarray:
    vals = []
    for line in text.splitlines():
        line = line.split("#", 1)[0]
        vals.extend(float(tok) for tok in line.split())
    return np.array(vals)


def read_priors(path: Union[str, os.PathLike]) -> np.ndarray:
    with open(path) as fh:
        return parse_priors(fh.read())
