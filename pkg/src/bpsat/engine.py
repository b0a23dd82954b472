"""Synchronous belief propagation over a CNF factor graph.

Messages are stored per edge as probability pairs indexed by variable value:
``r[e] = (r(0), r(1))`` flows clause -> variable, ``q[e] = (q(0), q(1))``
flows variable -> clause. ``Q[j]`` is the pseudo-posterior of variable j.
Every phase reads only the previous phase's arrays, so the edge loops are
order-independent.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from enum import Enum
from typing import Mapping, Optional, Sequence

import numpy as np

from .cnf import Assignment, CnfFormula, verify
from .factor_graph import POSITIVE, FactorGraph

MAX_ORACLE_CLAUSE = 10


@dataclass(frozen=True)
class EngineConfig:
    max_iterations: int = 200
    epsilon: float = 1e-6
    convergence_tol: float = 1e-9
    damping: float = 0.0
    tie_value: int = 0

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not 0.0 < self.epsilon < 0.5:
            raise ValueError("epsilon must lie in (0, 0.5)")
        if not 0.0 <= self.damping < 1.0:
            raise ValueError("damping must lie in [0, 1)")
        if not self.convergence_tol > 0.0:
            raise ValueError("convergence_tol must be positive")
        if self.tie_value not in (0, 1):
            raise ValueError("tie_value must be 0 or 1")


@dataclass(frozen=True, eq=False)
class MessageState:
    r: np.ndarray   # (E, 2)
    q: np.ndarray   # (E, 2)
    Q: np.ndarray   # (V, 2)
    iteration: int = 0

    def same_as(self, other: "MessageState") -> bool:
        return (self.iteration == other.iteration
                and np.array_equal(self.r, other.r)
                and np.array_equal(self.q, other.q)
                and np.array_equal(self.Q, other.Q))


class EndReason(str, Enum):
    SOLVED = "solved"
    CONVERGED = "converged"
    EXHAUSTED = "exhausted"


@dataclass(frozen=True)
class InnerResult:
    reason: EndReason
    iterations: int
    assignment: Optional[Assignment] = None
    state: Optional[MessageState] = None

    @property
    def solved(self) -> bool:
        return self.reason is EndReason.SOLVED


def _pairs_from_q1(q1: np.ndarray) -> np.ndarray:
    return np.stack([1.0 - q1, q1], axis=-1)


def init_messages(g: FactorGraph, policy: str = "uniform", seed: Optional[int] = None,
                  epsilon: float = 1e-6) -> MessageState:
    """Starting messages: all q(1) = 0.5, or drawn uniformly from [eps, 1-eps]."""
    if policy == "uniform":
        q1 = np.full(g.num_edges, 0.5)
    elif policy == "random":
        if seed is None:
            raise ValueError("random policy needs a seed")
        rng = np.random.default_rng(seed)
        q1 = rng.uniform(epsilon, 1.0 - epsilon, size=g.num_edges)
    else:
        raise ValueError(f"unknown init policy {policy!r}")
    return MessageState(r=np.zeros((g.num_edges, 2)), q=_pairs_from_q1(q1),
                        Q=np.zeros((g.num_vars, 2)), iteration=0)


def _gather(values: np.ndarray, table: np.ndarray, fill: float = 1.0) -> np.ndarray:
    out = np.where(table >= 0, values[np.maximum(table, 0)], fill)
    return out


def _exclusive_products(vals: np.ndarray) -> np.ndarray:
    """Row-wise product of every entry except the one in each column slot.

    Prefix/suffix products, so zero factors are handled without division.
    """
    ones = np.ones((vals.shape[0], 1))
    prefix = np.cumprod(np.hstack([ones, vals[:, :-1]]), axis=1)
    suffix = np.cumprod(np.hstack([ones, vals[:, :0:-1]]), axis=1)[:, ::-1]
    return prefix * suffix


def _scatter(per_slot: np.ndarray, table: np.ndarray, num_edges: int) -> np.ndarray:
    out = np.empty(num_edges)
    mask = table >= 0
    out[table[mask]] = per_slot[mask]
    return out


def update_clause_to_var(g: FactorGraph, state: MessageState) -> np.ndarray:
    """Clause -> variable messages from the current q.

    ``r(t) = 1`` for the value t that makes the edge's literal true; the other
    component is the probability some other literal of the clause is true,
    treating the other variables as independent with their q beliefs.
    """
    positive = g.edge_polarity == POSITIVE
    p_true = np.where(positive, state.q[:, 1], state.q[:, 0])
    others_false = _exclusive_products(_gather(1.0 - p_true, g.check_table))
    r_false = 1.0 - _scatter(others_false, g.check_table, g.num_edges)
    r = np.empty((g.num_edges, 2))
    r[:, 1] = np.where(positive, 1.0, r_false)
    r[:, 0] = np.where(positive, r_false, 1.0)
    return r


def _normalize_pairs(u0: np.ndarray, u1: np.ndarray) -> np.ndarray:
    s = u0 + u1
    with np.errstate(invalid="ignore", divide="ignore"):
        p1 = np.where(s > 0, u1 / s, 0.5)
    return p1


def update_var_to_clause(g: FactorGraph, r: np.ndarray, q_prev: np.ndarray,
                         config: EngineConfig) -> np.ndarray:
    """Variable -> clause messages: product of r from all other incident clauses."""
    ex0 = _exclusive_products(_gather(r[:, 0], g.var_table))
    ex1 = _exclusive_products(_gather(r[:, 1], g.var_table))
    u0 = _scatter(ex0, g.var_table, g.num_edges)
    u1 = _scatter(ex1, g.var_table, g.num_edges)
    q1 = np.clip(_normalize_pairs(u0, u1), config.epsilon, 1.0 - config.epsilon)
    if config.damping > 0.0:
        q1 = (1.0 - config.damping) * q1 + config.damping * q_prev[:, 1]
    return _pairs_from_q1(q1)


def compute_posteriors(g: FactorGraph, r: np.ndarray) -> np.ndarray:
    """Pseudo-posteriors: product of r over every incident clause, normalized."""
    u0 = np.prod(_gather(r[:, 0], g.var_table), axis=1)
    u1 = np.prod(_gather(r[:, 1], g.var_table), axis=1)
    return _pairs_from_q1(_normalize_pairs(u0, u1))


def hard_decision(Q: np.ndarray, tie_value: int = 0) -> Assignment:
    q1 = Q[:, 1]
    bits = np.where(q1 > 0.5, 1, 0)
    bits = np.where(q1 == 0.5, tie_value, bits)
    return Assignment(bits.astype(np.uint8))


def step(g: FactorGraph, state: MessageState, config: EngineConfig) -> MessageState:
    """One flooding iteration: r from old q, q from new r, then Q."""
    r = update_clause_to_var(g, state)
    q = update_var_to_clause(g, r, state.q, config)
    Q = compute_posteriors(g, r)
    return MessageState(r=r, q=q, Q=Q, iteration=state.iteration + 1)


def _all_clauses_true(g: FactorGraph, bits: np.ndarray) -> bool:
    lit_true = bits[g.edge_var] == (g.edge_polarity == POSITIVE)
    return bool(np.all(_gather(lit_true, g.check_table, fill=False).any(axis=1)))


def run_inner_loop(formula: CnfFormula, g: FactorGraph, init: MessageState,
                   config: EngineConfig = EngineConfig()) -> InnerResult:
    """Iterate until the hard decision satisfies ``formula``, q stops moving, or
    ``config.max_iterations`` runs out."""
    if (g.num_vars != formula.num_vars or g.num_checks != formula.num_clauses
            or g.to_clauses() != list(formula.clauses)):
        raise ValueError("factor graph was not built from this formula")
    state = init
    for it in range(1, config.max_iterations + 1):
        new = step(g, state, config)
        a = hard_decision(new.Q, config.tie_value)
        if _all_clauses_true(g, a.values):
            if not verify(formula, a):
                raise AssertionError("fast clause check disagrees with verify()")
            return InnerResult(EndReason.SOLVED, it, a, new)
        delta = float(np.max(np.abs(new.q[:, 1] - state.q[:, 1]), initial=0.0))
        state = new
        if delta < config.convergence_tol:
            return InnerResult(EndReason.CONVERGED, it, None, state)
    return InnerResult(EndReason.EXHAUSTED, config.max_iterations, None, state)


def oracle_clause_marginal(clause: Sequence[int], q1: Mapping[int, float],
                           fixed_var: int, fixed_value: int) -> float:
    """P(clause true | x_fixed_var = fixed_value) by enumerating the other variables.

    ``clause`` holds signed literals; ``q1[v]`` is P(x_v = 1) for every other
    variable v of the clause, treated as independent.
    """
    if len(clause) > MAX_ORACLE_CLAUSE:
        raise ValueError(f"clause longer than {MAX_ORACLE_CLAUSE} literals")
    others = [l for l in clause if abs(l) != fixed_var]
    if len(others) == len(clause):
        raise ValueError(f"x{fixed_var} does not occur in the clause")
    total = 0.0
    for values in itertools.product((0, 1), repeat=len(others)):
        weight = 1.0
        for lit, v in zip(others, values):
            p = q1[abs(lit)]
            weight *= p if v else 1.0 - p
        env = dict(zip((abs(l) for l in others), values))
        env[fixed_var] = fixed_value
        if any(env[abs(l)] == (1 if l > 0 else 0) for l in clause):
            total += weight
    return total


def with_q(state: MessageState, q1: Sequence[float]) -> MessageState:
    """Copy of ``state`` whose q(1) values are replaced (q(0) = 1 - q(1))."""
    return replace(state, q=_pairs_from_q1(np.asarray(q1, dtype=float)))
