"""Break-and-restart driver around the inner BP loop, plus batch solving."""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .cnf import Assignment, CnfFormula, verify
from .engine import EndReason, EngineConfig, init_messages, run_inner_loop
from .factor_graph import from_cnf

log = logging.getLogger(__name__)

UNIFORM_FIRST = "uniform_first_then_random"
ALL_RANDOM = "all_random"


@dataclass(frozen=True)
class SolverConfig:
    engine: EngineConfig = field(default_factory=EngineConfig)
    max_restarts: int = 49
    seed: int = 0
    restart_policy: str = UNIFORM_FIRST

    def __post_init__(self):
        if self.max_restarts < 0:
            raise ValueError("max_restarts must be >= 0")
        if self.restart_policy not in (UNIFORM_FIRST, ALL_RANDOM):
            raise ValueError(f"unknown restart policy {self.restart_policy!r}")


@dataclass(frozen=True)
class Attempt:
    iterations: int
    reason: EndReason
    init: str  # "uniform" or "random:<seed>"


@dataclass(frozen=True)
class SolveOutcome:
    assignment: Optional[Assignment]
    total_iterations: int
    attempts: tuple[Attempt, ...]
    degenerate: bool = False
    error: Optional[str] = None

    @property
    def sat(self) -> bool:
        return self.assignment is not None

    @property
    def status(self) -> str:
        if self.error is not None:
            return "ERROR"
        return "SAT" if self.sat else "UNKNOWN"

    @property
    def num_attempts(self) -> int:
        return len(self.attempts)

    @property
    def final_iterations(self) -> int:
        """Iterations of the last attempt (the solving one, for SAT outcomes)."""
        return self.attempts[-1].iterations if self.attempts else 0


def derive_seed(master: int, *key: int) -> int:
    """Counter-based child seed: depends only on ``(master, *key)``."""
    ss = np.random.SeedSequence(entropy=master, spawn_key=tuple(int(k) for k in key))
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))


def solve(formula: CnfFormula, config: SolverConfig = SolverConfig()) -> SolveOutcome:
    if not formula.clauses:
        return SolveOutcome(Assignment.zeros(formula.num_vars), 0, (), degenerate=True)
    g = from_cnf(formula)
    attempts = []
    total = 0
    for k in range(config.max_restarts + 1):
        if k == 0 and config.restart_policy == UNIFORM_FIRST:
            init, label = init_messages(g), "uniform"
        else:
            s = derive_seed(config.seed, k)
            init = init_messages(g, "random", seed=s, epsilon=config.engine.epsilon)
            label = f"random:{s}"
        res = run_inner_loop(formula, g, init, config.engine)
        attempts.append(Attempt(res.iterations, res.reason, label))
        total += res.iterations
        if res.solved:
            assert verify(formula, res.assignment)
            return SolveOutcome(res.assignment, total, tuple(attempts))
    return SolveOutcome(None, total, tuple(attempts))


def _solve_one(args) -> SolveOutcome:
    formula, config = args
    try:
        return solve(formula, config)
    except Exception as exc:  # one bad instance must not sink the batch
        log.warning("instance failed: %s", exc)
        return SolveOutcome(None, 0, (), error=f"{type(exc).__name__}: {exc}")


def solve_batch(instances: Sequence[CnfFormula], config: SolverConfig = SolverConfig(),
                keys: Optional[Sequence[int]] = None, jobs: int = 1) -> list[SolveOutcome]:
    """Solve independent instances; instance k runs with seed ``derive_seed(seed, key_k)``.

    ``keys`` default to the list positions. Results do not depend on ``jobs``.
    """
    if keys is None:
        keys = range(len(instances))
    if len(keys) != len(instances):
        raise ValueError("one key per instance required")
    work = [(f, _child_config(config, key)) for f, key in zip(instances, keys)]
    if jobs <= 1 or len(work) <= 1:
        return [_solve_one(w) for w in work]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_solve_one, work, chunksize=max(1, len(work) // (4 * jobs))))


def _child_config(config: SolverConfig, key: int) -> SolverConfig:
    return SolverConfig(engine=config.engine, max_restarts=config.max_restarts,
                        seed=derive_seed(config.seed, 0x5EED, key),
                        restart_policy=config.restart_policy)
