"""Belief-propagation SAT solving with break-and-restart."""

from .cnf import (Assignment, CnfFormula, DimacsError, Literal, TriviallyUnsat,
                  count_models, gen_random_3sat, parse_dimacs, read_dimacs, verify)
from .engine import EngineConfig, MessageState, run_inner_loop
from .factor_graph import FactorGraph, from_cnf, from_parity_matrix
from .restart import SolveOutcome, SolverConfig, solve, solve_batch

__version__ = "0.1.0"
