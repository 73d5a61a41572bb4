"""Exhaustive search and exact verification of perfect parallelepipeds."""
from .assembly import (
    BodyDiagonals,
    CandidateTriple,
    Decision,
    ExactCosine,
    Realizability,
    assemble,
    body_diagonals,
    embed,
    realizability,
)
from .certificate import Certificate, Verdict, build, is_primitive, is_reduced, verify
from .exact import ArithmeticBudgetError, is_perfect_square, isqrt, sym3_det
from .parallelograms import ParallelogramIndex, PerfectParallelogram, enumerate_pair, enumerate_range
from .search import Checkpoint, CheckpointError, FunnelStats, resume, run, search

__version__ = "0.1.0"
