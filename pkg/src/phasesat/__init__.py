"""CDCL SAT solver with lookahead-based and feature-selected phase policies."""

from .dimacs import DimacsError, SolverVerdict, Status, emit_verdict, parse_dimacs, to_dimacs
from .engine import Budget, ProbeReport, Solver, SolveStats, solve
from .features import FeatureVector, classify, extract_features
from .formula import Formula, XorConstraint, clause_size_histogram, detect_xor
from .phase import PhasePolicy, PolicyKind, PolicyParams, Presolve, SolvePlan

__version__ = "0.1.0"
