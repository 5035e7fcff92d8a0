"""Phase selection policies.

Seven policies are available: plain Jeroslow-Wang, ACE lookahead (JW below
a depth cutoff), JW + phase saving ("PrecoSAT"), PrecoSAT with a JW tail,
ACE + PrecoSAT switched on the decision count, PrecoSAT with random flips,
and phases seeded by a bounded local search.
"""

import enum
import random
from dataclasses import dataclass, replace
from typing import NamedTuple, Optional

from .formula import Formula
from .propagation import Propagator


class PolicyKind(enum.Enum):
    JW = "jw"
    ACE = "ace"
    PRECOSAT = "precosat"
    PRECOSAT_TAIL_JW = "precosat-tailjw"
    ACE_PRECOSAT = "ace-precosat"
    PRECOSAT_RANDOM = "precosat-random"
    LOCAL_SEARCH = "local-search"


@dataclass(frozen=True)
class PolicyParams:
    ace_depth_cutoff: int = 30
    ace_decision_cutoff: int = 300000
    tail_window: int = 20
    p_random_var: float = 0.02
    p_flip: float = 1 / 30
    ls_flip_budget: int = 100000
    ls_walk_prob: float = 0.3
    # flips without improving the best assignment before local search gives
    # up; None picks max(1000, 10 * clauses), 0 disables the check
    ls_patience: Optional[int] = None

    def __post_init__(self):
        for name in ("p_random_var", "p_flip", "ls_walk_prob"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {p}")
        for name in ("ace_depth_cutoff", "ace_decision_cutoff", "tail_window"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.ls_flip_budget < 0:
            raise ValueError("ls_flip_budget must be non-negative")


@dataclass(frozen=True)
class PhasePolicy:
    kind: PolicyKind
    params: PolicyParams = PolicyParams()

    @classmethod
    def named(cls, name: str, params: Optional[PolicyParams] = None) -> "PhasePolicy":
        return cls(PolicyKind(name), params or PolicyParams())

    @property
    def name(self) -> str:
        return self.kind.value

    def with_params(self, **changes) -> "PhasePolicy":
        return PhasePolicy(self.kind, replace(self.params, **changes))


@dataclass(frozen=True)
class Presolve:
    policy: PhasePolicy
    decision_budget: int

    def __post_init__(self):
        if self.decision_budget <= 0:
            raise ValueError("presolve decision budget must be positive")


@dataclass(frozen=True)
class SolvePlan:
    main: PhasePolicy
    presolve: Optional[Presolve] = None
    trace: tuple = ()

    @classmethod
    def single(cls, policy: PhasePolicy) -> "SolvePlan":
        return cls(main=policy, trace=(f"explicit:{policy.name}",))


# -- Jeroslow-Wang ------------------------------------------------------------


@dataclass
class JwWeights:
    w_pos: list
    w_neg: list

    def phase(self, v: int) -> bool:
        # ties go to the negative phase
        return self.w_pos[v] > self.w_neg[v]


def jw_weights(formula: Formula) -> JwWeights:
    """Per-literal JW weights over the pre-extraction clause set."""
    n = formula.num_vars
    pos = [0.0] * (n + 1)
    neg = [0.0] * (n + 1)
    for clause in formula.raw_clauses:
        w = 2.0 ** -len(clause)
        for lit in clause:
            if lit > 0:
                pos[lit] += w
            else:
                neg[-lit] += w
    return JwWeights(pos, neg)


def jw_literal_weight(formula: Formula, lit: int) -> float:
    return sum(2.0 ** -len(c) for c in formula.raw_clauses if lit in c)


def clause_set_weight(clauses) -> float:
    """W(S) = sum over clauses of 2^-size; W(S) < 1 guarantees satisfiability."""
    return sum(2.0 ** -len(c) for c in clauses)


# -- ACE ------------------------------------------------------------------------


def w_cnf(n: int) -> float:
    return 5.0 ** (2 - n)


def w_xor(n: int) -> float:
    return 5.5 * 0.85 ** n


class AceWeight(NamedTuple):
    value: float
    conflicted: bool


def ace_weight(prop: Propagator, var: int, phase: bool, step_cap: Optional[int] = None) -> AceWeight:
    """Probe ``var = phase`` and score the reduced constraints over ``var``.

    Satisfied clauses and constraints contribute nothing.
    """
    report = prop.lookahead(var, phase, step_cap)
    value = 0.0
    for _, size in report.cnf_sizes:
        if size is not None:
            value += w_cnf(size)
    for _, size in report.xor_sizes:
        if size is not None:
            value += w_xor(size)
    return AceWeight(value, report.conflicted)


# -- saved phases and local search ------------------------------------------------


@dataclass
class SavedPhases:
    last_value: list
    ls_seed: Optional[list] = None

    @classmethod
    def empty(cls, num_vars: int) -> "SavedPhases":
        return cls([None] * (num_vars + 1))

    def update(self, v: int, value: bool) -> None:
        self.last_value[v] = value


def local_search_seed(formula: Formula, flip_budget: int, rng: random.Random,
                      walk_prob: float = 0.3, patience: Optional[int] = None) -> list:
    """WalkSAT-style search; returns the best assignment seen (index 0 unused).

    Each step picks a random unsatisfied clause and flips, with probability
    ``walk_prob``, a random literal of it, otherwise the literal with the
    smallest break count.
    """
    n = formula.num_vars
    clauses = formula.raw_clauses
    assign = [False] + [rng.random() < 0.5 for _ in range(n)]
    if formula.trivially_unsat or not clauses:
        return assign
    if patience is None:
        patience = max(1000, 10 * len(clauses))

    occ = {}
    for ci, clause in enumerate(clauses):
        for lit in clause:
            occ.setdefault(lit, []).append(ci)
    numtrue = [sum(1 for l in c if assign[abs(l)] == (l > 0)) for c in clauses]
    unsat = [ci for ci, t in enumerate(numtrue) if t == 0]
    pos = [-1] * len(clauses)
    for k, ci in enumerate(unsat):
        pos[ci] = k

    best = assign[:]
    best_cost = len(unsat)
    last_improvement = 0
    for step in range(flip_budget):
        if not unsat:
            break
        if patience and step - last_improvement >= patience:
            break
        clause = clauses[unsat[rng.randrange(len(unsat))]]
        if rng.random() < walk_prob:
            lit = clause[rng.randrange(len(clause))]
        else:
            lit = clause[0]
            fewest = None
            for cand in clause:
                # cand is false; flipping it falsifies -cand
                breaks = sum(1 for ci in occ.get(-cand, ()) if numtrue[ci] == 1)
                if fewest is None or breaks < fewest:
                    fewest = breaks
                    lit = cand
        v = abs(lit)
        assign[v] = not assign[v]
        made_true = v if assign[v] else -v
        for ci in occ.get(made_true, ()):
            numtrue[ci] += 1
            if numtrue[ci] == 1:
                k = pos[ci]
                last = unsat.pop()
                if last != ci:
                    unsat[k] = last
                    pos[last] = k
                pos[ci] = -1
        for ci in occ.get(-made_true, ()):
            numtrue[ci] -= 1
            if numtrue[ci] == 0:
                pos[ci] = len(unsat)
                unsat.append(ci)
        if len(unsat) < best_cost:
            best_cost = len(unsat)
            best = assign[:]
            last_improvement = step + 1
    return best


# -- dispatch ---------------------------------------------------------------------


@dataclass
class SelectorCounters:
    selections: int = 0
    flips: int = 0
    ace_probes: int = 0
    # deepest level and highest decision count at which an ACE probe ran
    ace_max_depth: int = -1
    ace_max_decision: int = -1


class PhaseSelector:
    """Owns the phase state of one solver instance and dispatches on the active policy."""

    def __init__(self, formula: Formula, prop: Propagator, rng: random.Random, policy: PhasePolicy):
        self.formula = formula
        self.prop = prop
        self.rng = rng
        self.jw = jw_weights(formula)
        self.saved = SavedPhases(prop.saved_phase)
        self.counters = SelectorCounters()
        self.policy = policy
        self.set_policy(policy)

    def set_policy(self, policy: PhasePolicy) -> None:
        self.policy = policy
        if policy.kind is PolicyKind.LOCAL_SEARCH and self.saved.ls_seed is None:
            p = policy.params
            self.saved.ls_seed = local_search_seed(
                self.formula, p.ls_flip_budget, self.rng, p.ls_walk_prob, p.ls_patience)

    def jw_phase(self, v: int) -> bool:
        return self.jw.w_pos[v] > self.jw.w_neg[v]

    def ace_weight(self, v: int, phase: bool) -> AceWeight:
        return ace_weight(self.prop, v, phase)

    def ace_phase(self, v: int, depth: int, decision_count: int = 0) -> bool:
        if depth >= self.policy.params.ace_depth_cutoff:
            return self.jw_phase(v)
        c = self.counters
        c.ace_probes += 1
        c.ace_max_depth = max(c.ace_max_depth, depth)
        c.ace_max_decision = max(c.ace_max_decision, decision_count)
        pos = ace_weight(self.prop, v, True)
        neg = ace_weight(self.prop, v, False)
        if pos.conflicted != neg.conflicted:
            return neg.conflicted
        if pos.conflicted:
            return True
        if pos.value != neg.value:
            return pos.value > neg.value
        return self.jw_phase(v)

    def precosat_phase(self, v: int) -> bool:
        saved = self.saved.last_value[v]
        return self.jw_phase(v) if saved is None else saved

    def select(self, v: int, depth: int, decision_count: int = 0,
               max_level_prev_epoch: Optional[int] = None) -> bool:
        """Phase for decision variable ``v`` at decision level ``depth``."""
        self.counters.selections += 1
        kind = self.policy.kind
        params = self.policy.params
        if kind is PolicyKind.PRECOSAT:
            return self.precosat_phase(v)
        if kind is PolicyKind.JW:
            return self.jw_phase(v)
        if kind is PolicyKind.ACE:
            return self.ace_phase(v, depth, decision_count)
        if kind is PolicyKind.ACE_PRECOSAT:
            if decision_count < params.ace_decision_cutoff:
                return self.ace_phase(v, depth, decision_count)
            return self.precosat_phase(v)
        if kind is PolicyKind.PRECOSAT_TAIL_JW:
            if max_level_prev_epoch is not None and depth > max(0, max_level_prev_epoch - params.tail_window):
                return self.jw_phase(v)
            return self.precosat_phase(v)
        if kind is PolicyKind.PRECOSAT_RANDOM:
            phase = self.precosat_phase(v)
            if self.rng.random() < params.p_flip:
                self.counters.flips += 1
                phase = not phase
            return phase
        if kind is PolicyKind.LOCAL_SEARCH:
            seed = self.saved.ls_seed
            return self.jw_phase(v) if seed is None else seed[v]
        raise ValueError(f"unknown policy {kind}")
