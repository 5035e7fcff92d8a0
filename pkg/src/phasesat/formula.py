"""Problem representation: normalized CNF clauses, XOR constraints, occurrence lists.

Literals are signed integers in the DIMACS convention (``3`` is x3, ``-3`` is
its negation); variables are numbered from 1.
"""

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, NamedTuple, Optional, Sequence

MAX_XOR_ARITY = 6
LARGE_CLAUSE_SIZE = 9


@dataclass(frozen=True)
class XorConstraint:
    variables: tuple
    parity: bool  # True: an odd number of the variables are true

    def satisfied_by(self, assignment: Sequence[bool]) -> bool:
        """``assignment`` is indexed by variable (index 0 unused)."""
        odd = False
        for v in self.variables:
            if assignment[v]:
                odd = not odd
        return odd == self.parity

    def to_clauses(self) -> list:
        """The 2^(k-1) clauses forbidding every assignment of the wrong parity."""
        out = []
        for signs in product((False, True), repeat=len(self.variables)):
            # signs[i] True -> the forbidden assignment sets variables[i] true
            if (sum(signs) % 2 == 1) != self.parity:
                out.append(tuple(-v if s else v for v, s in zip(self.variables, signs)))
        return out


class RawCounts(NamedTuple):
    clauses: int
    binary: int
    large: int


def normalize_clause(lits: Iterable[int]) -> Optional[tuple]:
    """Drop duplicate literals (first occurrence wins); None for a tautology."""
    seen = set()
    out = []
    for lit in lits:
        if -lit in seen:
            return None
        if lit not in seen:
            seen.add(lit)
            out.append(lit)
    return tuple(out)


@dataclass(eq=False)
class Formula:
    """Immutable parsed problem.

    ``clauses`` are the CNF clauses left after XOR extraction, ``raw_clauses``
    the normalized clause set as read (before extraction).  Feature counts are
    taken from ``raw_counts``.
    """

    num_vars: int
    clauses: tuple
    xors: tuple = ()
    raw_clauses: Optional[tuple] = None
    trivially_unsat: bool = False
    tautologies_dropped: int = 0
    warnings: tuple = ()
    raw_counts: RawCounts = field(init=False)
    _occ: dict = field(init=False, repr=False)
    _xocc: dict = field(init=False, repr=False)

    def __post_init__(self):
        self.clauses = tuple(tuple(c) for c in self.clauses)
        self.xors = tuple(self.xors)
        if self.raw_clauses is None:
            self.raw_clauses = self.clauses
        self.raw_clauses = tuple(tuple(c) for c in self.raw_clauses)
        self.warnings = tuple(self.warnings)
        sizes = [len(c) for c in self.raw_clauses]
        self.raw_counts = RawCounts(
            len(sizes),
            sum(1 for s in sizes if s == 2),
            sum(1 for s in sizes if s >= LARGE_CLAUSE_SIZE),
        )
        occ = defaultdict(list)
        for i, clause in enumerate(self.clauses):
            for lit in clause:
                occ[lit].append(i)
        xocc = defaultdict(list)
        for i, x in enumerate(self.xors):
            for v in x.variables:
                xocc[v].append(i)
        self._occ = dict(occ)
        self._xocc = dict(xocc)

    @classmethod
    def from_clauses(cls, num_vars: int, clauses: Iterable[Iterable[int]], **kwargs) -> "Formula":
        """Build a formula applying parse-time normalization to ``clauses``."""
        kept = []
        dropped = 0
        unsat = False
        for raw in clauses:
            clause = normalize_clause(raw)
            if clause is None:
                dropped += 1
            elif not clause:
                unsat = True
            else:
                kept.append(clause)
        return cls(num_vars, tuple(kept), trivially_unsat=unsat, tautologies_dropped=dropped, **kwargs)

    def occurrences(self, lit: int) -> list:
        """Indices into ``clauses`` of the clauses containing ``lit``."""
        return self._occ.get(lit, [])

    def xor_occurrences(self, var: int) -> list:
        """Indices into ``xors`` of the constraints over ``var``."""
        return self._xocc.get(var, [])

    def evaluate(self, assignment: Sequence[bool], raw: bool = False) -> bool:
        """Check a total assignment (indexed by variable) against the formula.

        With ``raw=True`` the pre-extraction clause set is checked instead of
        the extracted clauses and XOR constraints.
        """
        if self.trivially_unsat:
            return False
        clauses = self.raw_clauses if raw else self.clauses
        for clause in clauses:
            if not any(assignment[abs(l)] == (l > 0) for l in clause):
                return False
        if raw:
            return True
        return all(x.satisfied_by(assignment) for x in self.xors)


def clause_size_histogram(formula: Formula) -> dict:
    return dict(Counter(len(c) for c in formula.raw_clauses))


def detect_xor(formula: Formula, max_arity: int = MAX_XOR_ARITY) -> Formula:
    """Replace complete CNF encodings of XOR constraints by XorConstraint objects.

    Clauses are grouped by their variable set; a group of arity k yields a
    constraint only when all 2^(k-1) sign patterns of one parity class are
    present.  Partial groups are left untouched.
    """
    groups = defaultdict(list)
    for i, clause in enumerate(formula.clauses):
        if 2 <= len(clause) <= max_arity:
            groups[tuple(sorted(abs(l) for l in clause))].append(i)

    removed = set()
    xors = list(formula.xors)
    for variables, members in groups.items():
        k = len(variables)
        need = 1 << (k - 1)
        if len(members) < need:
            continue
        by_pattern = defaultdict(list)
        for i in members:
            by_pattern[frozenset(l for l in formula.clauses[i] if l < 0)].append(i)
        # even number of negative literals forbids an even-parity assignment
        even = [p for p in by_pattern if len(p) % 2 == 0]
        odd = [p for p in by_pattern if len(p) % 2 == 1]
        for patterns, parity in ((even, True), (odd, False)):
            if len(patterns) == need:
                xors.append(XorConstraint(variables, parity))
                for p in patterns:
                    removed.update(by_pattern[p])

    if not removed:
        return formula
    kept = tuple(c for i, c in enumerate(formula.clauses) if i not in removed)
    return Formula(
        formula.num_vars,
        kept,
        xors=tuple(xors),
        raw_clauses=formula.raw_clauses,
        trivially_unsat=formula.trivially_unsat,
        tautologies_dropped=formula.tautologies_dropped,
        warnings=formula.warnings,
    )
