"""Brute-force reference machinery for tests.

Nothing here imports the propagation, phase or engine modules; agreement with
them is therefore an independent cross-check.
"""

from dataclasses import dataclass
from itertools import product
from typing import Optional

from phasesat.formula import Formula, XorConstraint

MAX_BRUTE_VARS = 20
MAX_ACE_VARS = 30


@dataclass(frozen=True)
class OracleResult:
    satisfiable: bool
    witness: Optional[tuple]
    count: int


def _var_masks(n):
    """masks[v] has bit a set iff assignment number a sets variable v true."""
    total = 1 << n
    full = (1 << total) - 1
    masks = [0]
    for i in range(n):
        half = 1 << i
        period = half << 1
        unit = ((1 << half) - 1) << half
        masks.append(unit * (full // ((1 << period) - 1)))
    return masks, full


def model_mask(num_vars, clauses, xors=(), trivially_unsat=False):
    """Bitmask over all 2^V assignments of the models of clauses + xors."""
    masks, full = _var_masks(num_vars)
    if trivially_unsat:
        return 0
    result = full
    for clause in clauses:
        sat = 0
        for lit in clause:
            sat |= masks[lit] if lit > 0 else full ^ masks[-lit]
        result &= sat
        if not result:
            return 0
    for x in xors:
        odd = 0
        for v in x.variables:
            odd ^= masks[v]
        result &= odd if x.parity else full ^ odd
    return result


def _decode(index, n):
    return (False,) + tuple(bool(index >> i & 1) for i in range(n))


def brute_force_solve(formula: Formula) -> OracleResult:
    if formula.num_vars > MAX_BRUTE_VARS:
        raise ValueError(f"brute force limited to {MAX_BRUTE_VARS} variables")
    mask = model_mask(formula.num_vars, formula.clauses, formula.xors, formula.trivially_unsat)
    if not mask:
        return OracleResult(False, None, 0)
    lowest = (mask & -mask).bit_length() - 1
    return OracleResult(True, _decode(lowest, formula.num_vars), bin(mask).count("1"))


def enumerate_models(formula: Formula) -> list:
    """Plain itertools enumeration, used to cross-check the bitmask oracle."""
    models = []
    for bits in product((False, True), repeat=formula.num_vars):
        a = (False,) + bits
        if formula.evaluate(a):
            models.append(a)
    return models


def tt_equivalent(clauses, xor: XorConstraint) -> bool:
    """Truth-table comparison of a clause set and an XOR over the same variables."""
    variables = sorted(set(xor.variables) | {abs(l) for c in clauses for l in c})
    if len(variables) > 6:
        raise ValueError("truth-table check limited to 6 variables")
    for bits in product((False, True), repeat=len(variables)):
        value = dict(zip(variables, bits))
        cnf = all(any(value[abs(l)] == (l > 0) for l in c) for c in clauses)
        odd = sum(value[v] for v in xor.variables) % 2 == 1
        if cnf != (odd == xor.parity):
            return False
    return True


def naive_up(formula: Formula, assumptions):
    """Unit propagation by repeated full rescans.

    ``assumptions`` is an iterable of literals.  Returns (value dict, conflicted).
    """
    value = {}
    for lit in assumptions:
        if value.get(abs(lit), lit > 0) != (lit > 0):
            return value, True
        value[abs(lit)] = lit > 0
    xors = [(list(x.variables), x.parity) for x in formula.xors]
    if formula.trivially_unsat:
        return value, True
    changed = True
    while changed:
        changed = False
        for c in formula.clauses:
            if any(value.get(abs(l)) == (l > 0) for l in c):
                continue
            free = [l for l in c if abs(l) not in value]
            if not free:
                return value, True
            if len(free) == 1:
                value[abs(free[0])] = free[0] > 0
                changed = True
        for vs, parity in xors:
            free = [u for u in vs if u not in value]
            ones = sum(1 for u in vs if value.get(u) is True)
            if not free:
                if (ones % 2 == 1) != parity:
                    return value, True
            elif len(free) == 1:
                value[free[0]] = (ones % 2 == 1) != parity
                changed = True
    return value, False


def naive_ace(formula: Formula, var: int, phase: bool):
    """ACE score of ``var = phase`` computed on a rescanned copy of the formula.

    Returns (value, conflicted).  Satisfied constraints score zero.
    """
    if formula.num_vars > MAX_ACE_VARS:
        raise ValueError(f"naive ACE limited to {MAX_ACE_VARS} variables")
    value, conflicted = naive_up(formula, [var if phase else -var])
    xors = [(list(x.variables), x.parity) for x in formula.xors]

    score = 0.0
    for c in formula.clauses:
        if var not in c and -var not in c:
            continue
        if any(value.get(abs(l)) == (l > 0) for l in c):
            continue
        n = sum(1 for l in c if abs(l) not in value)
        score += 5 ** (2 - n)
    for vs, parity in xors:
        if var not in vs:
            continue
        free = sum(1 for u in vs if u not in value)
        ones = sum(1 for u in vs if value.get(u) is True)
        if free == 0 and (ones % 2 == 1) == parity:
            continue
        score += 5.5 * 0.85 ** free
    return score, conflicted


def random_instance(rng, min_vars=4, max_vars=14, xor_groups=False, max_size=4):
    """Random clause list with sizes 1..max_size, optionally with CNF-encoded XOR groups.

    Returns (num_vars, clauses).
    """
    n = rng.randint(min_vars, max_vars)
    m = rng.randint(n, 5 * n)
    sizes = [1] + [2] * 4 + [3] * 8 + [4] * 4
    clauses = []
    for _ in range(m):
        k = min(rng.choice([s for s in sizes if s <= max_size]), n)
        vs = rng.sample(range(1, n + 1), k)
        clauses.append([v if rng.random() < 0.5 else -v for v in vs])
    if xor_groups and n >= 2:
        for _ in range(rng.randint(1, 3)):
            k = rng.randint(2, min(4, n))
            vs = tuple(sorted(rng.sample(range(1, n + 1), k)))
            clauses.extend(list(c) for c in XorConstraint(vs, rng.random() < 0.5).to_clauses())
    rng.shuffle(clauses)
    return n, clauses
