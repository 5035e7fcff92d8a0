import random

import pytest

from oracle import brute_force_solve, enumerate_models, naive_ace, random_instance, tt_equivalent
from phasesat.formula import Formula, XorConstraint, detect_xor


def test_contradiction_has_no_models():
    r = brute_force_solve(Formula.from_clauses(1, [(1,), (-1,)]))
    assert not r.satisfiable and r.count == 0 and r.witness is None


def test_empty_formula_counts_all_assignments():
    assert brute_force_solve(Formula.from_clauses(2, [])).count == 4


def test_xor_count():
    f = detect_xor(Formula.from_clauses(2, [(1, 2), (-1, -2)]))
    assert f.xors
    assert brute_force_solve(f).count == 2


def test_rejects_oversize():
    with pytest.raises(ValueError):
        brute_force_solve(Formula.from_clauses(21, []))
    with pytest.raises(ValueError):
        naive_ace(Formula.from_clauses(31, []), 1, True)


@pytest.mark.parametrize("seed", range(40))
def test_bitmask_oracle_matches_plain_enumeration(seed):
    rng = random.Random(seed)
    n, clauses = random_instance(rng, 1, 9, xor_groups=seed % 2 == 0)
    f = detect_xor(Formula.from_clauses(n, clauses))
    models = enumerate_models(f)
    r = brute_force_solve(f)
    assert r.count == len(models) == len(set(models))
    assert r.satisfiable == bool(models)
    if r.witness is not None:
        assert f.evaluate(r.witness)
        assert r.witness in models


def test_tt_equivalent_examples():
    assert tt_equivalent([(1, 2), (-1, -2)], XorConstraint((1, 2), True))
    assert not tt_equivalent([(1, 2), (-1, -2)], XorConstraint((1, 2), False))
    assert not tt_equivalent([(1, 2)], XorConstraint((1, 2), True))
    assert not tt_equivalent([(1, 2, 3)], XorConstraint((1, 2, 3), True))


def test_naive_ace_examples():
    f = Formula.from_clauses(3, [(1, 2), (-1, 2, 3), (-2, 3)])
    assert naive_ace(f, 1, True) == (1.0, False)
    assert naive_ace(f, 1, False) == (0.0, False)
    g = Formula.from_clauses(2, [(1, 2)])
    assert naive_ace(g, 2, True) == (0.0, False)
    isolated = Formula.from_clauses(3, [(1, 2)])
    assert naive_ace(isolated, 3, True) == (0.0, False)
    h = Formula.from_clauses(1, [(1,), (-1,)])
    assert naive_ace(h, 1, False)[1]
