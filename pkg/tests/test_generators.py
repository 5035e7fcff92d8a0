import pytest

from oracle import brute_force_solve
from phasesat.dimacs import parse_dimacs
from phasesat.formula import detect_xor
from phasesat.generators import gen_family, parity_chain, pigeonhole, random_ksat


def test_parity_chain_three_inputs_unsat():
    f = detect_xor(parse_dimacs(parity_chain(3, seed=1)))
    assert f.num_vars == 7
    assert len(f.xors) == 4
    assert not brute_force_solve(f).satisfiable


def test_parity_chain_consistent_is_sat():
    f = detect_xor(parse_dimacs(parity_chain(4, seed=2, contradict=False)))
    r = brute_force_solve(f)
    assert r.satisfiable
    assert sum(r.witness[1:5]) % 2 == 1


def test_pigeonhole_3_into_2_unsat():
    f = parse_dimacs(pigeonhole(2))
    assert f.num_vars == 6
    assert not brute_force_solve(f).satisfiable


def test_random_ksat_reproducible():
    a = random_ksat(30, 4.26, seed=5)
    assert a == random_ksat(30, 4.26, seed=5)
    assert a != random_ksat(30, 4.26, seed=6)
    f = parse_dimacs(a)
    assert len(f.raw_clauses) == round(4.26 * 30)
    assert all(len(c) == 3 for c in f.raw_clauses)


def test_gen_family_dispatch():
    assert gen_family("pigeonhole", 3) == pigeonhole(3)
    with pytest.raises(ValueError):
        gen_family("nope", 3)
    with pytest.raises(ValueError):
        parity_chain(1)
