import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from classifier_cases import BOUNDARIES, CASES, PRIORITY_3D_2B, PRIORITY_4A_2A
from phasesat.dimacs import parse_dimacs
from phasesat.engine import ProbeReport, Solver
from phasesat.features import LISTED, PRESOLVE_DECISIONS, FeatureVector, classify, extract_features, plan_lines
from phasesat.formula import detect_xor


def _features(text, **report):
    f = detect_xor(parse_dimacs(text))
    rep = ProbeReport(report.get("depth", 0.0), report.get("unfixed", 0), report.get("conflicts", 0))
    return extract_features(f, rep)


def test_extract_three_var_fixture():
    fv = _features("p cnf 3 3\n1 2 0\n-1 3 0\n1 2 3 0\n")
    assert (fv.c, fv.v, fv.ratio, fv.bin, fv.large, fv.xor) == (3, 3, 1.0, 2, 0, 0)


def test_extract_xor_fixture():
    fv = _features("p cnf 2 2\n1 2 0\n-1 -2 0\n")
    assert (fv.c, fv.bin, fv.xor) == (2, 2, 1)


def test_extract_large_boundary():
    assert _features("p cnf 9 1\n1 2 3 4 5 6 7 8 9 0\n").large == 1
    assert _features("p cnf 9 1\n1 2 3 4 5 6 7 8 0\n").large == 0


def test_extract_from_probe():
    f = detect_xor(parse_dimacs("p cnf 4 2\n1 0\n-1 2 0\n"))
    fv = extract_features(f, Solver(f).probe())
    assert fv.unfixed == 2
    assert fv.probe_conflicts == 0 and fv.mean_conflict_depth == 0.0


def test_empty_formula_features_and_plan():
    f = detect_xor(parse_dimacs("p cnf 0 0\n"))
    fv = extract_features(f, Solver(f).probe())
    assert [line.split("=")[1] for line in fv.lines()] == ["0", "0", "0", "0", "0", "0", "0", "0"]
    assert classify(fv).main.name == "ace-precosat"


@pytest.mark.parametrize("case", CASES, ids=[c[0] for c in CASES])
def test_rule_table(case):
    _, fv, presolve, main, trace = case
    plan = classify(fv)
    assert plan.presolve.policy.name == presolve
    assert plan.presolve.decision_budget == PRESOLVE_DECISIONS
    assert plan.main.name == main
    assert plan.trace == trace


@pytest.mark.parametrize("case", BOUNDARIES, ids=[b[0] for b in BOUNDARIES])
def test_strict_boundaries(case):
    _, fv, presolve, main = case
    plan = classify(fv)
    assert (plan.presolve.policy.name, plan.main.name) == (presolve, main)


def test_specific_rule_wins():
    assert classify(PRIORITY_3D_2B).trace[1] == "3d"
    assert classify(PRIORITY_3D_2B).main.name == "ace"
    assert classify(PRIORITY_4A_2A).main.name == "precosat-tailjw"


def test_listed_order_ablation():
    assert classify(PRIORITY_3D_2B, LISTED).trace[1] == "2b"
    assert classify(PRIORITY_4A_2A, LISTED).main.name == "precosat"


def test_depth_unobserved_does_not_fire_3b():
    fv = FeatureVector.of(c=100, v=50, mean_conflict_depth=0.0, probe_conflicts=0)
    assert classify(fv).trace[1] == "5"
    fv = FeatureVector.of(c=100, v=50, mean_conflict_depth=0.0, probe_conflicts=3)
    assert classify(fv).trace[1] == "3b"


def test_no_binary_clauses_never_fires_4b():
    fv = FeatureVector.of(c=60000, v=1000, bin=0)
    assert math.isinf(fv.c / fv.bin if fv.bin else math.inf)
    assert classify(fv).trace[1] != "4b"


def test_plan_lines():
    plan = classify(CASES[1][1])
    assert plan_lines(plan) == ["plan.presolve=precosat-random:200000", "plan.main=ace-precosat", "plan.trace=1,5"]


consistent_vectors = st.builds(
    lambda c, v, bin_share, xor, large, unfixed, depth: FeatureVector.of(
        c, v, depth, min(unfixed, v), int(c * bin_share), xor, min(large, c), 10),
    st.integers(0, 2_000_000), st.integers(1, 500_000), st.floats(0, 1), st.integers(0, 10_000),
    st.integers(0, 100), st.integers(0, 500_000), st.floats(0, 200),
)


@given(consistent_vectors)
def test_classify_is_pure_and_total(fv):
    a, b = classify(fv), classify(fv)
    assert a == b
    assert a.trace and a.presolve is not None


@given(consistent_vectors)
def test_2c_and_4b_unreachable_from_real_counts(fv):
    # with ratio = c/v and bin <= c these two subcases can never fire
    assert classify(fv).trace[1] not in ("2c", "4b")
    assert classify(fv, LISTED).trace[1] not in ("2c", "4b")
