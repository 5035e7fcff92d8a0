"""Instance features and the rule set mapping them to a solve plan."""

import math
from dataclasses import dataclass
from typing import Optional

from .engine import ProbeReport
from .formula import Formula
from .phase import PhasePolicy, PolicyKind, PolicyParams, Presolve, SolvePlan

PRESOLVE_DECISIONS = 200000

PRIORITY = "priority"
LISTED = "listed"


@dataclass(frozen=True)
class FeatureVector:
    c: int
    v: int
    ratio: float
    mean_conflict_depth: float
    unfixed: int
    bin: int
    xor: int
    large: int
    # conflicts behind mean_conflict_depth; 0 means the depth was never
    # observed, None that the vector did not come from a probe
    probe_conflicts: Optional[int] = None

    @classmethod
    def of(cls, c, v, mean_conflict_depth=0.0, unfixed=0, bin=0, xor=0, large=0,
           probe_conflicts=None) -> "FeatureVector":
        return cls(c, v, c / v if v > 0 else 0.0, mean_conflict_depth, unfixed, bin, xor, large,
                   probe_conflicts)

    def lines(self) -> list:
        return [
            f"c={self.c}",
            f"v={self.v}",
            f"ratio={self.ratio:.6g}",
            f"mean_conflict_depth={self.mean_conflict_depth:.6g}",
            f"unfixed={self.unfixed}",
            f"bin={self.bin}",
            f"xor={self.xor}",
            f"large={self.large}",
        ]


def extract_features(formula: Formula, report: ProbeReport) -> FeatureVector:
    raw = formula.raw_counts
    return FeatureVector.of(
        c=raw.clauses,
        v=formula.num_vars,
        mean_conflict_depth=report.mean_conflict_depth,
        unfixed=report.unfixed_vars,
        bin=raw.binary,
        xor=len(formula.xors),
        large=raw.large,
        probe_conflicts=report.conflicts_seen,
    )


def _clauses_per_binary(f: FeatureVector) -> float:
    # no binary clauses: the ratio is unbounded and never below a threshold
    return f.c / f.bin if f.bin else math.inf


def _rule4(f):
    if f.xor == 0 and f.ratio > 100 and f.v < 1500:
        return "4a"
    if f.xor == 0 and f.ratio > 55 and _clauses_per_binary(f) < 0.9:
        return "4b"
    return None


def _rule3(f):
    if f.mean_conflict_depth < 30 and f.probe_conflicts != 0:
        return "3b"
    if f.bin > 400000 and f.bin > f.c / 2 and f.v / 20 > f.unfixed:
        return "3c"
    if f.xor > 2000 and f.xor > f.c / 12 and f.unfixed < 15000:
        return "3d"
    return None


def _rule2(f):
    if f.xor < 1000 and f.c > 300000:
        return "2a"
    if f.xor > 2000 and f.unfixed < 15000:
        return "2b"
    if f.ratio < 6 and f.c / 15 > f.v and f.c / 3 < f.bin / 2:
        return "2c"
    if 5 < f.large < 40:
        return "2d"
    return None


_MAIN_RULES = {
    PRIORITY: ((_rule4, PolicyKind.PRECOSAT_TAIL_JW), (_rule3, PolicyKind.ACE), (_rule2, PolicyKind.PRECOSAT)),
    LISTED: ((_rule2, PolicyKind.PRECOSAT), (_rule3, PolicyKind.ACE), (_rule4, PolicyKind.PRECOSAT_TAIL_JW)),
}


def classify(f: FeatureVector, order: str = PRIORITY, params: PolicyParams = PolicyParams()) -> SolvePlan:
    """Map a feature vector to a presolve stage and a main phase policy.

    Main rules are tried most-specific first (4, 3, 2); ``order="listed"``
    tries them in numbering order (2, 3, 4) instead.
    """
    if 50000 < f.c < 220000:
        presolve, pre_rule = PolicyKind.PRECOSAT_RANDOM, "1"
    elif f.c < 18000:
        presolve, pre_rule = PolicyKind.ACE, "3a"
    else:
        presolve, pre_rule = PolicyKind.PRECOSAT, "5-presolve"

    main, main_rule = PolicyKind.ACE_PRECOSAT, "5"
    for rule, kind in _MAIN_RULES[order]:
        fired = rule(f)
        if fired:
            main, main_rule = kind, fired
            break

    return SolvePlan(
        main=PhasePolicy(main, params),
        presolve=Presolve(PhasePolicy(presolve, params), PRESOLVE_DECISIONS),
        trace=(pre_rule, main_rule),
    )


def plan_lines(plan: SolvePlan) -> list:
    pre = plan.presolve
    pre_text = f"{pre.policy.name}:{pre.decision_budget}" if pre else "none"
    return [
        f"plan.presolve={pre_text}",
        f"plan.main={plan.main.name}",
        f"plan.trace={','.join(plan.trace)}",
    ]
