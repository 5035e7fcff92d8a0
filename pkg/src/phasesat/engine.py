"""CDCL search: VSIDS decisions, 1UIP learning with minimization, LBD-based
clause database reduction, Luby restarts and the bounded probing run used for
instance features."""

import random
import time
from dataclasses import dataclass, field
from typing import Optional

from .dimacs import SolverVerdict, Status
from .formula import Formula
from .phase import PhasePolicy, PhaseSelector, PolicyKind, PolicyParams, SolvePlan
from .propagation import TRUE, UNASSIGNED, Propagator, conflict_literals, reason_literals

RESTART_UNIT = 64
VAR_DECAY = 0.95
REDUCE_START = 4000
REDUCE_GROWTH = 1.1
PROBE_MAX_CONFLICTS = 2000
PROBE_MAX_DECISIONS = 100000


def luby(i: int) -> int:
    """i-th element (0-based) of the Luby sequence 1 1 2 1 1 2 4 ..."""
    size, seq = 1, 0
    while size < i + 1:
        seq += 1
        size = 2 * size + 1
    while size - 1 != i:
        size = (size - 1) >> 1
        seq -= 1
        i = i % size
    return 1 << seq


@dataclass(frozen=True)
class Budget:
    max_conflicts: Optional[int] = None
    max_decisions: Optional[int] = None
    timeout: Optional[float] = None


@dataclass
class SolveStats:
    decisions: int = 0
    conflicts: int = 0
    propagations: int = 0
    restarts: int = 0
    learned: int = 0
    random_decisions: int = 0
    phase_flips: int = 0
    ace_probes: int = 0
    policy_trace: tuple = ()

    def to_text(self, prefix: str = "c ") -> str:
        lines = [
            f"decisions={self.decisions}",
            f"conflicts={self.conflicts}",
            f"propagations={self.propagations}",
            f"restarts={self.restarts}",
            f"learned={self.learned}",
            f"random_decisions={self.random_decisions}",
            f"phase_flips={self.phase_flips}",
            f"ace_probes={self.ace_probes}",
            f"policy_trace={','.join(self.policy_trace)}",
        ]
        return "".join(prefix + line + "\n" for line in lines)


@dataclass(frozen=True)
class ProbeReport:
    mean_conflict_depth: float
    unfixed_vars: int
    conflicts_seen: int
    conflict_depths: tuple = ()
    # SAT or UNSAT when the probing run already decided the instance
    verdict: SolverVerdict = field(default_factory=lambda: SolverVerdict(Status.UNKNOWN))

    @property
    def solved(self) -> bool:
        return self.verdict.status is not Status.UNKNOWN


class VarOrder:
    """Binary max-heap of variables keyed on activity; ties favour the lower index."""

    def __init__(self, activity: list, num_vars: int):
        self.activity = activity
        self.heap = list(range(1, num_vars + 1))
        self.pos = [-1] + list(range(num_vars))

    def __len__(self):
        return len(self.heap)

    def __contains__(self, v):
        return self.pos[v] >= 0

    def _up(self, i):
        heap, pos, act = self.heap, self.pos, self.activity
        v = heap[i]
        av = act[v]
        while i > 0:
            parent = (i - 1) >> 1
            pv = heap[parent]
            ap = act[pv]
            if av < ap or (av == ap and v > pv):
                break
            heap[i] = pv
            pos[pv] = i
            i = parent
        heap[i] = v
        pos[v] = i

    def _down(self, i):
        heap, pos, act = self.heap, self.pos, self.activity
        v = heap[i]
        av = act[v]
        n = len(heap)
        while True:
            child = 2 * i + 1
            if child >= n:
                break
            cv = heap[child]
            if child + 1 < n:
                rv = heap[child + 1]
                ac, ar = act[cv], act[rv]
                if ar > ac or (ar == ac and rv < cv):
                    child += 1
                    cv = rv
            ac = act[cv]
            if ac < av or (ac == av and cv > v):
                break
            heap[i] = cv
            pos[cv] = i
            i = child
        heap[i] = v
        pos[v] = i

    def insert(self, v):
        if self.pos[v] >= 0:
            return
        self.heap.append(v)
        self.pos[v] = len(self.heap) - 1
        self._up(len(self.heap) - 1)

    def increased(self, v):
        if self.pos[v] >= 0:
            self._up(self.pos[v])

    def pop(self) -> int:
        heap, pos = self.heap, self.pos
        top = heap[0]
        last = heap.pop()
        pos[top] = -1
        if heap:
            heap[0] = last
            pos[last] = 0
            self._down(0)
        return top


class Solver:
    """One CDCL search over a fixed formula.

    The same instance can run a probing pass, a presolve stage and the main
    search in sequence; learned clauses, activities and saved phases carry
    over between stages.
    """

    def __init__(self, formula: Formula, seed: int = 0, params: Optional[PolicyParams] = None,
                 policy: Optional[PhasePolicy] = None, keep_learned_log: bool = False):
        self.formula = formula
        self.num_vars = formula.num_vars
        self.params = params or (policy.params if policy else PolicyParams())
        self.rng = random.Random(seed)
        self.prop = Propagator(formula)
        self.activity = [0.0] * (self.num_vars + 1)
        self.var_inc = 1.0
        self.order = VarOrder(self.activity, self.num_vars)
        self.phases = PhaseSelector(formula, self.prop, self.rng,
                                    policy or PhasePolicy(PolicyKind.PRECOSAT, self.params))

        self.decisions = 0
        self.conflicts = 0
        self.restarts = 0
        self.learned_total = 0
        self.random_decisions = 0
        self.conflicts_since_restart = 0
        self.max_level_prev_epoch = None
        self._epoch_max = 0
        self.reduce_threshold = REDUCE_START
        self.conflict_depths = None
        self.learned_log = [] if keep_learned_log else None
        self.policy_trace = []
        self.status = None
        self.model = None
        self._seen = [False] * (self.num_vars + 1)

    # -- bookkeeping ----------------------------------------------------------------

    @property
    def policy(self) -> PhasePolicy:
        return self.phases.policy

    def set_policy(self, policy: PhasePolicy, tag: Optional[str] = None) -> None:
        self.phases.set_policy(policy)
        self.policy_trace.append(tag or policy.name)

    def stats(self) -> SolveStats:
        c = self.phases.counters
        return SolveStats(
            decisions=self.decisions,
            conflicts=self.conflicts,
            propagations=self.prop.propagations,
            restarts=self.restarts,
            learned=self.learned_total,
            random_decisions=self.random_decisions,
            phase_flips=c.flips,
            ace_probes=c.ace_probes,
            policy_trace=tuple(self.policy_trace),
        )

    def verdict(self) -> SolverVerdict:
        if self.status is Status.SAT:
            return SolverVerdict(Status.SAT, self.model)
        if self.status is Status.UNSAT:
            return SolverVerdict(Status.UNSAT)
        return SolverVerdict(Status.UNKNOWN)

    def fingerprint(self, portable: bool = False) -> tuple:
        return (
            self.prop.fingerprint(portable),
            tuple(self.activity),
            self.var_inc,
            tuple(self.order.heap),
            self.rng.getstate(),
            self.decisions,
            self.conflicts,
            self.restarts,
        )

    def _finish(self, status: Status) -> Status:
        self.status = status
        if status is Status.SAT:
            vals = self.prop.vals
            self.model = (False,) + tuple(vals[v] == TRUE for v in range(1, self.num_vars + 1))
        return status

    def _rescale(self) -> None:
        act = self.activity
        for u in range(1, self.num_vars + 1):
            act[u] *= 1e-100
        self.var_inc *= 1e-100

    def _backtrack(self, target: int) -> None:
        order = self.order
        for lit in self.prop.backtrack(target):
            order.insert(lit if lit > 0 else -lit)

    # -- conflict analysis -------------------------------------------------------------

    def analyze_conflict(self, confl):
        """1UIP learning.  Returns (clause, backjump level, lbd); clause[0] is asserting."""
        prop = self.prop
        vals, level, reason, trail = prop.vals, prop.level, prop.reason, prop.trail
        seen = self._seen
        current = prop.decision_level
        learnt = [0]
        to_clear = []
        path = 0
        act = self.activity
        pos = self.order.pos
        up = self.order._up
        lits = conflict_literals(confl, vals)
        idx = len(trail) - 1
        while True:
            for q in lits:
                v = q if q > 0 else -q
                if not seen[v] and level[v] > 0:
                    seen[v] = True
                    to_clear.append(v)
                    act[v] += self.var_inc
                    if act[v] > 1e100:
                        self._rescale()
                    if pos[v] >= 0:
                        up(pos[v])
                    if level[v] >= current:
                        path += 1
                    else:
                        learnt.append(q)
            while not seen[abs(trail[idx])]:
                idx -= 1
            p = trail[idx]
            idx -= 1
            v = p if p > 0 else -p
            seen[v] = False
            path -= 1
            if path == 0:
                break
            lits = reason_literals(reason[v], v, vals)
        learnt[0] = -p

        levels = {level[abs(q)] for q in learnt[1:]}
        kept = [learnt[0]]
        for q in learnt[1:]:
            v = abs(q)
            if reason[v] is None or not self._redundant(v, levels, to_clear):
                kept.append(q)
        for v in to_clear:
            seen[v] = False

        if len(kept) == 1:
            backjump = 0
        else:
            best = max(range(1, len(kept)), key=lambda i: level[abs(kept[i])])
            kept[1], kept[best] = kept[best], kept[1]
            backjump = level[abs(kept[1])]
        lbd = len({level[abs(q)] for q in kept})
        return kept, backjump, lbd

    def _redundant(self, var, levels, to_clear) -> bool:
        """True when ``var`` is implied by literals already in the learned clause."""
        prop = self.prop
        vals, level, reason = prop.vals, prop.level, prop.reason
        seen = self._seen
        top = len(to_clear)
        stack = [var]
        while stack:
            v = stack.pop()
            for q in reason_literals(reason[v], v, vals):
                u = q if q > 0 else -q
                if seen[u] or level[u] == 0:
                    continue
                if reason[u] is not None and level[u] in levels:
                    seen[u] = True
                    stack.append(u)
                    to_clear.append(u)
                else:
                    for w in to_clear[top:]:
                        seen[w] = False
                    del to_clear[top:]
                    return False
        return True

    # -- clause database ---------------------------------------------------------------

    def reduce_learned_db(self) -> int:
        """Remove the worst half of the non-glue, unlocked learned clauses.

        Returns the number of clauses removed.
        """
        prop = self.prop
        candidates = [c for c in prop.learned if c.lbd > 2 and not prop.is_locked(c)]
        candidates.sort(key=lambda c: (-c.lbd, -len(c.lits)))
        doomed = candidates[: len(candidates) // 2]
        for c in doomed:
            c.removed = True
        if doomed:
            prop.purge_removed()
        self.reduce_threshold *= REDUCE_GROWTH
        return len(doomed)

    # -- restarts -----------------------------------------------------------------------

    def restart_due(self) -> bool:
        return self.conflicts_since_restart >= RESTART_UNIT * luby(self.restarts)

    def restart(self) -> None:
        self._backtrack(0)
        self.restarts += 1
        self.conflicts_since_restart = 0
        self.max_level_prev_epoch = self._epoch_max
        self._epoch_max = 0

    # -- decisions ------------------------------------------------------------------------

    def _random_unassigned(self) -> int:
        vals = self.prop.vals
        n = self.num_vars
        rng = self.rng
        for _ in range(16):
            v = rng.randint(1, n)
            if vals[v] == UNASSIGNED:
                return v
        free = [v for v in range(1, n + 1) if vals[v] == UNASSIGNED]
        return free[rng.randrange(len(free))] if free else 0

    def pick_branch_variable(self) -> int:
        """Next decision variable, or 0 when every variable is assigned."""
        vals = self.prop.vals
        policy = self.phases.policy
        if policy.kind is PolicyKind.PRECOSAT_RANDOM and self.rng.random() < policy.params.p_random_var:
            v = self._random_unassigned()
            if v:
                self.random_decisions += 1
                return v
        order = self.order
        while len(order):
            v = order.pop()
            if vals[v] == UNASSIGNED:
                return v
        return 0

    # -- search --------------------------------------------------------------------------

    def search(self, max_conflicts: Optional[int] = None, max_decisions: Optional[int] = None,
               deadline: Optional[float] = None) -> Optional[Status]:
        """Run CDCL until decided or a budget (relative to now) runs out.

        Returns SAT/UNSAT, or None when stopped by the budget at a quiet point
        (propagation at fixpoint, no pending conflict).
        """
        if self.status is not None:
            return self.status
        prop = self.prop
        if prop.root_conflict:
            return self._finish(Status.UNSAT)
        conflict_limit = None if max_conflicts is None else self.conflicts + max_conflicts
        decision_limit = None if max_decisions is None else self.decisions + max_decisions
        phases = self.phases
        ticks = 0

        while True:
            confl = prop.propagate()
            if confl is not None:
                self.conflicts += 1
                self.conflicts_since_restart += 1
                if prop.decision_level == 0:
                    return self._finish(Status.UNSAT)
                if self.conflict_depths is not None:
                    self.conflict_depths.append(prop.decision_level)
                learnt, backjump, lbd = self.analyze_conflict(confl)
                self._backtrack(backjump)
                self.learned_total += 1
                if self.learned_log is not None:
                    self.learned_log.append(tuple(learnt))
                if len(learnt) == 1:
                    prop.enqueue(learnt[0], None)
                else:
                    prop.enqueue(learnt[0], prop.add_learned(learnt, lbd))
                self.var_inc /= VAR_DECAY
                continue

            if self.restart_due() and prop.decision_level > 0:
                self.restart()
            if len(prop.learned) >= self.reduce_threshold:
                self.reduce_learned_db()
            if conflict_limit is not None and self.conflicts >= conflict_limit:
                return None
            if decision_limit is not None and self.decisions >= decision_limit:
                return None
            if deadline is not None:
                ticks += 1
                if ticks & 63 == 0 and time.monotonic() >= deadline:
                    return None

            v = self.pick_branch_variable()
            if v == 0:
                return self._finish(Status.SAT)
            depth = prop.decision_level
            phase = phases.select(v, depth, self.decisions, self.max_level_prev_epoch)
            self.decisions += 1
            prop.new_decision_level()
            prop.enqueue(v if phase else -v, None)
            if depth + 1 > self._epoch_max:
                self._epoch_max = depth + 1

    def probe(self, max_conflicts: int = PROBE_MAX_CONFLICTS,
              max_decisions: int = PROBE_MAX_DECISIONS) -> ProbeReport:
        """Bounded PrecoSAT-policy run measuring conflict depth and root-fixed variables.

        Learned clauses (units included) stay in the solver for later stages.
        When the run decides the instance the report carries the verdict.
        """
        self.set_policy(PhasePolicy(PolicyKind.PRECOSAT, self.params), "probe:precosat")
        self.conflict_depths = []
        status = self.search(max_conflicts, max_decisions)
        depths = tuple(self.conflict_depths)
        self.conflict_depths = None
        if status is None:
            self._backtrack(0)
        prop = self.prop
        fixed = prop.level_marks[0] if prop.level_marks else len(prop.trail)
        mean = sum(depths) / len(depths) if depths else 0.0
        return ProbeReport(
            mean_conflict_depth=mean,
            unfixed_vars=self.num_vars - fixed,
            conflicts_seen=len(depths),
            conflict_depths=depths,
            verdict=self.verdict(),
        )

    def run(self, plan: SolvePlan, budget: Optional[Budget] = None) -> SolverVerdict:
        """Execute ``plan`` (presolve stage first, if any) within ``budget``."""
        budget = budget or Budget()
        deadline = None if budget.timeout is None else time.monotonic() + budget.timeout
        conflict_limit = None if budget.max_conflicts is None else self.conflicts + budget.max_conflicts
        decision_limit = None if budget.max_decisions is None else self.decisions + budget.max_decisions

        def remaining(limit, used):
            return None if limit is None else max(0, limit - used)

        if self.status is None and plan.presolve is not None:
            pre = plan.presolve
            self.set_policy(pre.policy, f"presolve:{pre.policy.name}")
            allowed = pre.decision_budget
            left = remaining(decision_limit, self.decisions)
            if left is not None:
                allowed = min(allowed, left)
            self.search(remaining(conflict_limit, self.conflicts), allowed, deadline)
            if self.status is None:
                self._backtrack(0)

        if self.status is None:
            self.set_policy(plan.main, f"main:{plan.main.name}")
            self.search(remaining(conflict_limit, self.conflicts),
                        remaining(decision_limit, self.decisions), deadline)
        return self.verdict()


def solve(formula: Formula, plan: Optional[SolvePlan] = None, budget: Optional[Budget] = None,
          seed: int = 0, policy: Optional[PhasePolicy] = None):
    """Solve ``formula`` under ``plan`` (or a single ``policy``); returns (verdict, stats)."""
    if plan is None:
        plan = SolvePlan.single(policy or PhasePolicy(PolicyKind.PRECOSAT))
    solver = Solver(formula, seed=seed, params=plan.main.params)
    solver.policy_trace.extend(plan.trace)
    verdict = solver.run(plan, budget)
    return verdict, solver.stats()
