"""Trail, watched-literal propagation over clauses and XOR rows, lookahead probes.

Per-literal arrays (``vals``, ``watches``) have length 2V+1 and are indexed
directly by the signed literal: negative literals wrap around to the upper
half of the list, so ``vals[-3]`` is the slot for x3 being false.
"""

from dataclasses import dataclass
from typing import Optional

from .formula import Formula

TRUE, FALSE, UNASSIGNED = 1, -1, 0


class Clause:
    __slots__ = ("lits", "learned", "lbd", "removed")

    def __init__(self, lits, learned=False, lbd=0):
        self.lits = lits
        self.learned = learned
        self.lbd = lbd
        self.removed = False

    def __repr__(self):
        tag = f"learned lbd={self.lbd}" if self.learned else "original"
        return f"Clause({self.lits}, {tag})"


class XorRow:
    """XOR constraint in propagation form; ``vars[0]`` and ``vars[1]`` are watched."""

    __slots__ = ("vars", "parity")

    def __init__(self, variables, parity):
        self.vars = list(variables)
        self.parity = parity

    def __repr__(self):
        return f"XorRow({self.vars}, {'odd' if self.parity else 'even'})"


@dataclass(frozen=True)
class LookaheadReport:
    conflicted: bool
    # (index into formula.clauses, reduced size or None when satisfied)
    cnf_sizes: tuple
    # (index into formula.xors, reduced size or None when satisfied)
    xor_sizes: tuple
    truncated: bool = False


def reason_literals(reason, var, vals):
    """Literals of ``reason`` other than the one it implied for ``var``, all false."""
    if isinstance(reason, Clause):
        return [l for l in reason.lits if l != var and l != -var]
    return [-u if vals[u] == TRUE else u for u in reason.vars if u != var]


def conflict_literals(conflict, vals):
    if isinstance(conflict, Clause):
        return list(conflict.lits)
    return [-u if vals[u] == TRUE else u for u in conflict.vars]


class Propagator:
    """Assignment trail with unit propagation for one solver instance."""

    def __init__(self, formula: Formula, saved_phase: Optional[list] = None):
        n = formula.num_vars
        self.formula = formula
        self.num_vars = n
        self.vals = [UNASSIGNED] * (2 * n + 1)
        self.level = [0] * (n + 1)
        self.reason = [None] * (n + 1)
        self.trail = []
        self.level_marks = []
        self.qhead = 0
        self.watches = [[] for _ in range(2 * n + 1)]
        self.xwatches = [[] for _ in range(n + 1)]
        self.saved_phase = saved_phase if saved_phase is not None else [None] * (n + 1)
        self.originals = []
        self.xor_rows = []
        self.learned = []
        self.propagations = 0
        self.probe_propagations = 0
        self.root_conflict = formula.trivially_unsat
        self._journal = None

        units = []
        for lits in formula.clauses:
            c = Clause(list(lits))
            self.originals.append(c)
            if len(lits) == 1:
                units.append(lits[0])
            else:
                self.watches[lits[0]].append(c)
                self.watches[lits[1]].append(c)
        for x in formula.xors:
            row = XorRow(x.variables, x.parity)
            self.xor_rows.append(row)
            self.xwatches[row.vars[0]].append(row)
            self.xwatches[row.vars[1]].append(row)
        for lit in units:
            value = self.vals[lit]
            if value == FALSE:
                self.root_conflict = True
            elif value == UNASSIGNED:
                self.enqueue(lit, None)

    @property
    def decision_level(self) -> int:
        return len(self.level_marks)

    @property
    def probing(self) -> bool:
        return self._journal is not None

    def value(self, lit: int) -> int:
        return self.vals[lit]

    def enqueue(self, lit: int, reason) -> None:
        """Assign ``lit`` true at the current level; the variable must be unassigned."""
        assert self.vals[lit] == UNASSIGNED, f"literal {lit} already assigned"
        v = lit if lit > 0 else -lit
        self.vals[lit] = TRUE
        self.vals[-lit] = FALSE
        self.level[v] = len(self.level_marks)
        self.reason[v] = reason
        self.trail.append(lit)
        if self._journal is None:
            self.saved_phase[v] = lit > 0

    def new_decision_level(self) -> None:
        self.level_marks.append(len(self.trail))

    def backtrack(self, target: int) -> list:
        """Undo every level above ``target``; returns the unassigned literals."""
        if len(self.level_marks) <= target:
            return []
        mark = self.level_marks[target]
        popped = self.trail[mark:]
        vals, level, reason = self.vals, self.level, self.reason
        for lit in popped:
            v = lit if lit > 0 else -lit
            vals[lit] = vals[-lit] = UNASSIGNED
            level[v] = 0
            reason[v] = None
        del self.trail[mark:]
        del self.level_marks[target:]
        self.qhead = mark
        return popped

    # -- clause database -------------------------------------------------

    def attach(self, clause: Clause) -> None:
        self.watches[clause.lits[0]].append(clause)
        self.watches[clause.lits[1]].append(clause)

    def add_learned(self, lits: list, lbd: int) -> Clause:
        """Store and watch a learned clause of size >= 2 (lits[0], lits[1] watched)."""
        c = Clause(lits, learned=True, lbd=lbd)
        self.learned.append(c)
        self.attach(c)
        return c

    def purge_removed(self) -> None:
        """Drop clauses flagged ``removed`` from the learned list and watch lists."""
        self.learned = [c for c in self.learned if not c.removed]
        for ws in self.watches:
            if ws:
                ws[:] = [c for c in ws if not c.removed]

    def is_locked(self, clause: Clause) -> bool:
        lit = clause.lits[0]
        v = lit if lit > 0 else -lit
        return self.reason[v] is clause and self.vals[lit] == TRUE

    # -- propagation -----------------------------------------------------

    def propagate(self, step_cap: Optional[int] = None):
        """Run unit propagation to fixpoint.

        Returns the falsified Clause or XorRow, or None when quiet.  With
        ``step_cap`` the run stops after that many queue entries; callers must
        treat a capped run as possibly incomplete.
        """
        vals = self.vals
        watches = self.watches
        trail = self.trail
        level = self.level
        reason = self.reason
        saved = self.saved_phase
        journal = self._journal
        lvl = len(self.level_marks)
        start = qhead = self.qhead
        stop = None if step_cap is None else start + step_cap
        confl = None

        while qhead < len(trail):
            if stop is not None and qhead >= stop:
                break
            p = trail[qhead]
            qhead += 1
            false_lit = -p
            ws = watches[false_lit]
            if journal is not None:
                jw, jx, jo = journal
                if false_lit not in jw:
                    jw[false_lit] = ws[:]
            i = j = 0
            n = len(ws)
            while i < n:
                c = ws[i]
                i += 1
                lits = c.lits
                first = lits[0]
                if first == false_lit:
                    if journal is not None and id(c) not in jo:
                        jo[id(c)] = (c, lits[:])
                    first = lits[0] = lits[1]
                    lits[1] = false_lit
                if vals[first] == TRUE:
                    ws[j] = c
                    j += 1
                    continue
                for k in range(2, len(lits)):
                    lit = lits[k]
                    if vals[lit] != FALSE:
                        if journal is not None:
                            if id(c) not in jo:
                                jo[id(c)] = (c, lits[:])
                            if lit not in jw:
                                jw[lit] = watches[lit][:]
                        lits[1] = lit
                        lits[k] = false_lit
                        watches[lit].append(c)
                        break
                else:
                    ws[j] = c
                    j += 1
                    if vals[first] == FALSE:
                        confl = c
                        while i < n:
                            ws[j] = ws[i]
                            j += 1
                            i += 1
                        break
                    v = first if first > 0 else -first
                    vals[first] = TRUE
                    vals[-first] = FALSE
                    level[v] = lvl
                    reason[v] = c
                    trail.append(first)
                    if journal is None:
                        saved[v] = first > 0
            del ws[j:]
            if confl is not None:
                break
            xs = self.xwatches[p if p > 0 else -p]
            if xs:
                confl = self._propagate_xor(p if p > 0 else -p, xs, lvl)
                if confl is not None:
                    break

        processed = qhead - start
        self.qhead = len(trail) if confl is not None else qhead
        if journal is None:
            self.propagations += processed
        else:
            self.probe_propagations += processed
        return confl

    def _propagate_xor(self, v, xs, lvl):
        vals = self.vals
        xwatches = self.xwatches
        journal = self._journal
        if journal is not None:
            jw, jx, jo = journal
            if v not in jx:
                jx[v] = xs[:]
        i = j = 0
        n = len(xs)
        while i < n:
            row = xs[i]
            i += 1
            vs = row.vars
            if vs[0] == v:
                if journal is not None and id(row) not in jo:
                    jo[id(row)] = (row, vs[:])
                vs[0] = vs[1]
                vs[1] = v
            for k in range(2, len(vs)):
                u = vs[k]
                if vals[u] == UNASSIGNED:
                    if journal is not None:
                        if id(row) not in jo:
                            jo[id(row)] = (row, vs[:])
                        if u not in jx:
                            jx[u] = xwatches[u][:]
                    vs[1] = u
                    vs[k] = v
                    xwatches[u].append(row)
                    break
            else:
                xs[j] = row
                j += 1
                other = vs[0]
                want = row.parity
                for k in range(1, len(vs)):
                    if vals[vs[k]] == TRUE:
                        want = not want
                state = vals[other]
                if state == UNASSIGNED:
                    lit = other if want else -other
                    vals[lit] = TRUE
                    vals[-lit] = FALSE
                    self.level[other] = lvl
                    self.reason[other] = row
                    self.trail.append(lit)
                    if journal is None:
                        self.saved_phase[other] = want
                elif (state == TRUE) != want:
                    while i < n:
                        xs[j] = xs[i]
                        j += 1
                        i += 1
                    del xs[j:]
                    return row
        del xs[j:]
        return None

    # -- lookahead -------------------------------------------------------

    def lookahead(self, var: int, phase: bool, step_cap: Optional[int] = None) -> LookaheadReport:
        """Probe ``var = phase`` with full propagation, then undo every effect.

        Trail, values, watch lists, literal order inside clauses and saved
        phases are restored exactly.  Reported sizes cover the formula clauses
        and XOR constraints over ``var``.
        """
        assert self.vals[var] == UNASSIGNED, f"variable {var} already assigned"
        assert self.qhead == len(self.trail), "lookahead requires propagation at fixpoint"
        jw, jx, jo = {}, {}, {}
        self._journal = (jw, jx, jo)
        mark = len(self.trail)
        self.level_marks.append(mark)
        try:
            self.enqueue(var if phase else -var, None)
            confl = self.propagate(step_cap)
            truncated = confl is None and self.qhead < len(self.trail)
            report = LookaheadReport(
                conflicted=confl is not None,
                cnf_sizes=self._reduced_cnf(var),
                xor_sizes=self._reduced_xor(var),
                truncated=truncated,
            )
        finally:
            vals, level, reason = self.vals, self.level, self.reason
            for lit in self.trail[mark:]:
                v = lit if lit > 0 else -lit
                vals[lit] = vals[-lit] = UNASSIGNED
                level[v] = 0
                reason[v] = None
            del self.trail[mark:]
            self.level_marks.pop()
            self.qhead = mark
            for lit, saved in jw.items():
                self.watches[lit] = saved
            for v, saved in jx.items():
                self.xwatches[v] = saved
            for obj, saved in jo.values():
                if isinstance(obj, Clause):
                    obj.lits[:] = saved
                else:
                    obj.vars[:] = saved
            self._journal = None
        return report

    def _reduced_cnf(self, var):
        vals = self.vals
        out = []
        f = self.formula
        for idx in sorted(f.occurrences(var) + f.occurrences(-var)):
            size = 0
            for lit in f.clauses[idx]:
                state = vals[lit]
                if state == TRUE:
                    size = None
                    break
                if state == UNASSIGNED:
                    size += 1
            out.append((idx, size))
        return tuple(out)

    def _reduced_xor(self, var):
        vals = self.vals
        out = []
        for idx in self.formula.xor_occurrences(var):
            x = self.formula.xors[idx]
            free = 0
            odd = False
            for u in x.variables:
                state = vals[u]
                if state == UNASSIGNED:
                    free += 1
                elif state == TRUE:
                    odd = not odd
            # a fully assigned constraint is satisfied (a violated one conflicts)
            out.append((idx, None if free == 0 and odd == x.parity else free))
        return tuple(out)

    def fingerprint(self, portable: bool = False) -> tuple:
        """Deep snapshot of all propagation state, for purity checks.

        Reasons and watch lists are keyed by object identity, which is exact
        within one solver; ``portable`` keys them by content instead so that
        snapshots of two separate runs can be compared.
        """
        if portable:
            def key(r):
                return tuple(r.lits) if hasattr(r, "lits") else (tuple(r.vars), r.parity)
        else:
            key = id
        return (
            tuple(self.trail),
            tuple(self.level_marks),
            self.qhead,
            tuple(self.vals),
            tuple(self.level),
            tuple(key(r) if r is not None else 0 for r in self.reason),
            tuple(tuple(key(c) for c in ws) for ws in self.watches),
            tuple(tuple(key(r) for r in xs) for xs in self.xwatches),
            tuple(tuple(c.lits) for c in self.originals),
            tuple(tuple(c.lits) for c in self.learned),
            tuple(tuple(r.vars) for r in self.xor_rows),
            tuple(self.saved_phase),
            self.propagations,
        )
