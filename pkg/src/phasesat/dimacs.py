"""DIMACS CNF input and SAT-competition style output."""

import enum
import re
from dataclasses import dataclass
from typing import Optional, Union

from .formula import Formula


class DiagnosticKind(enum.Enum):
    BAD_HEADER = "BadHeader"
    LITERAL_OUT_OF_RANGE = "LiteralOutOfRange"
    MISSING_TERMINATOR = "MissingTerminator"
    UNEXPECTED_TOKEN = "UnexpectedToken"
    EMPTY_FILE = "EmptyFile"


@dataclass(frozen=True)
class ParseDiagnostic:
    line: int
    column: int
    kind: DiagnosticKind
    message: str

    def __str__(self):
        return f"{self.line}:{self.column}: {self.kind.value}: {self.message}"


class DimacsError(ValueError):
    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(str(d) for d in self.diagnostics))


class Status(enum.Enum):
    SAT = "SATISFIABLE"
    UNSAT = "UNSATISFIABLE"
    UNKNOWN = "UNKNOWN"


EXIT_CODES = {Status.SAT: 10, Status.UNSAT: 20, Status.UNKNOWN: 0}


@dataclass(frozen=True)
class SolverVerdict:
    status: Status
    # model[v] for v in 1..V; index 0 unused
    model: Optional[tuple] = None

    def __post_init__(self):
        if (self.model is not None) != (self.status is Status.SAT):
            raise ValueError("a model is present exactly when the verdict is SAT")

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.status]


_TOKEN = re.compile(r"\S+")


def parse_dimacs(data: Union[bytes, str]) -> Formula:
    """Parse DIMACS CNF text.

    Raises DimacsError on a malformed header, an out-of-range literal, or a
    clause left unterminated at end of input.  A clause count disagreeing
    with the header only records a warning.
    """
    text = data.decode("utf-8", errors="replace") if isinstance(data, bytes) else data

    header = None
    clauses = []
    current = []
    current_pos = None
    saw_content = False

    for lineno, line in enumerate(text.split("\n"), 1):
        stripped = line.strip()
        if not stripped or stripped[0] == "c":
            continue
        saw_content = True
        col = line.index(stripped[0]) + 1
        if stripped[0] == "p":
            if header is not None:
                raise DimacsError([ParseDiagnostic(lineno, col, DiagnosticKind.BAD_HEADER, "duplicate header")])
            header = _parse_header(stripped, lineno, col)
            continue
        if stripped[0] == "%":
            # SATLIB end-of-data marker
            break
        if header is None:
            raise DimacsError([ParseDiagnostic(lineno, col, DiagnosticKind.BAD_HEADER,
                                               "clause data before 'p cnf' header")])
        for m in _TOKEN.finditer(line):
            tok = m.group()
            col = m.start() + 1
            try:
                lit = int(tok)
            except ValueError:
                raise DimacsError([ParseDiagnostic(lineno, col, DiagnosticKind.UNEXPECTED_TOKEN,
                                                   f"unexpected token {tok!r}")]) from None
            if lit == 0:
                clauses.append(current)
                current = []
                current_pos = None
                continue
            if abs(lit) > header[0]:
                raise DimacsError([ParseDiagnostic(lineno, col, DiagnosticKind.LITERAL_OUT_OF_RANGE,
                                                   f"literal {lit} exceeds variable count {header[0]}")])
            if current_pos is None:
                current_pos = (lineno, col)
            current.append(lit)

    if header is None:
        kind = DiagnosticKind.BAD_HEADER if saw_content else DiagnosticKind.EMPTY_FILE
        raise DimacsError([ParseDiagnostic(1, 1, kind, "no 'p cnf' header")])
    if current:
        lineno, col = current_pos
        raise DimacsError([ParseDiagnostic(lineno, col, DiagnosticKind.MISSING_TERMINATOR,
                                           "clause not terminated by 0")])

    num_vars, num_clauses = header
    warnings = []
    if len(clauses) != num_clauses:
        warnings.append(f"header declares {num_clauses} clauses, found {len(clauses)}")
    return Formula.from_clauses(num_vars, clauses, warnings=tuple(warnings))


def _parse_header(stripped: str, line: int, col: int) -> tuple:
    fields = stripped.split()
    if len(fields) != 4 or fields[1] != "cnf":
        raise DimacsError([ParseDiagnostic(line, col, DiagnosticKind.BAD_HEADER,
                                           "header must read 'p cnf <vars> <clauses>'")])
    try:
        num_vars, num_clauses = int(fields[2]), int(fields[3])
    except ValueError:
        raise DimacsError([ParseDiagnostic(line, col, DiagnosticKind.BAD_HEADER,
                                           "non-integer count in header")]) from None
    if num_vars < 0 or num_clauses < 0:
        raise DimacsError([ParseDiagnostic(line, col, DiagnosticKind.BAD_HEADER, "negative count in header")])
    return num_vars, num_clauses


def to_dimacs(formula: Formula) -> str:
    """Serialize the pre-extraction clause set (an empty clause if trivially unsat)."""
    clauses = list(formula.raw_clauses)
    lines = [f"p cnf {formula.num_vars} {len(clauses) + formula.trivially_unsat}"]
    lines.extend(" ".join(map(str, c)) + " 0" for c in clauses)
    if formula.trivially_unsat:
        lines.append("0")
    return "\n".join(lines) + "\n"


def emit_verdict(verdict: SolverVerdict) -> str:
    if verdict.status is not Status.SAT:
        return f"s {verdict.status.value}\n"
    lits = [str(v if verdict.model[v] else -v) for v in range(1, len(verdict.model))]
    lits.append("0")
    return "s SATISFIABLE\nv " + " ".join(lits) + "\n"
