"""Command line front end: solve, features, bench, gen."""

import argparse
import csv
import io
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor

from .dimacs import DimacsError, Status, emit_verdict, parse_dimacs
from .engine import Budget, Solver
from .features import LISTED, PRIORITY, classify, extract_features, plan_lines
from .formula import detect_xor
from .generators import gen_family
from .phase import PhasePolicy, PolicyKind, PolicyParams, SolvePlan

HEURISTICS = ["auto"] + [k.value for k in PolicyKind]
BENCH_HEADER = ["instance", "policy", "verdict", "decisions", "conflicts", "propagations", "restarts", "ms"]
VERDICT_NAMES = {Status.SAT: "SAT", Status.UNSAT: "UNSAT", Status.UNKNOWN: "UNKNOWN"}


def _load(path):
    if path == "-":
        data = sys.stdin.buffer.read()
    else:
        with open(path, "rb") as fh:
            data = fh.read()
    return detect_xor(parse_dimacs(data))


def _params(args) -> PolicyParams:
    defaults = PolicyParams()
    return PolicyParams(
        ace_depth_cutoff=args.ace_depth_cutoff or defaults.ace_depth_cutoff,
        ace_decision_cutoff=args.ace_decision_cutoff or defaults.ace_decision_cutoff,
        tail_window=args.tail_window or defaults.tail_window,
        p_random_var=defaults.p_random_var if args.p_random_var is None else args.p_random_var,
        p_flip=defaults.p_flip if args.p_flip is None else args.p_flip,
        ls_flip_budget=defaults.ls_flip_budget if args.ls_flip_budget is None else args.ls_flip_budget,
    )


def _budget(args) -> Budget:
    return Budget(args.max_conflicts, args.max_decisions, args.timeout)


def run_pipeline(formula, heuristic, params, budget, seed=0, order=PRIORITY):
    """Solve ``formula``; ``heuristic="auto"`` probes, classifies and follows the plan."""
    solver = Solver(formula, seed=seed, params=params)
    if heuristic != "auto":
        plan = SolvePlan.single(PhasePolicy(PolicyKind(heuristic), params))
        solver.policy_trace.extend(plan.trace)
        verdict = solver.run(plan, budget)
        return verdict, solver.stats(), None
    report = solver.probe()
    plan = classify(extract_features(formula, report), order, params)
    solver.policy_trace.extend(f"rule:{r}" for r in plan.trace)
    if report.solved:
        return report.verdict, solver.stats(), plan
    verdict = solver.run(plan, budget)
    return verdict, solver.stats(), plan


def cmd_solve(args) -> int:
    try:
        formula = _load(args.input)
    except DimacsError as err:
        for d in err.diagnostics:
            print(f"{args.input}:{d}", file=sys.stderr)
        return 1
    verdict, stats, _ = run_pipeline(formula, args.heuristic, _params(args), _budget(args),
                                     args.seed, args.classifier_order)
    out = emit_verdict(verdict)
    if args.stats:
        out += stats.to_text()
    sys.stdout.write(out)
    return verdict.exit_code


def cmd_features(args) -> int:
    try:
        formula = _load(args.input)
    except DimacsError as err:
        for d in err.diagnostics:
            print(f"{args.input}:{d}", file=sys.stderr)
        return 1
    solver = Solver(formula, seed=args.seed)
    report = solver.probe()
    features = extract_features(formula, report)
    plan = classify(features, args.classifier_order)
    sys.stdout.write("".join(line + "\n" for line in features.lines() + plan_lines(plan)))
    return 0


def _bench_inputs(paths):
    files = []
    for p in paths:
        if os.path.isdir(p):
            files.extend(sorted(os.path.join(p, name) for name in os.listdir(p)
                                if name.endswith((".cnf", ".dimacs"))))
        else:
            files.append(p)
    return files


def bench_cell(path, policy, params, budget, seed, timing=True):
    """One (instance, policy) solve; returns a CSV row."""
    start = time.perf_counter()
    try:
        formula = _load(path)
        verdict, stats, _ = run_pipeline(formula, policy, params, budget, seed)
    except Exception as err:  # noqa: BLE001 - a failing cell must not stop the matrix
        print(f"{path} [{policy}]: {type(err).__name__}: {err}", file=sys.stderr)
        return [path, policy, "error", "", "", "", "", ""]
    ms = str(round((time.perf_counter() - start) * 1000)) if timing else "-"
    return [path, policy, VERDICT_NAMES[verdict.status], str(stats.decisions), str(stats.conflicts),
            str(stats.propagations), str(stats.restarts), ms]


def _bench_cell_star(task):
    return bench_cell(*task)


def run_bench(paths, policies, params, budget, seed=0, jobs=1, timing=True):
    """Rows for every (instance, policy) pair, in input order regardless of ``jobs``."""
    tasks = [(path, policy, params, budget, seed, timing) for path in _bench_inputs(paths) for policy in policies]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_bench_cell_star, tasks))
    return [_bench_cell_star(t) for t in tasks]


def disagreements(rows) -> list:
    """Instances decided SAT under one policy and UNSAT under another."""
    decided = {}
    for row in rows:
        if row[2] in ("SAT", "UNSAT"):
            decided.setdefault(row[0], set()).add(row[2])
    return sorted(name for name, seen in decided.items() if len(seen) > 1)


def format_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(BENCH_HEADER)
    writer.writerows(rows)
    return buf.getvalue()


def cmd_bench(args) -> int:
    policies = [p.strip() for p in args.policies.split(",") if p.strip()]
    for p in policies:
        if p not in HEURISTICS:
            print(f"unknown policy {p!r}", file=sys.stderr)
            return 1
    rows = run_bench(args.inputs, policies, _params(args), _budget(args), args.seed, args.jobs, not args.no_timing)
    sys.stdout.write(format_csv(rows))
    bad = disagreements(rows)
    for name in bad:
        print(f"soundness check failed: {name} reported both SAT and UNSAT", file=sys.stderr)
    return 2 if bad else 0


def cmd_gen(args) -> int:
    sys.stdout.write(gen_family(args.kind, args.size, args.seed, args.ratio, args.k, not args.sat))
    return 0


def _add_policy_flags(p):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-conflicts", type=int)
    p.add_argument("--max-decisions", type=int)
    p.add_argument("--timeout", type=float, help="wall-clock seconds")
    p.add_argument("--ace-depth-cutoff", type=int)
    p.add_argument("--ace-decision-cutoff", type=int)
    p.add_argument("--tail-window", type=int)
    p.add_argument("--p-random-var", type=float)
    p.add_argument("--p-flip", type=float)
    p.add_argument("--ls-flip-budget", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="phasesat", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve a DIMACS CNF file")
    p.add_argument("input", help="path, or - for stdin")
    p.add_argument("--heuristic", choices=HEURISTICS, default="auto")
    p.add_argument("--stats", action="store_true", help="append statistics as c lines")
    p.add_argument("--classifier-order", choices=[PRIORITY, LISTED], default=PRIORITY)
    _add_policy_flags(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("features", help="print instance features and the selected plan")
    p.add_argument("input")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--classifier-order", choices=[PRIORITY, LISTED], default=PRIORITY)
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("bench", help="run every policy on every instance, CSV on stdout")
    p.add_argument("inputs", nargs="+", help="files or directories of .cnf files")
    p.add_argument("--policies", default=",".join(k.value for k in PolicyKind))
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--no-timing", action="store_true", help="write '-' in the ms column")
    _add_policy_flags(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("gen", help="generate a benchmark instance")
    p.add_argument("kind", choices=["parity-chain", "pigeonhole", "random-ksat"])
    p.add_argument("--size", type=int, required=True,
                   help="inputs (parity-chain), holes (pigeonhole) or variables (random-ksat)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--ratio", type=float, default=4.26)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--sat", action="store_true", help="parity-chain: consistent parities")
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
