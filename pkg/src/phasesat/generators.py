"""Benchmark families: XOR parity chains, pigeonhole, uniform random k-SAT."""

import random

from .formula import XorConstraint


def _dimacs(num_vars, clauses, comment):
    lines = [f"c {comment}", f"p cnf {num_vars} {len(clauses)}"]
    lines.extend(" ".join(map(str, c)) + " 0" for c in clauses)
    return "\n".join(lines) + "\n"


def parity_chain(n: int, seed: int = 0, contradict: bool = True, shuffle: bool = True) -> str:
    """Two XOR chains summing the same n inputs through separate auxiliaries.

    The first chain asserts odd total parity.  The second visits the inputs
    in a seeded order and asserts even parity when ``contradict`` is set
    (unsatisfiable), odd otherwise.  Uses 3n - 2 variables.
    """
    if n < 2:
        raise ValueError("parity chain needs at least two inputs")
    rng = random.Random(seed)
    inputs = list(range(1, n + 1))
    next_var = n + 1
    clauses = []

    def chain(order, parity):
        nonlocal next_var
        acc = order[0]
        for x in order[1:]:
            aux = next_var
            next_var += 1
            # aux = acc xor x
            clauses.extend(XorConstraint((acc, x, aux), False).to_clauses())
            acc = aux
        clauses.append((acc if parity else -acc,))

    chain(inputs, True)
    order = inputs[:]
    if shuffle:
        rng.shuffle(order)
    chain(order, not contradict)
    kind = "unsat" if contradict else "sat"
    return _dimacs(next_var - 1, clauses, f"parity-chain n={n} seed={seed} {kind}")


def pigeonhole(holes: int) -> str:
    """PHP(holes+1, holes): variable (i, j) means pigeon i sits in hole j."""
    pigeons = holes + 1

    def var(i, j):
        return i * holes + j + 1

    clauses = [tuple(var(i, j) for j in range(holes)) for i in range(pigeons)]
    for j in range(holes):
        for a in range(pigeons):
            for b in range(a + 1, pigeons):
                clauses.append((-var(a, j), -var(b, j)))
    return _dimacs(pigeons * holes, clauses, f"pigeonhole {pigeons} into {holes}")


def random_ksat(num_vars: int, ratio: float, k: int = 3, seed: int = 0) -> str:
    if k > num_vars:
        raise ValueError("clause width exceeds variable count")
    rng = random.Random(seed)
    m = round(ratio * num_vars)
    clauses = []
    for _ in range(m):
        vs = rng.sample(range(1, num_vars + 1), k)
        clauses.append(tuple(v if rng.random() < 0.5 else -v for v in vs))
    return _dimacs(num_vars, clauses, f"random {k}-sat n={num_vars} ratio={ratio} seed={seed}")


def gen_family(kind: str, size: int, seed: int = 0, ratio: float = 4.26, k: int = 3,
               contradict: bool = True) -> str:
    if kind == "parity-chain":
        return parity_chain(size, seed, contradict)
    if kind == "pigeonhole":
        return pigeonhole(size)
    if kind == "random-ksat":
        return random_ksat(size, ratio, k, seed)
    raise ValueError(f"unknown family {kind!r}")
