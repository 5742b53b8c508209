"""Instance generators: graph encodings, the two-column lower-bound family,
and seeded random positive LPs.

Shortest-path and transshipment instances use the node-edge incidence
encoding (+1 at the tail, -1 at the head) with one row dropped to keep full
row rank.  Random LPs are rejection-sampled against the exact oracle until a
feasible basic solution exists, so the test corpus is not constructed to be
feasible by design.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Tuple

from . import model, oracle
from .errors import DegenerateGraphError, InfeasibleError, InfeasibleShapeError
from .model import DIRECTED, UNDIRECTED, LpInstance

REJECTION_CAP = 1000


@dataclass
class GeneratorSpec:
    kind: str                      # shortest_path | transshipment | random_positive_lp | thm_one | zero_cost_demo
    seed: int = 0
    params: dict = field(default_factory=dict)


def generate(spec: GeneratorSpec) -> Tuple[LpInstance, Optional[list]]:
    """Deterministic per seed; returns the instance and an optional start."""
    if spec.kind == "thm_one":
        return _thm_one(spec.params.get("opt", 1), spec.params.get("phi", 1))
    if spec.kind == "zero_cost_demo":
        return _zero_cost_demo()
    if spec.kind == "shortest_path":
        return _shortest_path(spec)
    if spec.kind == "transshipment":
        return _transshipment(spec)
    if spec.kind == "random_positive_lp":
        return _random_positive_lp(spec)
    raise ValueError("unknown generator kind %r" % spec.kind)


def _thm_one(opt: int, phi: int):
    """Two parallel columns with cost gap phi; the hard instance for the
    step-count lower bound."""
    if opt <= 0 or phi <= 0:
        raise ValueError("opt and phi must be positive integers")
    inst = model.validate(LpInstance(
        A=[[1, 1]], b=[1], c=[opt, opt + phi], mode=DIRECTED,
        x0=[Fraction(1, 2), Fraction(1, 2)]))
    return inst, list(inst.x0)


def triangle(costs=(1, 1, 3), mode=UNDIRECTED) -> LpInstance:
    """Three-node shortest path: source -> mid -> sink against a direct arc."""
    return model.validate(LpInstance(
        A=[[1, 0, 1], [-1, 1, 0]], b=[1, 0], c=list(costs), mode=mode))


def _zero_cost_demo():
    inst = triangle(costs=(1, 1, 0), mode=UNDIRECTED)
    return inst, None


def _incidence(num_nodes, edges, drop_row):
    cols = []
    for tail, head in edges:
        col = [0] * num_nodes
        col[tail] += 1
        col[head] -= 1
        cols.append(col)
    rows = [i for i in range(num_nodes) if i != drop_row]
    return [[col[i] for col in cols] for i in rows]


def _random_graph(rng, num_nodes, extra_edges):
    """A directed source..sink path through every node plus random arcs."""
    order = list(range(1, num_nodes - 1))
    rng.shuffle(order)
    chain = [0] + order + [num_nodes - 1]
    edges = [(chain[i], chain[i + 1]) for i in range(num_nodes - 1)]
    present = set(edges)
    attempts = 0
    while len(edges) < num_nodes - 1 + extra_edges and attempts < 50 * (extra_edges + 1):
        attempts += 1
        tail, head = rng.randrange(num_nodes), rng.randrange(num_nodes)
        if tail == head or (tail, head) in present:
            continue
        present.add((tail, head))
        edges.append((tail, head))
    return edges


def _shortest_path(spec: GeneratorSpec):
    """Incidence columns with the sink row dropped; b routes one unit out of
    the source."""
    p = spec.params
    if p.get("preset") == "triangle":
        return triangle(mode=p.get("mode", UNDIRECTED)), None
    num_nodes = p.get("nodes", 4)
    extra = p.get("extra_edges", 2)
    cost_max = p.get("cost_max", 5)
    mode = p.get("mode", UNDIRECTED)
    if num_nodes < 2:
        raise DegenerateGraphError("need at least a source and a sink")
    rng = random.Random(spec.seed)
    edges = _random_graph(rng, num_nodes, extra)
    if not _reaches(edges, 0, num_nodes - 1):
        raise DegenerateGraphError("no directed source-sink path")
    A = _incidence(num_nodes, edges, drop_row=num_nodes - 1)
    b = [1 if i == 0 else 0 for i in range(num_nodes - 1)]
    c = [rng.randint(1, cost_max) for _ in edges]
    return model.validate(LpInstance(A=A, b=b, c=c, mode=mode)), None


def _reaches(edges, src, dst):
    adj = {}
    for tail, head in edges:
        adj.setdefault(tail, []).append(head)
    stack, seen = [src], {src}
    while stack:
        node = stack.pop()
        if node == dst:
            return True
        for nxt in adj.get(node, ()):
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return False


def _transshipment(spec: GeneratorSpec):
    """Integer demands over a connected digraph, rejection-sampled until a
    nonnegative basic solution exists."""
    p = spec.params
    num_nodes = p.get("nodes", 4)
    extra = p.get("extra_edges", 2)
    cost_max = p.get("cost_max", 5)
    demand_max = p.get("demand_max", 2)
    mode = p.get("mode", DIRECTED)
    rng = random.Random(spec.seed)
    for _ in range(REJECTION_CAP):
        edges = _random_graph(rng, num_nodes, extra)
        demand = [rng.randint(-demand_max, demand_max) for _ in range(num_nodes - 1)]
        if all(v == 0 for v in demand):
            continue
        A = _incidence(num_nodes, edges, drop_row=num_nodes - 1)
        c = [rng.randint(1, cost_max) for _ in edges]
        try:
            inst = model.validate(LpInstance(A=A, b=demand, c=c, mode=mode))
            oracle.enumerate_bfs(inst)
        except (InfeasibleError, InfeasibleShapeError):
            continue
        return inst, None
    raise RuntimeError("rejection sampling failed %d times" % REJECTION_CAP)


def _random_positive_lp(spec: GeneratorSpec):
    """Dense integer LP with c >= 1 and guaranteed full row rank, kept only
    when the oracle certifies a feasible basic solution."""
    p = spec.params
    n = p.get("n", 2)
    m = p.get("m", 5)
    entry_max = p.get("entry_max", 3)
    cost_max = p.get("cost_max", 5)
    demand_max = p.get("demand_max", 3)
    mode = p.get("mode", DIRECTED)
    rng = random.Random(spec.seed)
    for _ in range(REJECTION_CAP):
        A = [[rng.randint(-entry_max, entry_max) for _ in range(m)] for _ in range(n)]
        b = [rng.randint(-demand_max, demand_max) for _ in range(n)]
        if all(v == 0 for v in b):
            continue
        c = [rng.randint(1, cost_max) for _ in range(m)]
        try:
            inst = model.validate(LpInstance(A=A, b=b, c=c, mode=mode))
        except InfeasibleShapeError:
            continue
        if inst.n != n:
            continue
        try:
            oracle.enumerate_bfs(inst)
        except InfeasibleError:
            continue
        return inst, None
    raise RuntimeError("rejection sampling failed %d times" % REJECTION_CAP)
