"""Systems of difference constraints ``x[a] - x[b] <= c`` over the integers.

Each constraint becomes an edge ``b -> a`` of weight ``c``.  With an origin
node pinned at 0, the system is feasible iff the graph has no negative
cycle, and shortest-path distances from the origin give the pointwise
largest solution.  Because all weights are integers the solution is
integral.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Iterable, Sequence


@dataclass(frozen=True)
class DiffConstraint:
    a: Hashable
    b: Hashable
    bound: int
    label: str = ""

    def __str__(self):
        return f"{self.label}: x[{self.a}] - x[{self.b}] <= {self.bound}"


@dataclass(frozen=True)
class NegativeCycle:
    """Constraints whose sum reads ``0 <= weight`` with ``weight < 0``."""

    constraints: tuple[DiffConstraint, ...]

    @property
    def weight(self) -> int:
        return sum(c.bound for c in self.constraints)

    @property
    def nodes(self) -> tuple:
        return tuple(c.b for c in self.constraints)


def _bellman_ford(nodes: Sequence, edges: Sequence[DiffConstraint], source, reverse=False):
    """Shortest distances from ``source``; returns (dist, None) or (None, cycle)."""
    INF = None
    dist = {v: INF for v in nodes}
    pred: dict = {v: None for v in nodes}
    dist[source] = 0
    last = None
    for _ in range(len(nodes)):
        last = None
        for e in edges:
            u, v = (e.a, e.b) if reverse else (e.b, e.a)
            du = dist[u]
            if du is None:
                continue
            nd = du + e.bound
            if dist[v] is None or nd < dist[v]:
                dist[v] = nd
                pred[v] = e
                last = v
        if last is None:
            return dist, None
    # a relaxation in round |V| means a negative cycle reachable from source
    v = last
    for _ in range(len(nodes)):
        e = pred[v]
        v = e.a if reverse else e.b
    start, cycle = v, []
    while True:
        e = pred[v]
        cycle.append(e)
        v = e.a if reverse else e.b
        if v == start:
            break
    cycle.reverse()
    return None, NegativeCycle(tuple(cycle))


def solve(nodes: Iterable, constraints: Iterable[DiffConstraint], origin):
    """Largest solution with ``x[origin] = 0``, or a :class:`NegativeCycle`.

    Nodes not reachable from ``origin`` through the constraint graph are
    unconstrained from above; they get value 0 when 0 is consistent, else
    the system is solved again with a virtual source.
    """
    nodes = list(dict.fromkeys([origin, *nodes]))
    edges = list(constraints)
    dist, cycle = _bellman_ford(nodes, edges, origin)
    if cycle is not None:
        return cycle
    if all(d is not None for d in dist.values()):
        return dist
    # some nodes unreachable from the origin: add zero edges from a virtual source
    src = object()
    extra = [DiffConstraint(v, src, 0, "virtual") for v in nodes]
    full, cycle = _bellman_ford([src, *nodes], [*edges, *extra], src)
    if cycle is not None:
        return cycle
    shift = full[origin]
    return {v: full[v] - shift for v in nodes}


def ranges(nodes: Iterable, constraints: Iterable[DiffConstraint], origin):
    """Exact feasible interval of every node value, or a :class:`NegativeCycle`.

    For difference systems each variable attains every integer in
    ``[-dist(v -> origin), dist(origin -> v)]`` in some solution.  ``None``
    marks an unbounded side.
    """
    nodes = list(dict.fromkeys([origin, *nodes]))
    edges = list(constraints)
    hi, cycle = _bellman_ford(nodes, edges, origin)
    if cycle is not None:
        return cycle
    lo, cycle = _bellman_ford(nodes, edges, origin, reverse=True)
    if cycle is not None:
        return cycle
    if any(d is None for d in (*hi.values(), *lo.values())):
        checked = solve(nodes, edges, origin)
        if isinstance(checked, NegativeCycle):
            return checked
    return {v: (None if lo[v] is None else -lo[v], hi[v]) for v in nodes}
