"""Semantic decoding of an assignment into routes, independent of u.

Loads are recomputed from demands along decoded walks.  A vehicle's walk
is the concatenation of its depot loops in order of the first HCF after
the depot, with no unloading in between.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .assignment import ModelAssignment
from .formulation import Y
from .instance import WasteInstance
from .subtour import support_components

KINDS = (
    "MultipleDepotDepartures",
    "DepotFreeSubtour",
    "NodeVisitedTwice",
    "NodeUnvisited",
    "CompartmentOverflow",
    "NonEulerianSupport",
)


@dataclass(frozen=True)
class SemanticViolation:
    kind: str
    vehicle: int | None
    nodes: tuple[int, ...]
    detail: str

    def to_dict(self) -> dict:
        return {"kind": self.kind, "vehicle": self.vehicle, "nodes": list(self.nodes), "detail": self.detail}


@dataclass(frozen=True)
class VehicleRoutes:
    vehicle: int
    arcs: tuple[tuple[int, int], ...]
    depot_out: int
    depot_in: int
    components: tuple[tuple[int, ...], ...]
    loops: tuple[tuple[int, ...], ...]
    walk: tuple[int, ...]
    loads: tuple[tuple[int, ...], ...]   # per compartment, cumulative along walk
    decoded: bool

    @property
    def depot_visits(self) -> int:
        """Depot-incident arcs of this vehicle (arrivals plus departures)."""
        return self.depot_out + self.depot_in

    @property
    def max_load(self) -> tuple[int, ...]:
        return tuple(max(l, default=0) for l in self.loads)

    def to_dict(self) -> dict:
        return {
            "vehicle": self.vehicle,
            "arcs": [list(a) for a in self.arcs],
            "depot_out": self.depot_out,
            "depot_in": self.depot_in,
            "depot_visits": self.depot_visits,
            "components": [list(c) for c in self.components],
            "loops": [list(l) for l in self.loops],
            "walk": list(self.walk),
            "loads": [list(l) for l in self.loads],
            "decoded": self.decoded,
        }


@dataclass(frozen=True)
class RouteReport:
    vehicles: tuple[VehicleRoutes, ...]
    violations: tuple[SemanticViolation, ...]

    @property
    def depot_visit_count(self) -> int:
        return sum(v.depot_visits for v in self.vehicles)

    def kinds(self) -> Counter:
        return Counter(v.kind for v in self.violations)

    def vehicle(self, k: int) -> VehicleRoutes:
        return next(v for v in self.vehicles if v.vehicle == k)

    def to_dict(self) -> dict:
        return {
            "vehicles": [v.to_dict() for v in self.vehicles],
            "violations": [v.to_dict() for v in self.violations],
            "depot_visit_count": self.depot_visit_count,
        }


def cumulative_loads(inst: WasteInstance, seq) -> tuple[tuple[int, ...], ...]:
    """Per compartment, load after each HCF of ``seq`` (depot entries add 0).

    An HCF repeated in ``seq`` is only collected once.
    """
    seen: set[int] = set()
    out = []
    for p in inst.compartments:
        acc, col = 0, []
        seen.clear()
        for i in seq:
            if i != 0 and i not in seen:
                acc += inst.q(i, p)
                seen.add(i)
            col.append(acc)
        out.append(tuple(col))
    return tuple(out)


def _decode(arcs, hcfs_in_support):
    """Loops for a support where every HCF has in = out = 1; else None."""
    succ: dict[int, list[int]] = {}
    indeg: Counter = Counter()
    for a, b in arcs:
        succ.setdefault(a, []).append(b)
        indeg[b] += 1
    for i in hcfs_in_support:
        if len(succ.get(i, ())) != 1 or indeg[i] != 1:
            return None
    if len(succ.get(0, ())) != indeg[0]:
        return None
    loops, used = [], set()
    for first in sorted(succ.get(0, ())):
        loop, cur = [0], first
        while cur != 0:
            loop.append(cur)
            used.add(cur)
            cur = succ[cur][0]
        loop.append(0)
        loops.append(tuple(loop))
    rest = sorted(set(hcfs_in_support) - used)
    while rest:
        start = rest[0]
        cyc, cur = [start], succ[start][0]
        while cur != start:
            cyc.append(cur)
            cur = succ[cur][0]
        cyc.append(start)
        loops.append(tuple(cyc))
        rest = [r for r in rest if r not in cyc]
    return loops


def semantic_validate(inst: WasteInstance, asg: ModelAssignment) -> RouteReport:
    vehicles, violations = [], []
    total_in: Counter = Counter()
    for k in inst.vehicles:
        arcs = tuple(asg.arcs(k))
        for a, b in arcs:
            total_in[b] += 1
        out0 = sum(1 for a, _ in arcs if a == 0)
        in0 = sum(1 for _, b in arcs if b == 0)
        comps = [c for c in support_components(inst, asg, k)]
        support = sorted({n for a in arcs for n in a} - {0})
        loops = _decode(arcs, support)

        if out0 > 1:
            violations.append(SemanticViolation(
                "MultipleDepotDepartures", k, (0,),
                f"depot out-degree {out0}, in-degree {in0}; {out0 + in0} depot-incident arcs"))
        for c in comps:
            if 0 not in c and any(True for a in arcs if a[0] in c):
                violations.append(SemanticViolation(
                    "DepotFreeSubtour", k, tuple(sorted(c)), "component does not contain the depot"))

        if loops is None:
            violations.append(SemanticViolation(
                "NonEulerianSupport", k, tuple(support),
                "some node has in-degree != out-degree or more than one successor"))
            walk: tuple[int, ...] = ()
            loads = tuple(() for _ in inst.compartments)
            # fall back to component totals
            for c in comps:
                for p in inst.compartments:
                    tot = sum(inst.q(i, p) for i in c if i)
                    if tot > inst.cap(p):
                        violations.append(SemanticViolation(
                            "CompartmentOverflow", k, tuple(sorted(c)),
                            f"compartment {p}: component load {tot} > {inst.cap(p)}"))
            loops_t: tuple = ()
        else:
            depot_loops = [l for l in loops if l[0] == 0]
            walk = (0,) + tuple(n for l in depot_loops for n in l[1:]) if depot_loops else ()
            loads = cumulative_loads(inst, walk)
            loops_t = tuple(loops)
            for p in inst.compartments:
                peak = max(loads[p - 1], default=0)
                if peak > inst.cap(p):
                    violations.append(SemanticViolation(
                        "CompartmentOverflow", k, tuple(n for n in walk if n),
                        f"compartment {p}: load {peak} > {inst.cap(p)}"))
            for l in loops:
                if l[0] != 0:
                    for p in inst.compartments:
                        tot = cumulative_loads(inst, l)[p - 1][-1]
                        if tot > inst.cap(p):
                            violations.append(SemanticViolation(
                                "CompartmentOverflow", k, tuple(sorted(set(l))),
                                f"compartment {p}: subtour load {tot} > {inst.cap(p)}"))
        vehicles.append(VehicleRoutes(
            vehicle=k, arcs=arcs, depot_out=out0, depot_in=in0,
            components=tuple(tuple(sorted(c)) for c in comps),
            loops=loops_t, walk=walk, loads=loads, decoded=loops is not None,
        ))

    twice = tuple(i for i in inst.hcfs if total_in[i] > 1)
    if twice:
        violations.append(SemanticViolation("NodeVisitedTwice", None, twice, "entered more than once"))
    unvisited = tuple(i for i in inst.hcfs if total_in[i] == 0)
    if unvisited:
        violations.append(SemanticViolation("NodeUnvisited", None, unvisited, "never entered by any vehicle"))
    return RouteReport(tuple(vehicles), tuple(violations))


_COLORS = ("blue", "forestgreen", "red", "orange", "purple", "brown", "magenta", "cyan")


def to_dot(inst: WasteInstance, asg: ModelAssignment) -> str:
    """Graphviz rendering: one edge colour per vehicle, depot double-circled."""
    lines = ["digraph routes {", '  0 [shape=doublecircle, label="depot"];']
    for i in inst.hcfs:
        served = [k for k in inst.vehicles if asg[Y(i, k)]]
        lines.append(f'  {i} [shape=circle, label="{i}"{", style=dashed" if not served else ""}];')
    for k in inst.vehicles:
        color = _COLORS[(k - 1) % len(_COLORS)]
        for a, b in asg.arcs(k):
            lines.append(f'  {a} -> {b} [color={color}, label="k{k}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
