"""Exponential subtour cuts: construction, enumeration and integer separation.

A cut is indexed by a node set ``S`` containing the depot, a vehicle ``k``
and a node ``i`` outside ``S``; it requires at least two of vehicle k's
arcs to cross a node set whenever ``y[i,k] = 1``.  Two readings of which
set is crossed are supported:

``depot_side`` (default)
    the arcs crossing between ``S`` and ``V \\ S`` (the side holding ``i``);
    this is the valid subtour-elimination inequality.
``as_printed``
    the arcs crossing the boundary of ``S \\ {0}``, which is the set the
    printed inequality names.  This reading also cuts feasible routes.

Arcs are directed, so a crossing pair {a, b} contributes
``x[a,b,k] + x[b,a,k]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator

import networkx as nx

from .assignment import ModelAssignment
from .formulation import LinearConstraint, X, Y, constraint
from .instance import WasteInstance

READINGS = ("depot_side", "as_printed")


class CutError(ValueError):
    pass


def _fmt_set(S) -> str:
    return "{" + ",".join(map(str, sorted(S))) + "}"


def crossed_set(inst: WasteInstance, S: frozenset, reading: str) -> frozenset:
    """The node set whose boundary the cut sums over."""
    if reading == "depot_side":
        return frozenset(inst.nodes) - S
    if reading == "as_printed":
        return S - {0}
    raise CutError(f"unknown reading {reading!r}; expected one of {READINGS}")


def make_subtour_cut(inst: WasteInstance, S: Iterable[int], k: int, i: int,
                     reading: str = "depot_side") -> LinearConstraint:
    S = frozenset(S)
    nodes = frozenset(inst.nodes)
    if 0 not in S:
        raise CutError("S must contain the depot 0")
    if not S <= nodes:
        raise CutError(f"S has nodes outside 0..{inst.hcf_count}: {_fmt_set(S - nodes)}")
    if S == nodes:
        raise CutError("S is the whole node set; no node lies outside it")
    if i in S or i not in nodes:
        raise CutError(f"i={i} must be a node outside S")
    if k not in inst.vehicles:
        raise CutError(f"vehicle {k} out of range 1..{inst.vehicle_count}")
    T = crossed_set(inst, S, reading)
    terms = []
    for a in sorted(T):
        for b in sorted(nodes - T):
            terms.append((1, X(a, b, k)))
            terms.append((1, X(b, a, k)))
    terms.append((-2, Y(i, k)))
    lab = f"F3[S={_fmt_set(S)},k={k},i={i}]"
    if reading != "depot_side":
        lab = lab[:-1] + f",r={reading}]"
    return constraint(terms, ">=", 0, "F3", lab)


def enumerate_subtour_cuts(inst: WasteInstance, vehicles=None, reading="depot_side",
                           min_size: int = 1) -> Iterator[tuple[frozenset, int, int]]:
    """All index triples (S, k, i) of the cut family, deterministic order.

    ``min_size`` is the smallest |S| enumerated (|S| counts the depot).
    """
    hcfs = list(inst.hcfs)
    for k in (vehicles or inst.vehicles):
        for size in range(max(min_size, 1) - 1, len(hcfs)):
            for rest in combinations(hcfs, size):
                S = frozenset((0, *rest))
                for i in hcfs:
                    if i not in S:
                        yield S, k, i


def cut_lhs(con: LinearConstraint, asg: ModelAssignment) -> int:
    return sum(c * asg[r] for c, r in con.terms)


@dataclass(frozen=True)
class SeparatedCut:
    S: frozenset
    k: int
    i: int
    constraint: LinearConstraint
    lhs: int

    def to_dict(self) -> dict:
        return {"S": sorted(self.S), "k": self.k, "i": self.i, "label": self.constraint.label, "lhs": self.lhs}


def support_components(inst: WasteInstance, asg: ModelAssignment, k: int) -> list[frozenset]:
    """Weakly connected components of vehicle k's support.

    Nodes are those incident to an arc of k plus HCFs with ``y[i,k] = 1``.
    """
    g = nx.Graph()
    g.add_nodes_from(i for i in inst.hcfs if asg[Y(i, k)])
    g.add_edges_from(asg.arcs(k))
    return sorted((frozenset(c) for c in nx.connected_components(g)), key=min)


def _check_integral(asg: ModelAssignment, k: int):
    for r, v in asg.values.items():
        if r.kind in "xy" and r.idx[-1] == k and v not in (0, 1):
            raise CutError(f"{r}={v}: separation is defined for 0/1 values only")


def separate_subtour(inst: WasteInstance, asg: ModelAssignment, k: int,
                     reading: str = "depot_side") -> SeparatedCut | None:
    """A violated cut for vehicle ``k`` or ``None`` when no member is violated.

    Depot-free components are tried first (S = V minus the component, i its
    smallest visited node).  For the ``depot_side`` reading a min-cut check
    then covers visited nodes that hang on the depot by a single arc, which
    only happens when the support is not a union of cycles.
    """
    _check_integral(asg, k)
    if reading not in READINGS:
        raise CutError(f"unknown reading {reading!r}")
    nodes = frozenset(inst.nodes)
    visited = [i for i in inst.hcfs if asg[Y(i, k)] == 1]
    if not visited:
        return None
    if reading == "as_printed":
        return _separate_as_printed(inst, asg, k, visited)

    for comp in support_components(inst, asg, k):
        if 0 in comp:
            continue
        inside = [i for i in sorted(comp) if asg[Y(i, k)] == 1]
        if inside:
            return _violated(inst, asg, nodes - comp, k, inside[0], reading)

    # undirected capacity x_ab + x_ba between every pair that carries an arc
    g = nx.Graph()
    g.add_nodes_from(nodes)
    for a, b in asg.arcs(k):
        w = g.get_edge_data(a, b, {"capacity": 0})["capacity"]
        g.add_edge(a, b, capacity=w + 1)
    for i in visited:
        value, (side0, _) = nx.minimum_cut(g, 0, i)
        if value < 2:
            return _violated(inst, asg, frozenset(side0), k, i, reading)
    return None


def _separate_as_printed(inst, asg, k, visited):
    # smallest violated S by enumeration; the family is tiny for any node whose
    # neighbours are off-route, so this returns quickly in practice
    for S, kk, i in enumerate_subtour_cuts(inst, [k], "as_printed"):
        if asg[Y(i, kk)] != 1:
            continue
        con = make_subtour_cut(inst, S, kk, i, "as_printed")
        lhs = cut_lhs(con, asg)
        if lhs < 0:
            return SeparatedCut(S, kk, i, con, lhs + 2)
    return None


def _violated(inst, asg, S, k, i, reading) -> SeparatedCut:
    con = make_subtour_cut(inst, S, k, i, reading)
    lhs = cut_lhs(con, asg)
    assert lhs < con.rhs, "separator returned a satisfied cut"
    # report the crossing count itself, without the -2*y term
    return SeparatedCut(S, k, i, con, lhs + 2)
