"""Exact ground truth at desk scale.

* :func:`exact_semantic_solve` - true optimum of the routing problem itself
  (subset DP over capacity-feasible routes, Held-Karp route costs).
* :func:`brute_force_milp` - exact optimum of a model *as written*, by
  depth-first search over its binaries with bound propagation; integer
  variables are decided per leaf (difference systems by Bellman-Ford,
  flow systems by network simplex).
* :func:`separate_subtour` - re-exported from :mod:`mcvrp.subtour`.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Sequence

import networkx as nx

from . import difference
from .assignment import ModelAssignment, evaluate, u_feasibility
from .difference import DiffConstraint, NegativeCycle
from .formulation import F, G, MilpModel, V, Variant, X, Y, Z
from .instance import WasteInstance

MAX_HCFS = 14
MAX_BINARIES = 60


class ScaleGuardError(RuntimeError):
    pass


class InfeasibleError(RuntimeError):
    pass


class LimitExceeded(RuntimeError):
    pass


# --- Held-Karp -------------------------------------------------------------

class _CostToGo:
    """h[mask][j]: cheapest path from node L[j] through all of mask back to the depot."""

    def __init__(self, inst: WasteInstance, nodes: Sequence[int]):
        self.inst = inst
        self.L = list(nodes)
        m = len(self.L)
        d = inst.distance
        L = self.L
        INF = float("inf")
        h = [[INF] * m for _ in range(1 << m)]
        for j in range(m):
            h[0][j] = d[L[j]][0]
        for mask in range(1, 1 << m):
            members = [l for l in range(m) if mask >> l & 1]
            row = h[mask]
            for j in range(m):
                if mask >> j & 1:
                    continue
                dj = d[L[j]]
                best = INF
                for l in members:
                    c = dj[L[l]] + h[mask ^ (1 << l)][l]
                    if c < best:
                        best = c
                row[j] = best
        self.h = h

    def tour_cost(self, mask: int) -> int:
        if mask == 0:
            return 0
        d0 = self.inst.distance[0]
        return min(d0[self.L[j]] + self.h[mask ^ (1 << j)][j]
                   for j in range(len(self.L)) if mask >> j & 1)

    def tour_order(self, mask: int) -> tuple[int, ...]:
        """Lexicographically smallest optimal visiting order."""
        d = self.inst.distance
        target, cur, rem, order = self.tour_cost(mask), 0, mask, []
        while rem:
            for j in sorted((j for j in range(len(self.L)) if rem >> j & 1), key=lambda j: self.L[j]):
                nxt = rem ^ (1 << j)
                if d[cur][self.L[j]] + self.h[nxt][j] == target:
                    order.append(self.L[j])
                    target, cur, rem = self.h[nxt][j], self.L[j], nxt
                    break
        return tuple(order)


def held_karp_tour(inst: WasteInstance, subset, max_nodes: int = MAX_HCFS) -> tuple[int, tuple[int, ...]]:
    """Cheapest directed depot-to-depot tour through ``subset``."""
    nodes = sorted(set(subset))
    if len(nodes) > max_nodes:
        raise ScaleGuardError(f"{len(nodes)} nodes exceed the Held-Karp guard of {max_nodes}")
    if any(i not in inst.hcfs for i in nodes):
        raise ValueError(f"subset must contain HCFs 1..{inst.hcf_count} only")
    ctg = _CostToGo(inst, nodes)
    full = (1 << len(nodes)) - 1
    return ctg.tour_cost(full), ctg.tour_order(full)


# --- semantic optimum -------------------------------------------------------

@dataclass(frozen=True)
class OptimalPlan:
    routes: tuple[tuple[int, ...], ...]
    total_distance: int
    loads: tuple[tuple[int, ...], ...]   # per route, per compartment

    def to_dict(self) -> dict:
        return {"routes": [list(r) for r in self.routes], "total_distance": self.total_distance,
                "loads": [list(l) for l in self.loads]}


def route_distance(inst: WasteInstance, route: Sequence[int]) -> int:
    seq = [0, *route, 0]
    return sum(inst.d(a, b) for a, b in zip(seq, seq[1:]))


def exact_semantic_solve(inst: WasteInstance, max_nodes: int = MAX_HCFS) -> OptimalPlan:
    """Minimum-distance set of at most |K| capacity-feasible depot tours.

    Ties are broken deterministically: the route holding the lowest
    uncovered HCF is chosen with the lexicographically smallest member set,
    and each route uses its lexicographically smallest optimal order.
    """
    n = inst.hcf_count
    if n > max_nodes:
        raise ScaleGuardError(f"{n} HCFs exceed the exact-solve guard of {max_nodes}")
    hcfs = list(inst.hcfs)
    ctg = _CostToGo(inst, hcfs)
    full = (1 << n) - 1
    P = inst.compartment_count

    load = [[0] * P for _ in range(1 << n)]
    for mask in range(1, 1 << n):
        low = (mask & -mask).bit_length() - 1
        prev = load[mask ^ (1 << low)]
        load[mask] = [prev[p] + inst.demand[hcfs[low]][p] for p in range(P)]
    feasible = [all(load[m][p] <= inst.capacity[p] for p in range(P)) for m in range(1 << n)]
    cost = [ctg.tour_cost(m) if feasible[m] else None for m in range(1 << n)]

    INF = float("inf")
    layers = min(inst.vehicle_count, n)
    best = [[INF] * (1 << n) for _ in range(layers + 1)]
    best[0][0] = 0
    for m in range(1, layers + 1):
        cur, prev = best[m], best[m - 1]
        cur[0] = 0
        for mask in range(1, 1 << n):
            low = mask & -mask
            b = prev[mask]
            rest = mask ^ low
            sub = rest
            while True:
                s = sub | low
                c = cost[s]
                if c is not None:
                    v = c + prev[mask ^ s]
                    if v < b:
                        b = v
                if sub == 0:
                    break
                sub = (sub - 1) & rest
            cur[mask] = b
    total = best[layers][full]
    if total == INF:
        raise InfeasibleError(f"no partition of {n} HCFs into at most {inst.vehicle_count} "
                              f"capacity-feasible routes")

    routes, mask, m = [], full, layers
    while mask:
        if best[m - 1][mask] == best[m][mask] and m > 1:
            m -= 1
            continue
        low = mask & -mask
        rest = mask ^ low
        subs, sub = [], rest
        while True:
            subs.append(sub | low)
            if sub == 0:
                break
            sub = (sub - 1) & rest
        subs.sort(key=lambda s: [hcfs[j] for j in range(n) if s >> j & 1])
        for s in subs:
            if cost[s] is not None and cost[s] + best[m - 1][mask ^ s] == best[m][mask]:
                routes.append(ctg.tour_order(s))
                mask ^= s
                m -= 1
                break
    loads = tuple(tuple(sum(inst.q(i, p) for i in r) for p in inst.compartments) for r in routes)
    return OptimalPlan(tuple(routes), int(total), loads)


def plan_to_assignment(inst: WasteInstance, plan: OptimalPlan, variant="strengthened") -> ModelAssignment:
    """Lift routes to model variables; route r runs on vehicle r+1.

    u is the largest feasible witness for the fixed routing.  Raises
    :class:`InfeasibleError` if the variant admits no u for these routes.
    """
    variant = Variant.coerce(variant)
    if len(plan.routes) > inst.vehicle_count:
        raise ValueError("more routes than vehicles")
    vals = {}
    for k, route in enumerate(plan.routes, start=1):
        seq = [0, *route, 0]
        for a, b in zip(seq, seq[1:]):
            vals[X(a, b, k)] = 1
        for i in route:
            vals[Y(i, k)] = 1
            for p in inst.compartments:
                vals[Z(i, k, p)] = 1
        if variant is Variant.STRENGTHENED:
            vals[V(k)] = 1
            remaining = [sum(inst.q(i, p) for i in route) for p in inst.compartments]
            visits = len(route)
            for a, b in zip(seq, seq[1:]):
                for p in inst.compartments:
                    vals[F(a, b, k, p)] = remaining[p - 1]
                vals[G(a, b, k)] = visits
                if b != 0:
                    for p in inst.compartments:
                        remaining[p - 1] -= inst.q(b, p)
                    visits -= 1
        else:
            vals[Y(0, k)] = 1
    asg = ModelAssignment(vals, partial=True)
    uf = u_feasibility(inst, asg, variant)
    if not uf.feasible:
        raise InfeasibleError(f"{variant.value}: no feasible u for these routes "
                              f"({len(uf.certificates())} infeasible blocks)")
    return asg.replace(uf.witness())


# --- brute force over a model as written ----------------------------------

@dataclass(frozen=True)
class BruteForceResult:
    status: str                     # "optimal" or "infeasible"
    objective: int | None
    assignment: ModelAssignment | None
    nodes: int


class _Search:
    def __init__(self, model: MilpModel, node_limit: int):
        self.model = model
        self.node_limit = node_limit
        self.refs = list(model.variables)
        self.index = {r: n for n, r in enumerate(self.refs)}
        self.is_bin = [model.variables[r].binary for r in self.refs]
        # all rows as sum a x <= b for propagation
        self.rows = []
        for con in model.constraints:
            terms = [(c, self.index[r]) for c, r in con.terms]
            if con.sense in ("<=", "="):
                self.rows.append((terms, con.rhs))
            if con.sense in (">=", "="):
                self.rows.append(([(-c, j) for c, j in terms], -con.rhs))
        self.rows_of = defaultdict(list)
        for rn, (terms, _) in enumerate(self.rows):
            for _, j in terms:
                self.rows_of[j].append(rn)
        self.obj = [(c, self.index[r]) for c, r in model.objective]
        self.order = self._branch_order()
        self.best = None
        self.best_obj = None
        self.nodes = 0

    def _branch_order(self):
        inst = self.model.instance
        rank = {"y": 0, "v": 1, "z": 2, "x": 3}

        def key(j):
            r = self.refs[j]
            dist = inst.d(r.idx[0], r.idx[1]) if r.kind == "x" else 0
            return rank.get(r.kind, 4), dist, r.idx

        return sorted((j for j in range(len(self.refs)) if self.is_bin[j]), key=key)

    def propagate(self, lo, hi, touched):
        queue = list(dict.fromkeys(rn for j in touched for rn in self.rows_of[j]))
        queued = set(queue)
        while queue:
            rn = queue.pop()
            queued.discard(rn)
            terms, b = self.rows[rn]
            minact = 0
            for a, j in terms:
                minact += a * (lo[j] if a > 0 else hi[j])
            slack = b - minact
            if slack < 0:
                return False
            for a, j in terms:
                if self.is_bin[j] and lo[j] != hi[j] and abs(a) > slack:
                    if a > 0:
                        hi[j] = lo[j]
                    else:
                        lo[j] = hi[j]
                    for r2 in self.rows_of[j]:
                        if r2 not in queued:
                            queued.add(r2)
                            queue.append(r2)
        return True

    def bound(self, lo, hi):
        return sum(c * (lo[j] if c > 0 else hi[j]) for c, j in self.obj)

    def run(self):
        lo = [v.lb for v in self.model.variables.values()]
        hi = [v.ub for v in self.model.variables.values()]
        if any(l > h for l, h in zip(lo, hi)):
            return
        if not self.propagate(lo, hi, range(len(self.refs))):
            return
        self.dfs(lo, hi)

    def dfs(self, lo, hi):
        self.nodes += 1
        if self.nodes > self.node_limit:
            raise LimitExceeded(f"node limit {self.node_limit} exceeded")
        if self.best_obj is not None and self.bound(lo, hi) >= self.best_obj:
            return
        j = next((j for j in self.order if lo[j] != hi[j]), None)
        if j is None:
            self.leaf(lo)
            return
        for val in (1, 0):
            lo2, hi2 = lo[:], hi[:]
            lo2[j] = hi2[j] = val
            if self.propagate(lo2, hi2, [j]):
                self.dfs(lo2, hi2)

    def leaf(self, lo):
        fixed = {self.refs[j]: lo[j] for j in range(len(self.refs)) if self.is_bin[j]}
        ints = solve_residual(self.model, fixed)
        if ints is None:
            return
        vals = {**fixed, **ints}
        asg = ModelAssignment(vals, partial=False)
        if evaluate(self.model, asg):
            return
        obj = sum(c * vals[r] for c, r in self.model.objective)
        if self.best_obj is None or obj < self.best_obj:
            self.best_obj, self.best = obj, asg


def brute_force_milp(model: MilpModel, node_limit: int = 200_000,
                     max_binaries: int = MAX_BINARIES) -> BruteForceResult:
    """Exact optimum of ``model`` as written (not of the routing problem)."""
    nb = sum(1 for v in model.variables.values() if v.binary)
    if nb > max_binaries:
        raise ScaleGuardError(f"{nb} binaries exceed the brute-force guard of {max_binaries}")
    search = _Search(model, node_limit)
    search.run()
    if search.best is None:
        return BruteForceResult("infeasible", None, None, search.nodes)
    return BruteForceResult("optimal", search.best_obj, search.best, search.nodes)


# --- residual integer systems ---------------------------------------------

def solve_residual(model: MilpModel, fixed: dict) -> dict | None:
    """Values for the non-binary variables once every binary is fixed, or None.

    The residual rows must split into blocks that are either difference
    systems or single-commodity flow balances.
    """
    ints = [r for r, v in model.variables.items() if not v.binary]
    if not ints:
        return {}
    rows = []
    for con in model.constraints:
        iterms = [(c, r) for c, r in con.terms if r not in fixed]
        if not iterms:
            continue
        rhs = con.rhs - sum(c * fixed[r] for c, r in con.terms if r in fixed)
        rows.append((iterms, con.sense, rhs, con.label))

    parent = {r: r for r in ints}

    def find(r):
        while parent[r] != r:
            parent[r] = parent[parent[r]]
            r = parent[r]
        return r

    for terms, *_ in rows:
        first = find(terms[0][1])
        for _, r in terms[1:]:
            parent[find(r)] = first
    blocks = defaultdict(lambda: ([], []))
    for r in ints:
        blocks[find(r)][0].append(r)
    for row in rows:
        blocks[find(row[0][0][1])][1].append(row)

    out = {}
    for refs, brows in blocks.values():
        if _is_difference(brows):
            sol = _solve_difference_block(model, refs, brows)
        elif _is_network(brows):
            sol = _solve_network_block(model, refs, brows)
        else:
            raise NotImplementedError("residual block is neither a difference nor a flow system")
        if sol is None:
            return None
        out.update(sol)
    return out


def _is_difference(rows) -> bool:
    for terms, sense, _, _ in rows:
        if len(terms) > 2:
            return False
        if len(terms) == 2 and terms[0][0] != -terms[1][0]:
            return False
    return True


def _floor_div(a: int, b: int) -> int:
    return a // b


def _solve_difference_block(model, refs, rows):
    origin = "__origin__"
    cons = []

    def add_le(terms, rhs, lab):
        # sum c r <= rhs with at most two terms of opposite coefficient
        if len(terms) == 1:
            (c, r), = terms
            if c > 0:
                cons.append(DiffConstraint(r, origin, _floor_div(rhs, c), lab))
            else:
                cons.append(DiffConstraint(origin, r, _floor_div(rhs, -c), lab))
        else:
            (c, a), (_, b) = terms
            if c > 0:
                cons.append(DiffConstraint(a, b, _floor_div(rhs, c), lab))
            else:
                cons.append(DiffConstraint(b, a, _floor_div(rhs, -c), lab))

    for terms, sense, rhs, lab in rows:
        if sense in ("<=", "="):
            add_le(terms, rhs, lab)
        if sense in (">=", "="):
            add_le([(-c, r) for c, r in terms], -rhs, lab)
    for r in refs:
        var = model.variables[r]
        cons.append(DiffConstraint(r, origin, var.ub, f"ub {r}"))
        cons.append(DiffConstraint(origin, r, -var.lb, f"lb {r}"))
    res = difference.solve(refs, cons, origin)
    if isinstance(res, NegativeCycle):
        return None
    return {r: res[r] for r in refs}


def _is_network(rows) -> bool:
    seen = defaultdict(list)
    for terms, sense, _, _ in rows:
        if len(terms) == 1 and sense != "=":
            continue
        if sense != "=":
            return False
        for c, r in terms:
            if c not in (1, -1):
                return False
            seen[r].append(c)
    return all(len(cs) == 1 or sorted(cs) == [-1, 1] for cs in seen.values())


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def _solve_network_block(model, refs, rows):
    """Rows ``sum(in) - sum(out) = rhs`` plus single-variable bounds.

    A variable with +1 in row r and -1 in row s is an arc s -> r; a variable
    in a single row connects it to an implicit free node (the depot).
    """
    lb = {r: model.variables[r].lb for r in refs}
    ub = {r: model.variables[r].ub for r in refs}
    ends: dict = defaultdict(dict)
    demand: dict = defaultdict(int)
    for n, (terms, sense, rhs, _) in enumerate(rows):
        if sense != "=":
            (c, r), = terms
            upper = (sense == "<=") == (c > 0)
            if upper:
                ub[r] = min(ub[r], _floor_div(rhs, c))
            else:
                lb[r] = max(lb[r], _ceil_div(rhs, c))
            continue
        demand[n] += rhs
        for c, r in terms:
            ends[r]["head" if c == 1 else "tail"] = n
    outside = "__outside__"
    g = nx.DiGraph()
    g.add_node(outside)
    arc_of = {}
    for r in refs:
        if lb[r] > ub[r]:
            return None
        tail = ends[r].get("tail", outside)
        head = ends[r].get("head", outside)
        if tail == head:
            continue
        # ship the lower bound up front
        demand[head] -= lb[r]
        demand[tail] += lb[r]
        if g.has_edge(tail, head):
            # parallel arc: route through a private midpoint
            mid = ("mid", r)
            g.add_edge(tail, mid, capacity=ub[r] - lb[r], weight=0)
            g.add_edge(mid, head, capacity=ub[r] - lb[r], weight=0)
            arc_of[r] = (tail, mid)
        else:
            g.add_edge(tail, head, capacity=ub[r] - lb[r], weight=0)
            arc_of[r] = (tail, head)
    total = 0
    for node, dem in demand.items():
        if node != outside:
            g.add_node(node, demand=dem)
            total += dem
    g.nodes[outside]["demand"] = -total
    try:
        _, flow = nx.network_simplex(g)
    except nx.NetworkXUnfeasible:
        return None
    out = {}
    for r in refs:
        if r in arc_of:
            a, b = arc_of[r]
            out[r] = flow[a][b] + lb[r]
        else:
            out[r] = lb[r]
    return out
