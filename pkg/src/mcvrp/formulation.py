"""MILP formulation variants, assembled as explicit variables + tagged constraints.

Family tags
-----------
C1    each HCF is served by exactly one vehicle
C2    depot fleet bound (sum of depot indicators <= |K|)
C3    in-degree of an HCF equals its visit indicator
C4    out-degree of an HCF equals its visit indicator
C5    MTZ load ordering between HCF pairs
C5b   load lower bound u >= q (upper bound Q is the variable domain)
C6    z may be 1 only if the HCF is entered by the vehicle
C7    each waste type of an HCF is loaded by exactly one vehicle
C8    compartment capacity per vehicle
F1    visit-gated load bounds q*y <= u <= Q*y (replaces C5b)
F2    depot indicators equal the number of depot departures
F3    subtour cuts; exponential, never materialised (see ``mcvrp.subtour``)

The ``strengthened`` variant is a separate catalog: a vehicle-use binary
``v[k]`` replaces ``y[0,k]``, the depot has in/out degree ``v[k]``, MTZ is
gated on visits (C5G) and per-compartment flows (FCAP/FBAL) plus a unit
visit flow (GCAP/GBAL) tie every visited HCF to the depot.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

from .instance import WasteInstance

KIND_ORDER = "xyzuvfg"
_REF_RE = re.compile(r"^([xyzuvfg])\[(\d+(?:,\d+)*)\]$")


class VariableRef(NamedTuple):
    kind: str
    idx: tuple[int, ...]

    def __str__(self):
        return f"{self.kind}[{','.join(map(str, self.idx))}]"

    @classmethod
    def parse(cls, name: str) -> "VariableRef":
        m = _REF_RE.match(name.replace(" ", ""))
        if not m:
            raise ValueError(f"bad variable name {name!r}")
        ref = cls(m.group(1), tuple(int(t) for t in m.group(2).split(",")))
        arity = {"x": 3, "y": 2, "z": 3, "u": 3, "v": 1, "f": 4, "g": 3}[ref.kind]
        if len(ref.idx) != arity:
            raise ValueError(f"{name!r}: {ref.kind} takes {arity} indices")
        return ref


def X(i, j, k):
    return VariableRef("x", (i, j, k))


def Y(i, k):
    return VariableRef("y", (i, k))


def Z(i, k, p):
    return VariableRef("z", (i, k, p))


def U(i, k, p):
    return VariableRef("u", (i, k, p))


def V(k):
    return VariableRef("v", (k,))


def F(i, j, k, p):
    return VariableRef("f", (i, j, k, p))


def G(i, j, k):
    return VariableRef("g", (i, j, k))


@dataclass(frozen=True)
class Variable:
    ref: VariableRef
    lb: int
    ub: int
    integer: bool = True

    @property
    def binary(self) -> bool:
        return self.integer and self.lb >= 0 and self.ub <= 1


SENSES = ("<=", "=", ">=")


@dataclass(frozen=True)
class LinearConstraint:
    terms: tuple[tuple[int, VariableRef], ...]
    sense: str
    rhs: int
    family: str
    label: str

    def __post_init__(self):
        if self.sense not in SENSES:
            raise ValueError(f"bad sense {self.sense!r}")
        refs = [r for _, r in self.terms]
        if len(set(refs)) != len(refs):
            raise ValueError(f"{self.label}: duplicate variable in terms")

    def holds(self, lhs: int) -> bool:
        if self.sense == "<=":
            return lhs <= self.rhs
        if self.sense == ">=":
            return lhs >= self.rhs
        return lhs == self.rhs


def label(family: str, **idx) -> str:
    if not idx:
        return family
    return family + "[" + ",".join(f"{k}={v}" for k, v in idx.items()) + "]"


def constraint(terms: Iterable[tuple[int, VariableRef]], sense: str, rhs: int, family: str, lab: str):
    """Build a constraint, dropping zero coefficients."""
    return LinearConstraint(tuple((c, r) for c, r in terms if c != 0), sense, rhs, family, lab)


class Variant(str, enum.Enum):
    ORIGINAL = "original"
    FIX1 = "fix1"
    FIX12 = "fix12"
    FIX123 = "fix123"
    STRENGTHENED = "strengthened"

    @classmethod
    def coerce(cls, value) -> "Variant":
        return value if isinstance(value, cls) else cls(str(value).lower())

    @property
    def gated_bounds(self) -> bool:
        """True when u bounds are multiplied by the visit indicator (F1)."""
        return self is not Variant.ORIGINAL


CATALOG: dict[Variant, tuple[str, ...]] = {
    Variant.ORIGINAL: ("C1", "C2", "C3", "C4", "C5", "C5b", "C6", "C7", "C8"),
    Variant.FIX1: ("C1", "C2", "C3", "C4", "C5", "F1", "C6", "C7", "C8"),
    Variant.FIX12: ("C1", "C2", "C3", "C4", "C5", "F1", "C6", "C7", "C8", "F2"),
    Variant.FIX123: ("C1", "C2", "C3", "C4", "C5", "F1", "C6", "C7", "C8", "F2", "F3"),
    Variant.STRENGTHENED: (
        "C1", "C2", "C3", "C4", "C5G", "F1", "C6", "C7", "C8",
        "DOUT", "DIN", "LINK", "FCAP", "FBAL", "GCAP", "GBAL",
    ),
}
LAZY_FAMILIES = frozenset({"F3"})


@dataclass(frozen=True)
class MilpModel:
    instance: WasteInstance
    variant: Variant
    variables: dict[VariableRef, Variable]
    constraints: tuple[LinearConstraint, ...]
    objective: tuple[tuple[int, VariableRef], ...]
    lazy_families: tuple[str, ...] = ()
    name: str = field(default="mcvrp")

    def families(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for con in self.constraints:
            counts[con.family] = counts.get(con.family, 0) + 1
        return counts

    def family_tags(self) -> set[str]:
        return set(self.families()) | set(self.lazy_families)

    def binaries(self) -> list[VariableRef]:
        return [r for r, v in self.variables.items() if v.binary]

    def with_bounds(self, fixes: dict[VariableRef, tuple[int, int]]) -> "MilpModel":
        """Copy of the model with some variable bounds replaced."""
        variables = dict(self.variables)
        for ref, (lb, ub) in fixes.items():
            variables[ref] = Variable(ref, lb, ub, variables[ref].integer)
        return MilpModel(self.instance, self.variant, variables, self.constraints,
                         self.objective, self.lazy_families, self.name)


def _declare(inst: WasteInstance, variant: Variant) -> dict[VariableRef, Variable]:
    n, nodes, K, P = inst.hcf_count, inst.nodes, inst.vehicles, inst.compartments
    strengthened = variant is Variant.STRENGTHENED
    out: dict[VariableRef, Variable] = {}

    def add(ref, lb, ub):
        out[ref] = Variable(ref, lb, ub, True)

    for i in nodes:
        for j in nodes:
            if i != j:
                for k in K:
                    add(X(i, j, k), 0, 1)
    for i in (inst.hcfs if strengthened else nodes):
        for k in K:
            add(Y(i, k), 0, 1)
    for i in inst.hcfs:
        for k in K:
            for p in P:
                add(Z(i, k, p), 0, 1)
    for i in inst.hcfs:
        for k in K:
            for p in P:
                add(U(i, k, p), 0, inst.cap(p))
    if strengthened:
        for k in K:
            add(V(k), 0, 1)
        for i in nodes:
            for j in nodes:
                if i != j:
                    for k in K:
                        for p in P:
                            add(F(i, j, k, p), 0, inst.cap(p))
        for i in nodes:
            for j in nodes:
                if i != j:
                    for k in K:
                        add(G(i, j, k), 0, n)
    return out


def build_model(inst: WasteInstance, variant="original") -> MilpModel:
    """Assemble the MILP for ``variant`` on ``inst``.

    Pure and deterministic: the same inputs give the same variables,
    constraint order and labels.
    """
    variant = Variant.coerce(variant)
    fams = CATALOG[variant]
    n, nodes, hcfs, K, P = inst.hcf_count, inst.nodes, inst.hcfs, inst.vehicles, inst.compartments
    strengthened = variant is Variant.STRENGTHENED
    cons: list[LinearConstraint] = []

    if "C1" in fams:
        for i in hcfs:
            cons.append(constraint([(1, Y(i, k)) for k in K], "=", 1, "C1", label("C1", i=i)))
    if "C2" in fams:
        depot = [(1, V(k)) for k in K] if strengthened else [(1, Y(0, k)) for k in K]
        cons.append(constraint(depot, "<=", inst.vehicle_count, "C2", "C2"))
    if "C3" in fams:
        for j in hcfs:
            for k in K:
                terms = [(1, X(i, j, k)) for i in nodes if i != j] + [(-1, Y(j, k))]
                cons.append(constraint(terms, "=", 0, "C3", label("C3", j=j, k=k)))
    if "C4" in fams:
        for i in hcfs:
            for k in K:
                terms = [(1, X(i, j, k)) for j in nodes if j != i] + [(-1, Y(i, k))]
                cons.append(constraint(terms, "=", 0, "C4", label("C4", i=i, k=k)))
    if "C5" in fams:
        for i in hcfs:
            for j in hcfs:
                if i == j:
                    continue
                for p in P:
                    for k in K:
                        Q = inst.cap(p)
                        terms = [(1, U(i, k, p)), (-1, U(j, k, p)), (Q, X(i, j, k))]
                        cons.append(constraint(terms, "<=", Q - inst.q(j, p), "C5",
                                               label("C5", i=i, j=j, k=k, p=p)))
    if "C5G" in fams:
        for i in hcfs:
            for j in hcfs:
                if i == j:
                    continue
                for p in P:
                    for k in K:
                        Q = inst.cap(p)
                        terms = [(1, U(i, k, p)), (-1, U(j, k, p)), (Q, X(i, j, k)), (Q, Y(j, k))]
                        cons.append(constraint(terms, "<=", 2 * Q - inst.q(j, p), "C5G",
                                               label("C5G", i=i, j=j, k=k, p=p)))
    if "C5b" in fams:
        for i in hcfs:
            for k in K:
                for p in P:
                    cons.append(constraint([(1, U(i, k, p))], ">=", inst.q(i, p), "C5b",
                                           label("C5b", i=i, k=k, p=p)))
    if "F1" in fams:
        for i in hcfs:
            for k in K:
                for p in P:
                    cons.append(constraint([(inst.q(i, p), Y(i, k)), (-1, U(i, k, p))], "<=", 0, "F1",
                                           label("F1", i=i, k=k, p=p, b="lo")))
                    cons.append(constraint([(1, U(i, k, p)), (-inst.cap(p), Y(i, k))], "<=", 0, "F1",
                                           label("F1", i=i, k=k, p=p, b="hi")))
    if "C6" in fams:
        for j in hcfs:
            for k in K:
                for p in P:
                    terms = [(1, Z(j, k, p))] + [(-1, X(i, j, k)) for i in nodes if i != j]
                    cons.append(constraint(terms, "<=", 0, "C6", label("C6", j=j, k=k, p=p)))
    if "C7" in fams:
        for j in hcfs:
            for p in P:
                cons.append(constraint([(1, Z(j, k, p)) for k in K], "=", 1, "C7", label("C7", j=j, p=p)))
    if "C8" in fams:
        for k in K:
            for p in P:
                terms = [(inst.q(j, p), Z(j, k, p)) for j in hcfs]
                cons.append(constraint(terms, "<=", inst.cap(p), "C8", label("C8", k=k, p=p)))
    if "F2" in fams:
        terms = [(1, Y(0, k)) for k in K] + [(-1, X(0, j, k)) for j in hcfs for k in K]
        cons.append(constraint(terms, "=", 0, "F2", "F2"))
    if strengthened:
        for k in K:
            terms = [(1, X(0, j, k)) for j in hcfs] + [(-1, V(k))]
            cons.append(constraint(terms, "=", 0, "DOUT", label("DOUT", k=k)))
        for k in K:
            terms = [(1, X(j, 0, k)) for j in hcfs] + [(-1, V(k))]
            cons.append(constraint(terms, "=", 0, "DIN", label("DIN", k=k)))
        for i in hcfs:
            for k in K:
                cons.append(constraint([(1, Y(i, k)), (-1, V(k))], "<=", 0, "LINK", label("LINK", i=i, k=k)))
        for i in nodes:
            for j in nodes:
                if i == j:
                    continue
                for k in K:
                    for p in P:
                        cons.append(constraint([(1, F(i, j, k, p)), (-inst.cap(p), X(i, j, k))], "<=", 0,
                                               "FCAP", label("FCAP", i=i, j=j, k=k, p=p)))
        for i in hcfs:
            for k in K:
                for p in P:
                    terms = ([(1, F(j, i, k, p)) for j in nodes if j != i]
                             + [(-1, F(i, j, k, p)) for j in nodes if j != i]
                             + [(-inst.q(i, p), Y(i, k))])
                    cons.append(constraint(terms, "=", 0, "FBAL", label("FBAL", i=i, k=k, p=p)))
        for i in nodes:
            for j in nodes:
                if i == j:
                    continue
                for k in K:
                    cons.append(constraint([(1, G(i, j, k)), (-n, X(i, j, k))], "<=", 0,
                                           "GCAP", label("GCAP", i=i, j=j, k=k)))
        for i in hcfs:
            for k in K:
                terms = ([(1, G(j, i, k)) for j in nodes if j != i]
                         + [(-1, G(i, j, k)) for j in nodes if j != i]
                         + [(-1, Y(i, k))])
                cons.append(constraint(terms, "=", 0, "GBAL", label("GBAL", i=i, k=k)))

    objective = tuple((inst.d(i, j), X(i, j, k)) for i in nodes for j in nodes if i != j for k in K
                      if inst.d(i, j) != 0)
    return MilpModel(
        instance=inst,
        variant=variant,
        variables=_declare(inst, variant),
        constraints=tuple(cons),
        objective=objective,
        lazy_families=tuple(f for f in fams if f in LAZY_FAMILIES),
        name=f"mcvrp_{variant.value}",
    )


def expected_family_counts(inst: WasteInstance, variant) -> dict[str, int]:
    """Closed-form constraint counts per family."""
    variant = Variant.coerce(variant)
    n, K, P = inst.hcf_count, inst.vehicle_count, inst.compartment_count
    arcs = (n + 1) * n
    table = {
        "C1": n, "C2": 1, "C3": n * K, "C4": n * K, "C5": n * (n - 1) * P * K,
        "C5G": n * (n - 1) * P * K, "C5b": n * K * P, "F1": 2 * n * K * P,
        "C6": n * K * P, "C7": n * P, "C8": K * P, "F2": 1,
        "DOUT": K, "DIN": K, "LINK": n * K, "FCAP": arcs * K * P, "FBAL": n * K * P,
        "GCAP": arcs * K, "GBAL": n * K,
    }
    return {f: table[f] for f in CATALOG[variant] if f not in LAZY_FAMILIES and table[f]}
