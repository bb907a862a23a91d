"""Variable assignments: exact evaluation against a model, u-feasibility, objective."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping

from . import difference
from .difference import DiffConstraint, NegativeCycle
from .formulation import KIND_ORDER, MilpModel, U, Variant, VariableRef, X, Y
from .instance import WasteInstance


class AssignmentError(ValueError):
    pass


def _sort_key(ref: VariableRef):
    return KIND_ORDER.index(ref.kind), ref.idx


@dataclass(frozen=True)
class ModelAssignment:
    """Integer values for model variables.

    A partial assignment treats every unlisted variable as 0.
    """

    values: Mapping[VariableRef, int]
    partial: bool = True

    def __getitem__(self, ref: VariableRef) -> int:
        return self.values.get(ref, 0)

    def arcs(self, k: int) -> list[tuple[int, int]]:
        return sorted(r.idx[:2] for r, v in self.values.items() if r.kind == "x" and r.idx[2] == k and v)

    def nonzero(self) -> dict[VariableRef, int]:
        return {r: v for r, v in sorted(self.values.items(), key=lambda kv: _sort_key(kv[0])) if v}

    def replace(self, updates: Mapping[VariableRef, int]) -> "ModelAssignment":
        vals = dict(self.values)
        vals.update(updates)
        return ModelAssignment(vals, self.partial)

    def without(self, kinds: str) -> "ModelAssignment":
        return ModelAssignment({r: v for r, v in self.values.items() if r.kind not in kinds}, self.partial)

    def to_dict(self, include_zeros: bool = False) -> dict[str, int]:
        items = sorted(self.values.items(), key=lambda kv: _sort_key(kv[0]))
        return {str(r): v for r, v in items if v or include_zeros}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1) + "\n"

    @classmethod
    def from_dict(cls, doc: Mapping[str, int], partial: bool = True) -> "ModelAssignment":
        vals = {}
        for name, v in doc.items():
            if isinstance(v, bool) or not isinstance(v, int):
                raise AssignmentError(f"{name}: value {v!r} is not an integer")
            vals[VariableRef.parse(name)] = v
        return cls(vals, partial)

    @classmethod
    def from_json(cls, text: str, partial: bool = True) -> "ModelAssignment":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise AssignmentError(f"not a JSON document: {exc}") from None
        if not isinstance(doc, dict):
            raise AssignmentError("assignment document must be a JSON object")
        try:
            return cls.from_dict(doc, partial)
        except ValueError as exc:
            raise AssignmentError(str(exc)) from None


@dataclass(frozen=True)
class ViolationRecord:
    label: str
    family: str
    lhs: int
    sense: str
    rhs: int

    def __str__(self):
        return f"{self.label}: {self.lhs} {self.sense} {self.rhs} fails"

    def to_dict(self) -> dict:
        return {"label": self.label, "family": self.family, "lhs": self.lhs, "sense": self.sense, "rhs": self.rhs}


def check_domain(model: MilpModel, asg: ModelAssignment) -> list[VariableRef]:
    """Validate ``asg`` against declared variables; return defaulted refs.

    Raises :class:`AssignmentError` for undeclared variables, out-of-domain
    values, or missing variables in a non-partial assignment.
    """
    for ref, val in asg.values.items():
        var = model.variables.get(ref)
        if var is None:
            raise AssignmentError(f"{ref} is not declared in the {model.variant.value} model")
        if not var.lb <= val <= var.ub:
            raise AssignmentError(f"{ref}={val} outside domain [{var.lb}, {var.ub}]")
    missing = [r for r in model.variables if r not in asg.values]
    if missing and not asg.partial:
        raise AssignmentError(f"complete assignment lacks {len(missing)} variables, e.g. {missing[0]}")
    for ref in missing:
        if not model.variables[ref].lb <= 0 <= model.variables[ref].ub:
            raise AssignmentError(f"{ref} defaults to 0 outside domain")
    return missing


def evaluate(model: MilpModel, asg: ModelAssignment) -> list[ViolationRecord]:
    """Every materialised constraint violated by ``asg``, in catalog order.

    Lazy families (subtour cuts) are checked by separation: for each vehicle
    the separator's violated cut, if any, is reported.
    """
    check_domain(model, asg)
    vals = asg.values
    out = []
    for con in model.constraints:
        lhs = sum(c * vals.get(r, 0) for c, r in con.terms)
        if not con.holds(lhs):
            out.append(ViolationRecord(con.label, con.family, lhs, con.sense, con.rhs))
    if "F3" in model.lazy_families:
        from .subtour import separate_subtour

        for k in model.instance.vehicles:
            cut = separate_subtour(model.instance, asg, k)
            if cut is not None:
                con = cut.constraint
                lhs = sum(c * vals.get(r, 0) for c, r in con.terms)
                out.append(ViolationRecord(con.label, con.family, lhs, con.sense, con.rhs))
    return out


def objective_value(inst: WasteInstance, asg: ModelAssignment) -> int:
    return sum(inst.d(*r.idx[:2]) * v for r, v in asg.values.items() if r.kind == "x")


# --- u feasibility for fixed routing ----------------------------------------

def u_system(inst: WasteInstance, asg: ModelAssignment, variant, k: int, p: int) -> list[DiffConstraint]:
    """Difference constraints on ``u[., k, p]`` once x and y are fixed.

    Node 0 is an artificial origin pinned at 0 and carries the bounds.
    """
    variant = Variant.coerce(variant)
    Q = inst.cap(p)
    cons = []
    for i in inst.hcfs:
        for j in inst.hcfs:
            if i == j:
                continue
            x = asg[X(i, j, k)]
            if variant is Variant.STRENGTHENED:
                bound = 2 * Q - inst.q(j, p) - Q * x - Q * asg[Y(j, k)]
                fam = "C5G"
            else:
                bound = Q - inst.q(j, p) - Q * x
                fam = "C5"
            cons.append(DiffConstraint(i, j, bound, f"{fam}[i={i},j={j},k={k},p={p}]"))
    for i in inst.hcfs:
        if variant.gated_bounds:
            y = asg[Y(i, k)]
            lo, hi, fam = inst.q(i, p) * y, Q * y, "F1"
        else:
            lo, hi, fam = inst.q(i, p), Q, "C5b"
        # domain [0, Q] is always part of the system
        lo, hi = max(lo, 0), min(hi, Q)
        cons.append(DiffConstraint(i, 0, hi, f"{fam}[i={i},k={k},p={p},b=hi]"))
        cons.append(DiffConstraint(0, i, -lo, f"{fam}[i={i},k={k},p={p},b=lo]"))
    return cons


@dataclass(frozen=True)
class UBlock:
    k: int
    p: int
    u: dict[int, int] | None = None
    cycle: NegativeCycle | None = None

    @property
    def feasible(self) -> bool:
        return self.cycle is None


@dataclass(frozen=True)
class UFeasibility:
    blocks: dict[tuple[int, int], UBlock] = field(default_factory=dict)

    @property
    def feasible(self) -> bool:
        return all(b.feasible for b in self.blocks.values())

    def witness(self) -> dict[VariableRef, int]:
        if not self.feasible:
            raise ValueError("no witness: some (k, p) block is infeasible")
        return {U(i, b.k, b.p): v for b in self.blocks.values() for i, v in b.u.items()}

    def certificates(self) -> dict[tuple[int, int], NegativeCycle]:
        return {kp: b.cycle for kp, b in self.blocks.items() if b.cycle is not None}


def u_feasibility(inst: WasteInstance, asg: ModelAssignment, variant="original") -> UFeasibility:
    """Decide whether integer loads u exist for the x, y fixed in ``asg``.

    Every (vehicle, compartment) block is an independent difference system.
    Feasible blocks carry the pointwise largest witness; infeasible ones a
    negative cycle whose constraints sum to ``0 <= negative``.
    """
    blocks = {}
    for k in inst.vehicles:
        for p in inst.compartments:
            res = difference.solve(inst.hcfs, u_system(inst, asg, variant, k, p), origin=0)
            if isinstance(res, NegativeCycle):
                blocks[k, p] = UBlock(k, p, cycle=res)
            else:
                blocks[k, p] = UBlock(k, p, u={i: res[i] for i in inst.hcfs})
    return UFeasibility(blocks)


def u_ranges(inst: WasteInstance, asg: ModelAssignment, variant="original"):
    """Feasible interval of every ``u[i,k,p]`` for the fixed routing.

    Feasible blocks contribute ``U(i,k,p): (lo, hi)`` entries; an infeasible
    block contributes one ``(k, p): NegativeCycle`` entry instead.
    """
    out: dict = {}
    bad: dict = {}
    for k in inst.vehicles:
        for p in inst.compartments:
            res = difference.ranges(inst.hcfs, u_system(inst, asg, variant, k, p), origin=0)
            if isinstance(res, NegativeCycle):
                bad[k, p] = res
            else:
                for i in inst.hcfs:
                    out[U(i, k, p)] = res[i]
    out.update(bad)
    return out


def routing_feasible(model: MilpModel, asg: ModelAssignment) -> bool:
    """True when some integer u completes ``asg`` to a feasible solution.

    Variables other than u are taken from ``asg``.  Since u only occurs in
    the difference constraints of :func:`u_system`, the largest witness is
    feasible whenever any u is.
    """
    uf = u_feasibility(model.instance, asg, model.variant)
    if not uf.feasible:
        return False
    return not evaluate(model, asg.without("u").replace(uf.witness()))
