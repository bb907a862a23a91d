"""Instance data model for the multi-compartment waste collection VRP.

Node 0 is the depot, HCFs are nodes 1..n.  Vehicles are 1..K and
compartments 1..P.  ``demand`` carries an all-zero row for the depot so
that ``demand[i]`` is indexed by the canonical node number.
"""

from __future__ import annotations

import hashlib
import json
import warnings
from dataclasses import dataclass
from importlib import resources
from typing import Sequence

import jsonschema


class InstanceError(ValueError):
    """Raised when an instance document is malformed or violates an invariant."""

    def __init__(self, problems: Sequence[str]):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class FleetCapacityWarning(UserWarning):
    pass


@dataclass(frozen=True)
class WasteInstance:
    hcf_count: int
    vehicle_count: int
    compartment_count: int
    capacity: tuple[int, ...]
    demand: tuple[tuple[int, ...], ...]
    distance: tuple[tuple[int, ...], ...]
    penalty: tuple[int, ...] | None = None
    name: str = ""

    def __post_init__(self):
        # normalise nested lists to tuples so instances are hashable and immutable
        object.__setattr__(self, "capacity", tuple(self.capacity))
        object.__setattr__(self, "demand", tuple(tuple(r) for r in self.demand))
        object.__setattr__(self, "distance", tuple(tuple(r) for r in self.distance))
        if self.penalty is not None:
            object.__setattr__(self, "penalty", tuple(self.penalty))
        problems = instance_problems(self)
        if problems:
            raise InstanceError(problems)

    @classmethod
    def from_rows(cls, capacity, demand_rows, distance, vehicle_count, name="", penalty=None):
        """Build from HCF demand rows (row 0 = HCF 1), as in the file format."""
        demand_rows = [tuple(r) for r in demand_rows]
        P = len(capacity)
        return cls(
            hcf_count=len(demand_rows),
            vehicle_count=vehicle_count,
            compartment_count=P,
            capacity=tuple(capacity),
            demand=((0,) * P,) + tuple(demand_rows),
            distance=distance,
            penalty=penalty,
            name=name,
        )

    @property
    def nodes(self) -> range:
        return range(self.hcf_count + 1)

    @property
    def hcfs(self) -> range:
        return range(1, self.hcf_count + 1)

    @property
    def vehicles(self) -> range:
        return range(1, self.vehicle_count + 1)

    @property
    def compartments(self) -> range:
        return range(1, self.compartment_count + 1)

    def q(self, i: int, p: int) -> int:
        return self.demand[i][p - 1]

    def cap(self, p: int) -> int:
        return self.capacity[p - 1]

    def d(self, i: int, j: int) -> int:
        return self.distance[i][j]

    def to_dict(self) -> dict:
        doc = {
            "hcf_count": self.hcf_count,
            "vehicle_count": self.vehicle_count,
            "compartment_count": self.compartment_count,
            "capacity": list(self.capacity),
            "demand": [list(r) for r in self.demand[1:]],
            "distance": [list(r) for r in self.distance],
        }
        if self.name:
            doc["name"] = self.name
        if self.penalty is not None:
            doc["penalty"] = list(self.penalty)
        return doc

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


def instance_problems(inst: WasteInstance) -> list[str]:
    """Return every invariant violation of ``inst`` (empty when valid)."""
    n, P = inst.hcf_count, inst.compartment_count
    problems = []
    if n < 1 or inst.vehicle_count < 1 or P < 1:
        return ["hcf_count, vehicle_count and compartment_count must be positive"]
    if len(inst.capacity) != P:
        problems.append(f"capacity has {len(inst.capacity)} entries, expected {P}")
    for p, Q in enumerate(inst.capacity, start=1):
        if Q <= 0:
            problems.append(f"capacity[{p}]={Q} must be positive")
    if len(inst.demand) != n + 1:
        problems.append(f"demand has {len(inst.demand) - 1} HCF rows, expected {n}")
    if any(v != 0 for v in inst.demand[0]):
        problems.append("depot demand row must be zero")
    for i, row in enumerate(inst.demand[1:], start=1):
        if len(row) != P:
            problems.append(f"demand row {i} has {len(row)} entries, expected {P}")
            continue
        for p, v in enumerate(row, start=1):
            if v < 0:
                problems.append(f"q[{i}][{p}]={v} is negative")
            elif p <= len(inst.capacity) and v > inst.capacity[p - 1]:
                problems.append(f"q[{i}][{p}]={v} exceeds capacity Q[{p}]={inst.capacity[p - 1]}")
    if len(inst.distance) != n + 1 or any(len(r) != n + 1 for r in inst.distance):
        problems.append(f"distance must be {n + 1}x{n + 1}")
    else:
        for i, row in enumerate(inst.distance):
            for j, v in enumerate(row):
                if v < 0:
                    problems.append(f"d[{i}][{j}]={v} is negative")
            if row[i] != 0:
                problems.append(f"d[{i}][{i}]={row[i]} must be 0")
    if inst.penalty is not None and len(inst.penalty) != n:
        problems.append(f"penalty has {len(inst.penalty)} entries, expected {n}")
    return problems


def total_demand(inst: WasteInstance, p: int) -> int:
    if not 1 <= p <= inst.compartment_count:
        raise IndexError(f"compartment {p} out of range 1..{inst.compartment_count}")
    return sum(inst.q(i, p) for i in inst.hcfs)


def fleet_capacity_warnings(inst: WasteInstance) -> list[str]:
    """Compartments whose total demand exceeds what the whole fleet can carry."""
    out = []
    for p in inst.compartments:
        total, fleet = total_demand(inst, p), inst.vehicle_count * inst.cap(p)
        if total > fleet:
            out.append(f"compartment {p}: total demand {total} exceeds fleet capacity {fleet}")
    return out


def _schema() -> dict:
    text = resources.files("mcvrp").joinpath("data/instance.schema.json").read_text()
    return json.loads(text)


def parse_instance(text: str) -> WasteInstance:
    """Parse a JSON instance document into a validated :class:`WasteInstance`.

    Raises :class:`InstanceError` on schema errors or invariant violations.
    A :class:`FleetCapacityWarning` is issued when some compartment's total
    demand exceeds ``vehicle_count * capacity``.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError([f"not a JSON document: {exc}"]) from None
    try:
        jsonschema.validate(doc, _schema())
    except jsonschema.ValidationError as exc:
        where = "/".join(str(x) for x in exc.absolute_path) or "<root>"
        raise InstanceError([f"schema error at {where}: {exc.message}"]) from None
    n, P = doc["hcf_count"], doc["compartment_count"]
    if len(doc["demand"]) != n:
        raise InstanceError([f"demand has {len(doc['demand'])} rows, expected hcf_count={n}"])
    if len(doc["capacity"]) != P:
        raise InstanceError([f"capacity has {len(doc['capacity'])} entries, expected compartment_count={P}"])
    inst = WasteInstance.from_rows(
        capacity=doc["capacity"],
        demand_rows=doc["demand"],
        distance=doc["distance"],
        vehicle_count=doc["vehicle_count"],
        name=doc.get("name", ""),
        penalty=doc.get("penalty"),
    )
    for msg in fleet_capacity_warnings(inst):
        warnings.warn(msg, FleetCapacityWarning, stacklevel=2)
    return inst


def serialize_instance(inst: WasteInstance) -> str:
    return json.dumps(inst.to_dict(), indent=2) + "\n"


def load_instance(path) -> WasteInstance:
    with open(path) as fh:
        return parse_instance(fh.read())


# --- the counterexample instance ------------------------------------------

PAPER_CAPACITY = (500, 500, 500)

PAPER_DEMAND = (
    (7, 7, 6),
    (8, 5, 4),
    (4, 6, 3),
    (3, 2, 2),
    (6, 4, 3),
    (6, 1, 3),
    (8, 7, 7),
    (9, 9, 8),
    (0, 4, 7),
    (2, 3, 2),
)

PAPER_DISTANCE = (
    (0, 10, 18, 11, 10, 10, 11, 17, 14, 12, 19),
    (11, 0, 17, 12, 15, 18, 11, 16, 14, 16, 11),
    (16, 1, 0, 12, 19, 17, 10, 19, 12, 17, 15),
    (10, 2, 18, 0, 20, 18, 13, 15, 15, 14, 17),
    (18, 3, 11, 16, 0, 19, 18, 20, 17, 15, 13),
    (18, 4, 16, 11, 20, 0, 20, 20, 12, 10, 14),
    (16, 5, 14, 17, 11, 14, 0, 17, 10, 10, 13),
    (17, 6, 11, 18, 12, 16, 10, 0, 11, 12, 12),
    (12, 7, 18, 17, 19, 20, 12, 20, 0, 13, 18),
    (13, 8, 10, 16, 18, 16, 14, 16, 13, 0, 14),
    (10, 9, 18, 15, 11, 11, 10, 17, 15, 18, 0),
)


def paper_instance() -> WasteInstance:
    """The 10-HCF, 2-vehicle, 3-compartment counterexample instance."""
    return WasteInstance.from_rows(
        capacity=PAPER_CAPACITY,
        demand_rows=PAPER_DEMAND,
        distance=PAPER_DISTANCE,
        vehicle_count=2,
        name="paper",
    )
