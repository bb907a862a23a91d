"""The reported solution of the counterexample instance, in canonical indices.

The published listings use three labelling conventions:

=================================  ==============  ==================
listing                            HCF label       canonical HCF
=================================  ==============  ==================
x arcs (both trucks), z, truck-0 y  1-based, 0=depot  same number
u (both trucks), truck-1 y         0-based         label + 1
=================================  ==============  ==================

Trucks 0 and 1 are vehicles 1 and 2; waste types 0..2 are compartments
1..3.  The u listing is 0-based because its values reproduce the demand
rows that way (u label 0 of truck 0 equals demand row 1, and u along truck
1's long loop accumulates the demands of canonical HCFs 5, 9, 2, 1, 10, 6).
Read 0-based, the truck-1 y listing names exactly the HCFs entered by
truck 1's arcs.  y is nevertheless derived from the arcs, and the raw
listing is kept only so tests can pin that agreement.
"""

from __future__ import annotations

from .assignment import ModelAssignment
from .formulation import U, X, Y, Z

TRUCK_TO_VEHICLE = {0: 1, 1: 2}

# x listings, HCF labels already canonical (depot 0)
RAW_ARCS = {
    0: [(4, 0), (0, 4)],
    1: [(0, 3), (3, 7), (7, 0), (0, 5), (5, 9), (9, 2), (2, 1), (1, 10), (10, 6), (6, 8), (8, 0)],
}

# y listings as printed
RAW_Y = {0: [4], 1: [0, 1, 2, 4, 5, 6, 7, 8, 9]}
Y_LABEL_OFFSET = {0: 0, 1: 1}

# z listings as printed (all three waste types for each listed HCF)
RAW_Z = {0: [4], 1: [1, 2, 3, 5, 6, 7, 8, 9, 10]}

# u listings as printed: truck -> {(hcf label, waste type): value}; labels 0-based
RAW_U = {
    0: {
        (0, 0): 7, (0, 1): 7, (0, 2): 6, (1, 0): 8, (1, 1): 5, (1, 2): 4,
        (2, 0): 4, (2, 1): 6, (2, 2): 3, (3, 0): 3, (3, 1): 2, (3, 2): 2,
        (4, 0): 6, (4, 1): 4, (4, 2): 3, (5, 0): 6, (5, 1): 1, (5, 2): 3,
        (6, 0): 8, (6, 1): 7, (6, 2): 7, (7, 0): 500, (7, 1): 500, (7, 2): 500,
        (8, 1): 4, (8, 2): 7, (9, 0): 2, (9, 1): 3, (9, 2): 2,
    },
    1: {
        (0, 0): 21, (0, 1): 20, (0, 2): 20, (1, 0): 14, (1, 1): 13, (1, 2): 14,
        (2, 0): 4, (2, 1): 6, (2, 2): 3, (3, 0): 3, (3, 1): 2, (3, 2): 2,
        (4, 0): 6, (4, 1): 4, (4, 2): 3, (5, 0): 29, (5, 1): 24, (5, 2): 25,
        (6, 0): 12, (6, 1): 13, (6, 2): 10, (7, 0): 500, (7, 1): 500, (7, 2): 500,
        (8, 0): 6, (8, 1): 8, (8, 2): 10, (9, 0): 23, (9, 1): 23, (9, 2): 22,
    },
}
U_LABEL_OFFSET = 1


def listed_y_hcfs(truck: int) -> list[int]:
    """Canonical HCFs named by the printed y listing of ``truck``."""
    return [h + Y_LABEL_OFFSET[truck] for h in RAW_Y[truck]]


def paper_reported_assignment() -> ModelAssignment:
    """The reported optimum, partial (unlisted variables are 0)."""
    vals = {}
    for truck, arcs in RAW_ARCS.items():
        k = TRUCK_TO_VEHICLE[truck]
        for i, j in arcs:
            vals[X(i, j, k)] = 1
            vals[Y(j, k)] = 1 if j != 0 else vals.get(Y(0, k), 0)
        for i in RAW_Z[truck]:
            for p in (1, 2, 3):
                vals[Z(i, k, p)] = 1
        for (h, t), v in RAW_U[truck].items():
            vals[U(h + U_LABEL_OFFSET, k, t + 1)] = v
    vals = {r: v for r, v in vals.items() if not (r.kind == "y" and r.idx[0] == 0)}
    return ModelAssignment(vals, partial=True)
