"""Checks on the encoded reported solution and its label conventions."""

from mcvrp.formulation import U, Y, Z
from mcvrp.paper import RAW_ARCS, RAW_U, TRUCK_TO_VEHICLE, U_LABEL_OFFSET, listed_y_hcfs


def entered(truck):
    return sorted(j for _, j in RAW_ARCS[truck] if j)


def test_listed_y_names_the_entered_hcfs():
    for truck in (0, 1):
        assert sorted(listed_y_hcfs(truck)) == entered(truck)


def test_every_hcf_is_entered_once():
    assert sorted(entered(0) + entered(1)) == list(range(1, 11))


def test_u_labels_reproduce_demand_rows(paper):
    # truck 0's listed u equal the demand row of the same canonical HCF for
    # every HCF whose value is not capped at 500
    for (h, t), v in RAW_U[0].items():
        i = h + U_LABEL_OFFSET
        if v != 500:
            assert v == paper.q(i, t + 1), (h, t)


def test_u_label_without_offset_would_not_match(paper):
    mismatches = sum(1 for (h, t), v in RAW_U[0].items() if h and v != 500 and v != paper.q(h, t + 1))
    assert mismatches > 10


def test_reported_assignment_contents(paper_asg):
    assert TRUCK_TO_VEHICLE == {0: 1, 1: 2}
    assert paper_asg.arcs(1) == [(0, 4), (4, 0)]
    assert len(paper_asg.arcs(2)) == 11
    assert paper_asg[Y(0, 1)] == paper_asg[Y(0, 2)] == 0
    assert paper_asg[Y(4, 1)] == 1 and paper_asg[Y(4, 2)] == 0
    assert all(paper_asg[Z(i, 2, p)] for i in entered(1) for p in (1, 2, 3))
    # HCF 9 has no listed u for waste type 0 on truck 0 and its demand there is 0
    assert paper_asg[U(9, 1, 1)] == 0
