import random

import pytest

from conftest import exhaustive_cut_violated, loops_assignment, random_instance, random_structure
from mcvrp.formulation import X, Y
from mcvrp.instance import WasteInstance
from mcvrp.oracle import exact_semantic_solve, plan_to_assignment
from mcvrp.subtour import (CutError, cut_lhs, enumerate_subtour_cuts, make_subtour_cut,
                           separate_subtour)


def line(n=4):
    dist = [[0 if i == j else 1 for j in range(n + 1)] for i in range(n + 1)]
    return WasteInstance.from_rows([9], [[1]] * n, dist, vehicle_count=2)


def test_cut_terms_and_label(paper):
    con = make_subtour_cut(paper, {0, 1}, 2, 3)
    assert con.label == "F3[S={0,1},k=2,i=3]"
    assert con.sense == ">=" and con.rhs == 0
    # 2 nodes inside times 9 outside, both directions, plus the visit term
    assert len(con.terms) == 2 * 9 * 2 + 1
    assert (-2, Y(3, 2)) in con.terms


def test_as_printed_label(paper):
    assert make_subtour_cut(paper, {0, 1}, 1, 3, "as_printed").label == "F3[S={0,1},k=1,i=3,r=as_printed]"


@pytest.mark.parametrize("S,k,i,msg", [
    ({1, 2}, 1, 3, "depot"),
    ({0, 1}, 1, 1, "outside S"),
    ({0, 1}, 3, 2, "vehicle"),
    ({0, 11}, 1, 2, "outside"),
    (set(range(11)), 1, 2, "whole node set"),
])
def test_cut_domain_errors(paper, S, k, i, msg):
    with pytest.raises(CutError, match=msg):
        make_subtour_cut(paper, S, k, i)


def test_enumeration_size():
    inst = line(4)
    # every subset of HCFs except the full one joins the depot, times the HCFs left out, per vehicle
    expected = sum(__import__("math").comb(4, s) * (4 - s) for s in range(4)) * 2
    assert len(list(enumerate_subtour_cuts(inst))) == expected == 64


def test_depot_free_cycle_is_separated():
    inst = line(4)
    asg = loops_assignment(inst, {1: [(1, 2)]}, cycles_by_vehicle={1: [(3, 4)]})
    cut = separate_subtour(inst, asg, 1)
    assert cut is not None
    assert cut.S == frozenset({0, 1, 2}) and cut.i == 3 and cut.lhs == 0
    assert cut_lhs(cut.constraint, asg) < 0


def test_butterfly_is_not_separated(paper, paper_asg):
    for k in paper.vehicles:
        assert separate_subtour(paper, paper_asg, k) is None
        assert not exhaustive_cut_violated(paper, paper_asg, k)


def test_dangling_path_found_by_min_cut():
    inst = line(3)
    # 0 -> 1 -> 2 with nothing returning: every node is on the depot's component
    asg = loops_assignment(inst, {}).replace({X(0, 1, 1): 1, X(1, 2, 1): 1, Y(1, 1): 1, Y(2, 1): 1})
    cut = separate_subtour(inst, asg, 1)
    assert cut is not None and cut.lhs < 2


def test_fractional_values_are_rejected():
    inst = line(3)
    asg = loops_assignment(inst, {1: [(1,)]}).replace({X(0, 2, 1): 2})
    with pytest.raises(CutError, match="0/1"):
        separate_subtour(inst, asg, 1)


def test_as_printed_reading_cuts_a_true_route(paper):
    plan = exact_semantic_solve(paper)
    asg = plan_to_assignment(paper, plan, "fix12")
    assert separate_subtour(paper, asg, 1) is None
    cut = separate_subtour(paper, asg, 1, "as_printed")
    assert cut is not None and cut_lhs(cut.constraint, asg) < 0


@pytest.mark.parametrize("seed", range(60))
@pytest.mark.parametrize("reading", ["depot_side", "as_printed"])
def test_separator_matches_exhaustive_enumeration(seed, reading):
    rng = random.Random(seed)
    inst = random_instance(rng, rng.randint(1, 7), K=2, P=1, Q=50, qmax=5)
    asg = random_structure(rng, inst)
    if rng.random() < 0.3:
        a, b = rng.sample(list(inst.nodes), 2)
        asg = asg.replace({X(a, b, 1): 1})
    for k in inst.vehicles:
        cut = separate_subtour(inst, asg, k, reading)
        assert (cut is not None) == exhaustive_cut_violated(inst, asg, k, reading)
        if cut is not None:
            assert cut_lhs(cut.constraint, asg) < 0
