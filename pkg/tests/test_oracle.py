import itertools
import random

import pytest

from conftest import brute_semantic_optimum, random_instance
from mcvrp.assignment import evaluate
from mcvrp.formulation import Variant, Y, build_model
from mcvrp.instance import WasteInstance
from mcvrp.oracle import (InfeasibleError, ScaleGuardError, brute_force_milp, exact_semantic_solve,
                          held_karp_tour, plan_to_assignment, route_distance)
from mcvrp.routes import semantic_validate


def gap_instance():
    return WasteInstance.from_rows([10], [[2], [3], [4]],
                                   [[0, 1, 2, 1], [2, 0, 9, 9], [1, 9, 0, 8], [1, 8, 9, 0]], vehicle_count=1)


def test_held_karp_small(paper):
    assert held_karp_tour(paper, [1, 2]) == (30, (2, 1))


@pytest.mark.parametrize("seed", range(25))
def test_held_karp_matches_permutations(seed):
    rng = random.Random(seed)
    inst = random_instance(rng, 7, K=1, P=1, Q=100, qmax=5)
    subset = sorted(rng.sample(list(inst.hcfs), rng.randint(1, 6)))
    cost, order = held_karp_tour(inst, subset)
    best = min(route_distance(inst, p) for p in itertools.permutations(subset))
    assert cost == best == route_distance(inst, order)
    # smallest optimal order in lexicographic terms
    assert order == min(p for p in itertools.permutations(subset) if route_distance(inst, p) == best)


def test_builtin_semantic_optimum(paper):
    plan = exact_semantic_solve(paper)
    assert plan.total_distance == 114
    assert plan.routes == ((4, 1, 10, 5, 9, 2, 3, 7, 6, 8),)
    assert plan.loads == ((53, 48, 45),)


@pytest.mark.parametrize("seed", range(20))
def test_semantic_solve_matches_partition_enumeration(seed):
    rng = random.Random(seed)
    inst = random_instance(rng, rng.randint(1, 6), K=rng.randint(1, 3), P=2, Q=12, qmax=6)
    expected = brute_semantic_optimum(inst)
    if expected is None:
        with pytest.raises(InfeasibleError):
            exact_semantic_solve(inst)
        return
    plan = exact_semantic_solve(inst)
    assert plan.total_distance == expected
    assert sorted(i for r in plan.routes for i in r) == list(inst.hcfs)
    assert len(plan.routes) <= inst.vehicle_count


def test_scale_guard(paper):
    with pytest.raises(ScaleGuardError):
        exact_semantic_solve(paper, max_nodes=5)
    with pytest.raises(ScaleGuardError):
        brute_force_milp(build_model(paper, "original"))


@pytest.mark.parametrize("variant", list(Variant))
def test_lifted_plan_is_clean(paper, variant):
    asg = plan_to_assignment(paper, exact_semantic_solve(paper), variant)
    assert evaluate(build_model(paper, variant), asg) == []
    assert semantic_validate(paper, asg).violations == ()


@pytest.mark.parametrize("variant,expected", [("original", 8), ("fix1", 8), ("fix12", 19),
                                              ("fix123", 19), ("strengthened", 19)])
def test_brute_force_on_gap_instance(variant, expected):
    res = brute_force_milp(build_model(gap_instance(), variant))
    assert (res.status, res.objective) == ("optimal", expected)
    assert evaluate(build_model(gap_instance(), variant), res.assignment) == []


def test_gap_instance_optimum_is_a_butterfly():
    inst = gap_instance()
    res = brute_force_milp(build_model(inst, "original"))
    report = semantic_validate(inst, res.assignment)
    assert "MultipleDepotDepartures" in report.kinds()
    assert exact_semantic_solve(inst).total_distance == 19


def test_brute_force_reports_infeasible():
    inst = gap_instance()
    # no vehicle may visit HCF 1
    m = build_model(inst, "original").with_bounds({Y(1, 1): (0, 0)})
    res = brute_force_milp(m)
    assert res.status == "infeasible" and res.objective is None


@pytest.mark.parametrize("seed", range(8))
def test_original_is_a_relaxation_of_strengthened(seed):
    rng = random.Random(seed)
    inst = random_instance(rng, rng.randint(2, 3), K=1, P=1, Q=10, qmax=4, dmax=9)
    orig = brute_force_milp(build_model(inst, "original"))
    strong = brute_force_milp(build_model(inst, "strengthened"))
    semantic = exact_semantic_solve(inst).total_distance
    assert orig.objective <= strong.objective == semantic


def test_gated_bounds_cut_every_valid_routing():
    # each vehicle's ordering row against the other vehicle's HCF, whose load is
    # pinned to 0, caps its own load below its demand
    inst = WasteInstance.from_rows([5], [[5], [1]], [[0, 1, 1], [1, 0, 1], [1, 1, 0]], vehicle_count=2)
    assert exact_semantic_solve(inst).total_distance == 4
    assert brute_force_milp(build_model(inst, "original")).objective == 4
    assert brute_force_milp(build_model(inst, "strengthened")).objective == 4
    for variant in ("fix1", "fix12", "fix123"):
        assert brute_force_milp(build_model(inst, variant)).status == "infeasible"
