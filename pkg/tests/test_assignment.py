import random
from collections import Counter

import numpy as np
import pytest

from conftest import grid_block, loops_assignment, random_instance, random_structure
from mcvrp.assignment import (AssignmentError, ModelAssignment, check_domain, evaluate, objective_value,
                              u_feasibility, u_ranges)
from mcvrp.formulation import U, X, build_model


# --- replication on the reported solution ---------------------------------

def test_reported_solution_satisfies_original(paper, paper_asg):
    assert evaluate(build_model(paper, "original"), paper_asg) == []


def test_reported_solution_under_fixes(paper, paper_asg):
    fix1 = evaluate(build_model(paper, "fix1"), paper_asg)
    assert Counter(v.family for v in fix1) == {"F1": 29}
    # every violated gated bound is an upper bound at an HCF the vehicle does not visit:
    # nine HCFs on vehicle 1 (u[9,1,1] is unlisted) and HCF 4 on vehicle 2
    assert all(v.label.endswith("b=hi]") for v in fix1)
    assert Counter(v.label.split(",")[1] for v in fix1) == {"k=1": 26, "k=2": 3}
    fix12 = evaluate(build_model(paper, "fix12"), paper_asg)
    assert Counter(v.family for v in fix12) == {"F1": 29, "F2": 1}


def test_reported_objective(paper, paper_asg):
    # 0-4-0 is 10 + 18, loop 0-3-7-0 is 11 + 15 + 17, the long loop 84
    assert objective_value(paper, paper_asg) == 28 + 43 + 74


def test_single_violation_is_reported(paper, paper_asg):
    bad = paper_asg.replace({U(5, 2, 1): 0})
    viol = evaluate(build_model(paper, "original"), bad)
    assert [v.family for v in viol] == ["C5", "C5b"]
    assert viol[1].label == "C5b[i=5,k=2,p=1]" and (viol[1].lhs, viol[1].rhs) == (0, 6)


def test_domain_errors(paper, paper_asg):
    m = build_model(paper, "original")
    with pytest.raises(AssignmentError, match="not declared"):
        check_domain(m, paper_asg.replace({X(3, 3, 1): 1}))
    with pytest.raises(AssignmentError, match="outside domain"):
        check_domain(m, paper_asg.replace({U(1, 1, 1): 501}))
    with pytest.raises(AssignmentError, match="outside domain"):
        check_domain(m, paper_asg.replace({X(0, 1, 1): 2}))
    with pytest.raises(AssignmentError, match="complete assignment"):
        check_domain(m, ModelAssignment(paper_asg.values, partial=False))


def test_json_round_trip(paper_asg):
    again = ModelAssignment.from_json(paper_asg.to_json())
    assert again.nonzero() == paper_asg.nonzero()
    assert '"x[0,4,1]": 1' in paper_asg.to_json()


@pytest.mark.parametrize("text", ['[1, 2]', '{"x[0,1,1]": 1.5}', '{"w[1]": 1}', '{"x[0,1,1]": true}'])
def test_bad_assignment_documents(text):
    with pytest.raises(AssignmentError):
        ModelAssignment.from_json(text)


# --- u feasibility against an exhaustive grid ------------------------------

@pytest.mark.parametrize("seed", range(40))
@pytest.mark.parametrize("variant", ["original", "fix1", "strengthened"])
def test_u_feasibility_matches_grid(seed, variant):
    rng = random.Random(seed)
    inst = random_instance(rng, rng.randint(1, 4), K=2, P=1, Q=rng.randint(1, 5))
    asg = random_structure(rng, inst)
    uf = u_feasibility(inst, asg, variant)
    rg = u_ranges(inst, asg, variant)
    for k in inst.vehicles:
        u, ok = grid_block(inst, asg, variant, k, 1)
        assert uf.blocks[k, 1].feasible == bool(ok.any())
        if ok.any():
            for i in inst.hcfs:
                assert rg[U(i, k, 1)] == (int(u[i][ok].min()), int(u[i][ok].max()))
            w = uf.blocks[k, 1].u
            hit = np.ones_like(ok)
            for i in inst.hcfs:
                hit &= u[i] == w[i]
            assert (hit & ok).any()
        else:
            assert (k, 1) in rg
            assert rg[k, 1].weight < 0


def test_depot_free_cycle_has_no_loads(paper):
    asg = loops_assignment(paper, {}, cycles_by_vehicle={1: [(2, 3)]})
    uf = u_feasibility(paper, asg, "fix1")
    assert not uf.feasible
    cyc = uf.certificates()[1, 1]
    # summing the cycle constraints gives 0 <= negative
    assert cyc.weight < 0
    assert {c.label.split("[")[0] for c in cyc.constraints} == {"C5"}


def test_zero_demand_cycle_is_feasible():
    from mcvrp.instance import WasteInstance
    inst = WasteInstance.from_rows([4], [[0], [0]], [[0, 1, 1], [1, 0, 1], [1, 1, 0]], vehicle_count=1)
    asg = loops_assignment(inst, {}, cycles_by_vehicle={1: [(1, 2)]})
    assert u_feasibility(inst, asg, "fix1").feasible


def test_witness_is_pointwise_largest(paper, paper_asg):
    w = u_feasibility(paper, paper_asg, "original").witness()
    rg = u_ranges(paper, paper_asg, "original")
    assert all(w[r] == rg[r][1] for r in w)
    # the last HCF before the depot can carry up to capacity
    assert w[U(8, 2, 1)] == 500
