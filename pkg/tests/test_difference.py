import itertools
import random

import pytest

from mcvrp.difference import DiffConstraint, NegativeCycle, ranges, solve


def brute(nodes, cons, lo=-6, hi=6):
    """All integer solutions with the origin (first node) fixed at 0."""
    free = nodes[1:]
    sols = []
    for vals in itertools.product(range(lo, hi + 1), repeat=len(free)):
        x = {nodes[0]: 0, **dict(zip(free, vals))}
        if all(x[c.a] - x[c.b] <= c.bound for c in cons):
            sols.append(x)
    return sols


def boxed_system(rng, n):
    nodes = list(range(n + 1))
    cons = []
    for i in nodes[1:]:
        cons.append(DiffConstraint(i, 0, 4))      # x_i <= 4
        cons.append(DiffConstraint(0, i, 4))      # x_i >= -4
    for _ in range(rng.randint(1, 2 * n)):
        a, b = rng.sample(nodes, 2)
        cons.append(DiffConstraint(a, b, rng.randint(-4, 4)))
    return nodes, cons


def test_simple_chain():
    cons = [DiffConstraint(1, 0, 5), DiffConstraint(2, 1, -2), DiffConstraint(0, 2, 0)]
    sol = solve([1, 2], cons, origin=0)
    assert sol == {0: 0, 1: 5, 2: 3}


def test_negative_cycle_sums_to_contradiction():
    cons = [DiffConstraint(1, 2, -1), DiffConstraint(2, 1, 0), DiffConstraint(1, 0, 3)]
    res = solve([1, 2], cons, origin=0)
    assert isinstance(res, NegativeCycle)
    assert res.weight < 0
    assert set(res.nodes) == {1, 2}


@pytest.mark.parametrize("seed", range(60))
def test_solve_and_ranges_match_enumeration(seed):
    rng = random.Random(seed)
    nodes, cons = boxed_system(rng, rng.randint(1, 3))
    sols = brute(nodes, cons, -4, 4)
    res = solve(nodes[1:], cons, origin=0)
    rng_res = ranges(nodes[1:], cons, origin=0)
    if not sols:
        assert isinstance(res, NegativeCycle) and res.weight < 0
        assert isinstance(rng_res, NegativeCycle)
        return
    assert all(res[c.a] - res[c.b] <= c.bound for c in cons)
    for i in nodes[1:]:
        vals = [s[i] for s in sols]
        assert rng_res[i] == (min(vals), max(vals))
        assert res[i] == max(vals)      # the witness is pointwise largest


def test_unreachable_cycle_is_detected():
    # nodes 1, 2 are not linked to the origin at all
    cons = [DiffConstraint(1, 2, -1), DiffConstraint(2, 1, -1)]
    assert isinstance(ranges([1, 2], cons, origin=0), NegativeCycle)
    assert isinstance(solve([1, 2], cons, origin=0), NegativeCycle)
