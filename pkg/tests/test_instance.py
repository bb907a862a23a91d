import json
import warnings

import pytest

from mcvrp.instance import (FleetCapacityWarning, InstanceError, WasteInstance, fleet_capacity_warnings,
                            instance_problems, load_instance, parse_instance, serialize_instance,
                            total_demand)


def small(**kw):
    args = dict(capacity=[5, 5], demand_rows=[[1, 2], [3, 0]],
                distance=[[0, 1, 2], [1, 0, 3], [2, 3, 0]], vehicle_count=1)
    args.update(kw)
    return WasteInstance.from_rows(**args)


def test_builtin_shape(paper):
    assert (paper.hcf_count, paper.vehicle_count, paper.compartment_count) == (10, 2, 3)
    assert list(paper.nodes) == list(range(11))
    assert list(paper.vehicles) == [1, 2]
    assert paper.cap(1) == paper.cap(3) == 500


def test_builtin_demand_column_sums(paper):
    assert [total_demand(paper, p) for p in paper.compartments] == [53, 48, 45]


@pytest.mark.parametrize("i,p,q", [(1, 1, 7), (8, 3, 8), (9, 1, 0), (9, 2, 4), (10, 3, 2), (0, 2, 0)])
def test_builtin_demand_lookup(paper, i, p, q):
    assert paper.q(i, p) == q


@pytest.mark.parametrize("i,j,d", [(0, 1, 10), (1, 0, 11), (2, 1, 1), (8, 0, 12), (10, 9, 18)])
def test_builtin_distance_is_asymmetric_as_given(paper, i, j, d):
    assert paper.d(i, j) == d


def test_depot_row_is_zero(paper):
    assert all(paper.q(0, p) == 0 for p in paper.compartments)


def test_total_demand_out_of_range(paper):
    with pytest.raises(IndexError):
        total_demand(paper, 4)


@pytest.mark.parametrize("kw,fragment", [
    (dict(capacity=[5, 0]), "must be positive"),
    (dict(demand_rows=[[1, 2], [3, -1]]), "negative"),
    (dict(demand_rows=[[1, 9], [3, 0]]), "exceeds capacity"),
    (dict(distance=[[0, 1, 2], [1, 0, 3], [2, 3, 1]]), "must be 0"),
    (dict(distance=[[0, 1], [1, 0]]), "3x3"),
])
def test_invalid_instances_are_rejected(kw, fragment):
    with pytest.raises(InstanceError) as exc:
        small(**kw)
    assert any(fragment in p for p in exc.value.problems)


def test_valid_instance_has_no_problems(paper):
    assert instance_problems(paper) == []


def test_fleet_capacity_warning():
    inst = small(capacity=[3, 5], demand_rows=[[3, 2], [3, 0]])
    warns = fleet_capacity_warnings(inst)
    assert len(warns) == 1 and "compartment 1" in warns[0]
    with pytest.warns(FleetCapacityWarning):
        parse_instance(serialize_instance(inst))


def test_round_trip(paper, tmp_path):
    path = tmp_path / "paper.json"
    path.write_text(serialize_instance(paper))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        again = load_instance(path)
    assert again == paper
    assert again.digest() == paper.digest()


def test_schema_rejects_unknown_field(paper):
    doc = json.loads(serialize_instance(paper))
    doc["colour"] = "red"
    with pytest.raises(InstanceError, match="schema"):
        parse_instance(json.dumps(doc))


def test_row_count_mismatch(paper):
    doc = json.loads(serialize_instance(paper))
    doc["demand"].pop()
    with pytest.raises(InstanceError, match="rows"):
        parse_instance(json.dumps(doc))


def test_not_json():
    with pytest.raises(InstanceError, match="JSON"):
        parse_instance("{oops")
