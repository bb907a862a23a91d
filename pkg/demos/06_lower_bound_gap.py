"""On a 3-HCF instance the original model's optimum is a set of depot loops that
no single vehicle can drive; the true optimum is longer."""

import mcvrp.certify as C
from mcvrp import WasteInstance, brute_force_milp, build_model, semantic_validate

inst = WasteInstance.from_rows(
    capacity=[10], demand_rows=[[2], [3], [4]],
    distance=[[0, 1, 2, 1], [2, 0, 9, 9], [1, 9, 0, 8], [1, 8, 9, 0]], vehicle_count=1)

res = brute_force_milp(build_model(inst, "original"))
print("model optimum", res.objective, "after", res.nodes, "search nodes")
for veh in semantic_validate(inst, res.assignment).vehicles:
    print("  loops", [list(l) for l in veh.loops])
cert = C.certify_lower_bound_gap(inst)
print("routing optimum", cert.evidence["semantic_optimum"]["total_distance"], "gap", cert.evidence["gap"])
