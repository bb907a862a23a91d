"""Evaluate the reported solution of the 10-HCF instance against the model
and against what a vehicle can actually drive."""

from mcvrp import build_model, evaluate, paper_instance, paper_reported_assignment, semantic_validate
from mcvrp.assignment import objective_value

inst = paper_instance()
asg = paper_reported_assignment()

for variant in ("original", "fix1", "fix12"):
    viol = evaluate(build_model(inst, variant), asg)
    fams = sorted({v.family for v in viol})
    print(f"{variant:8s}: {len(viol):2d} violated constraints {fams}")

report = semantic_validate(inst, asg)
for veh in report.vehicles:
    print(f"vehicle {veh.vehicle}: loops {[list(l) for l in veh.loops]}, depot visits {veh.depot_visits}")
for v in report.violations:
    print(f"semantic: {v.kind} on vehicle {v.vehicle}: {v.detail}")
print("objective", objective_value(inst, asg))
