"""The reported vehicle 2 leaves the depot twice.  No subtour cut, under the
reading that keeps true routes feasible, separates it; the reading that
follows the printed index set cuts it, but also cuts the optimal route."""

import mcvrp.certify as C
from mcvrp import exact_semantic_solve, paper_instance, plan_to_assignment, separate_subtour

inst = paper_instance()
bf = C.certify_butterfly(inst)
print("butterfly:", bf.verdict, "depot visits", bf.evidence["depot_visits"])

for reading in ("depot_side", "as_printed"):
    cert = C.certify_fix3_effectiveness(inst, reading=reading)
    ev = cert.evidence
    print(f"{reading:10s}: {ev['members_enumerated']} cuts enumerated, {ev['violated_count']} violated")

best = plan_to_assignment(inst, exact_semantic_solve(inst), "fix123")
cut = separate_subtour(inst, best, 1, "as_printed")
print("optimal single route cut by the printed reading:", cut.constraint.label if cut else None)
