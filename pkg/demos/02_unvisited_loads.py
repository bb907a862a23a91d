"""Without gated bounds, a facility a vehicle never visits still carries a
positive load variable; with them it is pinned to zero."""

import mcvrp.certify as C
from mcvrp import paper_instance

cert = C.certify_issue1(paper_instance())
ev = cert.evidence
print("verdict:", cert.verdict)
print("unvisited (hcf, vehicle):", ev["unvisited"])
for name in ("u[1,1,1]", "u[8,1,3]", "u[4,2,1]"):
    print(f"{name}: original range {ev['original_ranges'][name]}, gated range {ev['fix1_ranges'][name]}")
