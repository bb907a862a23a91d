"""Load variables bound the carried quantity but do not track it: along the
reported long loop they match the loads except where the model lets them
jump to capacity."""

import mcvrp.certify as C
from mcvrp import paper_instance

for variant in ("original", "strengthened"):
    cert = C.certify_issue4(paper_instance(), variant=variant)
    ev = cert.evidence
    print(f"{variant}: {cert.verdict}; {len(ev['u_can_exceed_load'])} visited u may exceed the load")
print("listed u that differ from the load:")
for row in C.certify_issue4(paper_instance()).evidence["assigned_u_differs_from_load"]:
    print(f"  {row['u']}: load {row['load']}, listed {row['assigned']}")
