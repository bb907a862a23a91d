"""Solve exported models with HiGHS and decode the solutions.

Needs ``pip install highspy``.  The depot-count variant takes under a minute
on a laptop, the others a few seconds.
"""

import sys
import tempfile
from pathlib import Path

import highspy

from mcvrp import (ModelAssignment, VariableRef, build_model, exact_semantic_solve, export_lp,
                   paper_instance, semantic_validate)

variants = sys.argv[1:] or ["original", "strengthened"]
inst = paper_instance()
print("exact routing optimum", exact_semantic_solve(inst).total_distance)

for variant in variants:
    model = build_model(inst, variant)
    path = Path(tempfile.mkdtemp()) / f"{variant}.lp"
    path.write_text(export_lp(model))
    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.readModel(str(path))
    h.run()
    lp, sol = h.getLp(), h.getSolution()
    values = {}
    for name, val in zip(lp.col_names_, sol.col_value):
        kind, *idx = name.split("_")
        if round(val):
            values[VariableRef(kind, tuple(map(int, idx)))] = round(val)
    report = semantic_validate(inst, ModelAssignment(values))
    print(f"{variant}: HiGHS objective {h.getInfo().objective_function_value:g}, "
          f"semantic violations {[v.kind for v in report.violations]}")
