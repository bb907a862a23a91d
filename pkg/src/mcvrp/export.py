"""LP and fixed-column MPS writers.

Both writers are deterministic: variables appear in declaration order and
constraints in catalog order, so exporting the same model twice yields
byte-identical text.
"""

from __future__ import annotations

import re

from .formulation import MilpModel, VariableRef

_TERMS_PER_LINE = 8


def lp_name(ref: VariableRef) -> str:
    return ref.kind + "_" + "_".join(map(str, ref.idx))


def lp_row_name(lab: str) -> str:
    # C5[i=1,j=2,k=1,p=1] -> C5_i1_j2_k1_p1
    return re.sub(r"[\[,]", "_", lab).replace("=", "").replace("]", "")


def _expr(terms, names) -> list[str]:
    parts = []
    for pos, (c, ref) in enumerate(terms):
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        body = names[ref] if mag == 1 else f"{mag} {names[ref]}"
        if pos == 0:
            parts.append(body if sign == "+" else f"- {body}")
        else:
            parts.append(f"{sign} {body}")
    return parts


def _wrapped(head: str, parts: list[str], tail: str = "") -> list[str]:
    if not parts:
        parts = ["0"]
    lines = []
    for start in range(0, len(parts), _TERMS_PER_LINE):
        chunk = " ".join(parts[start:start + _TERMS_PER_LINE])
        lines.append((head if start == 0 else "   ") + chunk)
    lines[-1] += tail
    return lines


def export_lp(model: MilpModel) -> str:
    names = {ref: lp_name(ref) for ref in model.variables}
    out = [f"\\ {model.name}: variant={model.variant.value} digest={model.instance.digest()[:16]}",
           "Minimize"]
    out += _wrapped(" obj: ", _expr(model.objective, names))
    out.append("Subject To")
    for con in model.constraints:
        op = {"<=": "<=", ">=": ">=", "=": "="}[con.sense]
        out += _wrapped(f" {lp_row_name(con.label)}: ", _expr(con.terms, names), f" {op} {con.rhs}")
    out.append("Bounds")
    for ref, var in model.variables.items():
        if not var.binary or (var.lb, var.ub) != (0, 1):
            out.append(f" {var.lb} <= {names[ref]} <= {var.ub}")
    generals = [names[r] for r, v in model.variables.items() if v.integer and not v.binary]
    binaries = [names[r] for r, v in model.variables.items() if v.binary]
    out.append("Generals")
    out += [" " + " ".join(generals[s:s + 10]) for s in range(0, len(generals), 10)]
    out.append("Binaries")
    out += [" " + " ".join(binaries[s:s + 10]) for s in range(0, len(binaries), 10)]
    out.append("End")
    return "\n".join(out) + "\n"


def _field(text: str, width: int) -> str:
    if len(text) > width:
        raise ValueError(f"MPS field {text!r} wider than {width} columns")
    return text.ljust(width)


def _entry(col: str, row: str, val: int) -> str:
    # fields 2-4 occupy columns 5-12, 15-22, 25-36
    return "    " + _field(col, 8) + "  " + _field(row, 8) + "  " + str(val).rjust(12)


def export_mps(model: MilpModel) -> str:
    """Fixed-field MPS.  Names are positional (C0000001, R0000001) so that
    every field fits its 8-column slot; a comment header maps them back."""
    cols = {ref: f"C{n:07d}" for n, ref in enumerate(model.variables, start=1)}
    rows = {n: f"R{n:07d}" for n in range(1, len(model.constraints) + 1)}
    entries: dict[VariableRef, list[tuple[str, int]]] = {ref: [] for ref in model.variables}
    for c, ref in model.objective:
        entries[ref].append(("OBJ", c))
    for n, con in enumerate(model.constraints, start=1):
        for c, ref in con.terms:
            entries[ref].append((rows[n], c))

    out = [f"* {model.name}: variant={model.variant.value} digest={model.instance.digest()[:16]}"]
    out += [f"* {cols[ref]} {ref}" for ref in model.variables]
    out += [f"* {rows[n]} {con.label}" for n, con in enumerate(model.constraints, start=1)]
    out.append("NAME          " + model.name.upper()[:8])
    out.append("ROWS")
    out.append(" N  OBJ")
    for n, con in enumerate(model.constraints, start=1):
        out.append(" " + {"<=": "L", ">=": "G", "=": "E"}[con.sense] + "  " + rows[n])
    out.append("COLUMNS")
    in_int = False
    for ref, var in model.variables.items():
        if var.integer and not in_int:
            out.append("    MARKER                 'MARKER'                 'INTORG'")
            in_int = True
        elif not var.integer and in_int:
            out.append("    MARKER                 'MARKER'                 'INTEND'")
            in_int = False
        items = entries[ref] or [("OBJ", 0)]
        out += [_entry(cols[ref], row, val) for row, val in items]
    if in_int:
        out.append("    MARKER                 'MARKER'                 'INTEND'")
    out.append("RHS")
    for n, con in enumerate(model.constraints, start=1):
        if con.rhs != 0:
            out.append(_entry("RHS", rows[n], con.rhs))
    out.append("BOUNDS")
    for ref, var in model.variables.items():
        if var.binary and var.lb == 0 and var.ub == 1:
            out.append(" BV " + _field("BND", 8) + "  " + cols[ref])
            continue
        if var.lb != 0:
            out.append(" LO " + _field("BND", 8) + "  " + _field(cols[ref], 8) + "  " + str(var.lb).rjust(12))
        out.append(" UP " + _field("BND", 8) + "  " + _field(cols[ref], 8) + "  " + str(var.ub).rjust(12))
    out.append("ENDATA")
    return "\n".join(out) + "\n"
