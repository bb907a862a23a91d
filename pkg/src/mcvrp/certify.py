"""Replayable certificates for the documented formulation flaws.

Each certificate embeds the instance, the exact inputs (assignments and
parameters) and the evidence produced from them, so that
:func:`replay` can recompute it from the certificate alone and compare.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .assignment import ModelAssignment, evaluate, objective_value, u_feasibility, u_ranges
from .formulation import U, VariableRef, Variant, X, Y, Z, build_model
from .instance import WasteInstance, paper_instance
from .oracle import (MAX_HCFS, InfeasibleError, ScaleGuardError, brute_force_milp,
                     exact_semantic_solve)
from .paper import paper_reported_assignment
from .routes import cumulative_loads, semantic_validate
from .subtour import cut_lhs, enumerate_subtour_cuts, make_subtour_cut, separate_subtour

ISSUES = ("Issue1", "Issue2", "Issue3", "Issue3Prime", "Issue4", "LowerBoundGap", "Fix3Effectiveness")
ISSUE_ALIASES = {"1": "Issue1", "2": "Issue2", "3": "Issue3", "3p": "Issue3Prime", "4": "Issue4",
                 "gap": "LowerBoundGap", "fix3": "Fix3Effectiveness"}
REPRODUCED, NOT_REPRODUCED = "reproduced", "not-reproduced"
FIX3_MAX_HCFS = 11


@dataclass(frozen=True)
class FlawCertificate:
    issue: str
    variant: str
    instance_digest: str
    instance: dict
    inputs: dict
    evidence: dict
    verdict: str

    def to_dict(self) -> dict:
        return {"issue": self.issue, "variant": self.variant, "instance_digest": self.instance_digest,
                "instance": self.instance, "inputs": self.inputs, "evidence": self.evidence,
                "verdict": self.verdict}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "FlawCertificate":
        doc = json.loads(text)
        return cls(**{k: doc[k] for k in ("issue", "variant", "instance_digest", "instance",
                                          "inputs", "evidence", "verdict")})


def _cert(issue, variant, inst, inputs, evidence, ok) -> FlawCertificate:
    return FlawCertificate(issue, Variant.coerce(variant).value, inst.digest(), inst.to_dict(),
                           inputs, evidence, REPRODUCED if ok else NOT_REPRODUCED)


def _is_paper(inst: WasteInstance) -> bool:
    return inst.digest() == paper_instance().digest()


def _routing(asg: ModelAssignment) -> ModelAssignment:
    """Only the x and y part of an assignment."""
    return ModelAssignment({r: v for r, v in asg.values.items() if r.kind in "xy" and v}, True)


def _with_z(inst, asg):
    vals = dict(asg.values)
    for k in inst.vehicles:
        for i in inst.hcfs:
            if asg[Y(i, k)]:
                for p in inst.compartments:
                    vals[Z(i, k, p)] = 1
    return ModelAssignment(vals, True)


def _with_u(inst, asg, variant):
    uf = u_feasibility(inst, asg, variant)
    if not uf.feasible:
        return None
    return asg.replace(uf.witness())


def _loops_assignment(inst, loops_by_vehicle, depot_flags=None):
    vals = {}
    for k, loops in loops_by_vehicle.items():
        for loop in loops:
            seq = [0, *loop, 0]
            for a, b in zip(seq, seq[1:]):
                vals[X(a, b, k)] = 1
            for i in loop:
                vals[Y(i, k)] = 1
    for k, flag in (depot_flags or {}).items():
        vals[Y(0, k)] = flag
    return _with_z(inst, ModelAssignment(vals, True))


def _all_feasible(ranges) -> bool:
    """No (k, p) block of a :func:`u_ranges` result is infeasible."""
    return all(isinstance(key, VariableRef) for key in ranges)


def _violations(inst, asg, variant):
    return [v.to_dict() for v in evaluate(build_model(inst, variant), asg)]


# --- Issue 1 ----------------------------------------------------------------

def star_routing(inst: WasteInstance) -> ModelAssignment:
    """Vehicle 1 serves every HCF by its own depot loop; others stay idle."""
    return _loops_assignment(inst, {1: [(i,) for i in inst.hcfs]})


def certify_issue1(inst: WasteInstance, asg: ModelAssignment | None = None) -> FlawCertificate:
    """Unvisited (i, k) keep a positive u lower bound in the original model,
    while the gated bounds pin them to 0."""
    if asg is None:
        asg, source = (paper_reported_assignment(), "paper-reported") if _is_paper(inst) else \
            (star_routing(inst), "star-routing")
    else:
        source = "caller"
    return _issue1(inst, _routing(asg), source)


def _issue1(inst, routing, source):
    unvisited = [(i, k) for k in inst.vehicles for i in inst.hcfs if not routing[Y(i, k)]]
    targets = [(i, k, p) for i, k in unvisited for p in inst.compartments if inst.q(i, p) > 0]
    orig = u_ranges(inst, routing, "original")
    fix1 = u_ranges(inst, routing, "fix1")
    orig_ok, fix1_ok = _all_feasible(orig), _all_feasible(fix1)
    forced_positive = orig_ok and all(orig[U(i, k, p)][0] >= inst.q(i, p) > 0 for i, k, p in targets)
    pinned_zero = fix1_ok and all(fix1[U(i, k, p)] == (0, 0) for i, k in unvisited for p in inst.compartments)
    witness = u_feasibility(inst, routing, "original")
    evidence = {
        "unvisited": [list(t) for t in unvisited],
        "targets": [list(t) for t in targets],
        "original_feasible": orig_ok,
        "fix1_feasible": fix1_ok,
        "original_ranges": {str(U(i, k, p)): list(orig[U(i, k, p)]) for i, k, p in targets} if orig_ok else {},
        "fix1_ranges": ({str(U(i, k, p)): list(fix1[U(i, k, p)]) for i, k in unvisited for p in inst.compartments}
                        if fix1_ok else {}),
        "original_witness": ({str(r): v for r, v in sorted(witness.witness().items()) if r.idx[0:2] in
                              {(i, k) for i, k in unvisited}} if witness.feasible else {}),
    }
    ok = bool(targets) and forced_positive and pinned_zero
    return _cert("Issue1", "original", inst, {"source": source, "assignment": routing.to_dict()}, evidence, ok)


# --- Issue 2 and 3 ---------------------------------------------------------

def _cheapest_insertion(inst, loop, node):
    best = None
    for pos in range(len(loop) + 1):
        seq = [0, *loop[:pos], node, *loop[pos:], 0]
        cost = sum(inst.d(a, b) for a, b in zip(seq, seq[1:]))
        if best is None or cost < best[0]:
            best = (cost, tuple(seq[1:-1]))
    return best


def paper_fix1_shape(inst: WasteInstance | None = None) -> ModelAssignment:
    """Truck 1 runs the three reported depot loops (six depot arcs); truck 0
    is idle and only truck 1 holds the depot indicator."""
    inst = inst or paper_instance()
    loops = [(3, 7), (4,), (5, 9, 2, 1, 10, 6, 8)]
    routing = _loops_assignment(inst, {2: loops}, {2: 1})
    return _with_u(inst, routing, "fix1")


def paper_fix12_shape(inst: WasteInstance | None = None) -> ModelAssignment:
    """Both depot indicators set, truck 0 otherwise empty, truck 1 a two-loop
    butterfly with HCF 4 inserted where it adds the least distance.

    This is a constructed stand-in for the post-depot-count-fix structure.
    """
    inst = inst or paper_instance()
    loops = [(3, 7), (5, 9, 2, 1, 10, 6, 8)]
    best = None
    for pos, loop in enumerate(loops):
        seq = [0, *loop, 0]
        base = sum(inst.d(a, b) for a, b in zip(seq, seq[1:]))
        cost, merged = _cheapest_insertion(inst, loop, 4)
        if best is None or cost - base < best[0]:
            best = (cost - base, pos, merged)
    loops[best[1]] = best[2]
    routing = _loops_assignment(inst, {2: loops}, {1: 1, 2: 1})
    return _with_u(inst, routing, "fix12")


def generic_fix1_shape(inst: WasteInstance) -> ModelAssignment | None:
    routing = _loops_assignment(inst, {1: [(i,) for i in inst.hcfs]}, {1: 1})
    return _with_u(inst, routing, "fix1")


def generic_fix12_shape(inst: WasteInstance) -> ModelAssignment | None:
    if inst.vehicle_count < 2 or inst.hcf_count < 2:
        return None
    hcfs = list(inst.hcfs)
    half = len(hcfs) // 2
    routing = _loops_assignment(inst, {2: [tuple(hcfs[:half]), tuple(hcfs[half:])]}, {1: 1, 2: 1})
    return _with_u(inst, routing, "fix12")


def _depot_incidence(inst, asg):
    return sum(asg[X(0, j, k)] + asg[X(j, 0, k)] for k in inst.vehicles for j in inst.hcfs)


def _issue3_evidence(inst, asg):
    if asg is None:
        return {"available": False}, False
    report = semantic_validate(inst, asg)
    fix12 = _violations(inst, asg, "fix12")
    f2_lhs = sum(asg[Y(0, k)] for k in inst.vehicles)
    departures = sum(asg[X(0, j, k)] for k in inst.vehicles for j in inst.hcfs)
    evidence = {
        "available": True,
        "assignment": asg.to_dict(),
        "depot_indicator_sum": f2_lhs,
        "depot_departures": departures,
        "fix12_violations": fix12,
        "semantic_violations": [v.to_dict() for v in report.violations],
        "objective": objective_value(inst, asg),
    }
    return evidence, not fix12 and bool(report.violations)


def certify_issue2(inst: WasteInstance, asg: ModelAssignment | None = None,
                   residual: ModelAssignment | None = None) -> FlawCertificate:
    if asg is None:
        asg, source = (paper_fix1_shape(inst), "paper-fix1-shape") if _is_paper(inst) else \
            (generic_fix1_shape(inst), "depot-loop-shape")
    else:
        source = "caller"
    if residual is None:
        residual = paper_fix12_shape(inst) if _is_paper(inst) else generic_fix12_shape(inst)
    return _issue2(inst, asg, residual, source)


def _issue2(inst, asg, residual, source):
    inputs = {"source": source, "assignment": asg.to_dict() if asg else None,
              "residual": residual.to_dict() if residual else None}
    if asg is None:
        return _cert("Issue2", "fix1", inst, inputs, {"available": False}, False)
    y0 = sum(asg[Y(0, k)] for k in inst.vehicles)
    incidence = _depot_incidence(inst, asg)
    orig = _violations(inst, asg, "original")
    fix1 = _violations(inst, asg, "fix1")
    fix12 = _violations(inst, asg, "fix12")
    res_ev, res_ok = _issue3_evidence(inst, residual)
    evidence = {
        "depot_indicator_sum": y0,
        "depot_incident_arcs": incidence,
        "original_violations": orig,
        "fix1_violations": fix1,
        "fix12_violations": fix12,
        "f2_violated": any(v["family"] == "F2" for v in fix12),
        "residual": res_ev,
        "residual_flaw": res_ok,
    }
    # the shape need not satisfy the original model: unvisited u are 0 here
    ok = incidence > 2 * y0 and not fix1 and evidence["f2_violated"]
    return _cert("Issue2", "fix1", inst, inputs, evidence, ok)


def certify_issue3(inst: WasteInstance, asg: ModelAssignment | None = None) -> FlawCertificate:
    """A solution satisfying the depot-count fix that is still not a set of routes."""
    if asg is None:
        asg, source = (paper_fix12_shape(inst), "paper-fix12-shape") if _is_paper(inst) else \
            (generic_fix12_shape(inst), "butterfly-shape")
    else:
        source = "caller"
    return _issue3(inst, asg, source)


def _issue3(inst, asg, source):
    evidence, ok = _issue3_evidence(inst, asg)
    inputs = {"source": source, "assignment": asg.to_dict() if asg else None}
    return _cert("Issue3", "fix12", inst, inputs, evidence, ok)


# --- Issue 3' (butterfly) ---------------------------------------------------

def butterfly_routing(inst: WasteInstance) -> ModelAssignment | None:
    if inst.hcf_count < 2:
        return None
    hcfs = list(inst.hcfs)
    half = len(hcfs) // 2
    rest = {k: [] for k in inst.vehicles if k != 1}
    return _with_u(inst, _loops_assignment(inst, {1: [tuple(hcfs[:half]), tuple(hcfs[half:])], **rest}),
                   "original")


def certify_butterfly(inst: WasteInstance, asg: ModelAssignment | None = None,
                      variant="original") -> FlawCertificate:
    if asg is None:
        asg, source = (paper_reported_assignment(), "paper-reported") if _is_paper(inst) else \
            (butterfly_routing(inst), "butterfly-shape")
    else:
        source = "caller"
    return _butterfly(inst, asg, source, Variant.coerce(variant).value)


def _butterfly(inst, asg, source, variant):
    inputs = {"source": source, "assignment": asg.to_dict() if asg else None}
    if asg is None:
        return _cert("Issue3Prime", variant, inst, inputs, {"available": False}, False)
    viol = _violations(inst, asg, variant)
    report = semantic_validate(inst, asg)
    flagged = [v.to_dict() for v in report.violations if v.kind == "MultipleDepotDepartures"]
    cuts = {str(k): (c.to_dict() if (c := separate_subtour(inst, asg, k)) else None) for k in inst.vehicles}
    evidence = {
        "model_violations": viol,
        "route_report": report.to_dict(),
        "multiple_depot_departures": flagged,
        "depot_visits": {str(v.vehicle): v.depot_visits for v in report.vehicles},
        "separated_cuts": cuts,
        "objective": objective_value(inst, asg),
    }
    return _cert("Issue3Prime", variant, inst, inputs, evidence, not viol and bool(flagged))


# --- Issue 4 ----------------------------------------------------------------

def loop_loads(inst: WasteInstance, asg: ModelAssignment) -> dict:
    """Load after leaving each visited HCF, restarting from empty on every loop."""
    report = semantic_validate(inst, asg)
    out = {}
    for veh in report.vehicles:
        for loop in veh.loops:
            seq = [n for n in loop if n]
            loads = cumulative_loads(inst, seq)
            for pos, i in enumerate(seq):
                for p in inst.compartments:
                    out[U(i, veh.vehicle, p)] = loads[p - 1][pos]
    return out


def certify_issue4(inst: WasteInstance, asg: ModelAssignment | None = None,
                   variant="original") -> FlawCertificate:
    """For visited HCFs, u is not tied to the carried load: it may exceed it."""
    if asg is None:
        if _is_paper(inst):
            asg, source = paper_reported_assignment(), "paper-reported"
        else:
            from .oracle import plan_to_assignment
            asg = plan_to_assignment(inst, exact_semantic_solve(inst), variant)
            source = "semantic-optimum"
    else:
        source = "caller"
    return _issue4(inst, asg, source, Variant.coerce(variant).value)


def _issue4(inst, asg, source, variant):
    loads = loop_loads(inst, asg)
    ranges = u_ranges(inst, _routing(asg), variant)
    feasible = _all_feasible(ranges)
    loose, mismatched = [], []
    for ref, load in sorted(loads.items()):
        if feasible:
            lo, hi = ranges[ref]
            if hi > load:
                loose.append({"u": str(ref), "load": load, "lo": lo, "hi": hi})
        if ref in asg.values and asg[ref] != load:
            mismatched.append({"u": str(ref), "load": load, "assigned": asg[ref]})
    evidence = {
        "routing_feasible": feasible,
        "loop_loads": {str(r): v for r, v in sorted(loads.items())},
        "u_can_exceed_load": loose,
        "assigned_u_differs_from_load": mismatched,
        "max_assigned_u_below_capacity": max(
            (v for r, v in asg.values.items() if r.kind == "u" and r in loads and v < inst.cap(r.idx[2])),
            default=0),
    }
    inputs = {"source": source, "assignment": asg.to_dict()}
    return _cert("Issue4", variant, inst, inputs, evidence, feasible and bool(loose))


# --- Fix 3' effectiveness ---------------------------------------------------

def _enumerate_cut_outcome(inst, asg, reading):
    members, violated = 0, []
    for S, k, i in enumerate_subtour_cuts(inst, reading=reading):
        members += 1
        if not asg[Y(i, k)]:
            continue
        con = make_subtour_cut(inst, S, k, i, reading)
        lhs = cut_lhs(con, asg)
        if lhs < con.rhs:
            violated.append(con.label)
    return members, violated


def certify_fix3_effectiveness(inst: WasteInstance, asg: ModelAssignment | None = None,
                               reading: str = "depot_side", max_nodes: int = FIX3_MAX_HCFS) -> FlawCertificate:
    """Enumerate every cut (S, k, i) and record whether any is violated.

    Verdict ``reproduced`` means no member cuts the assignment.
    """
    if inst.hcf_count > max_nodes:
        raise ScaleGuardError(f"{inst.hcf_count} HCFs exceed the enumeration guard of {max_nodes}")
    if asg is None:
        asg, source = (paper_reported_assignment(), "paper-reported") if _is_paper(inst) else \
            (butterfly_routing(inst), "butterfly-shape")
    else:
        source = "caller"
    return _fix3(inst, asg, source, reading)


def _fix3(inst, asg, source, reading):
    inputs = {"source": source, "assignment": asg.to_dict() if asg else None, "reading": reading}
    if asg is None:
        return _cert("Fix3Effectiveness", "fix123", inst, inputs, {"available": False}, False)
    members, violated = _enumerate_cut_outcome(inst, asg, reading)
    report = semantic_validate(inst, asg)
    evidence = {
        "reading": reading,
        "members_enumerated": members,
        "violated_count": len(violated),
        "violated_examples": violated[:20],
        "separator": {str(k): (c.to_dict() if (c := separate_subtour(inst, asg, k, reading)) else None)
                      for k in inst.vehicles},
        "semantic_violations": [v.kind for v in report.violations],
    }
    return _cert("Fix3Effectiveness", "fix123", inst, inputs, evidence, not violated)


# --- lower-bound gap --------------------------------------------------------

def certify_lower_bound_gap(inst: WasteInstance, external_objective: int | None = None,
                            node_limit: int = 200_000, max_nodes: int = MAX_HCFS) -> FlawCertificate:
    """Compare the original model's optimum with the true routing optimum.

    Small instances are solved in-repo; larger ones need the original
    model's optimum from an external solver run on the exported file.
    """
    return _gap(inst, external_objective, node_limit, max_nodes)


def _gap(inst, external_objective, node_limit, max_nodes):
    plan = exact_semantic_solve(inst, max_nodes=max_nodes)
    inputs = {"external_objective": external_objective, "node_limit": node_limit, "max_nodes": max_nodes}
    if external_objective is None:
        try:
            res = brute_force_milp(build_model(inst, "original"), node_limit=node_limit)
        except ScaleGuardError as exc:
            raise ValueError(f"model too large for brute force ({exc}); "
                             f"supply the original model's optimum from an external solver") from None
        if res.status != "optimal":
            raise InfeasibleError("original model is infeasible")
        model_obj, source = res.objective, "brute-force"
        model_asg = res.assignment.nonzero()
        model_report = semantic_validate(inst, res.assignment).to_dict()
    else:
        model_obj, source, model_asg, model_report = int(external_objective), "external", None, None
    gap = plan.total_distance - model_obj
    evidence = {
        "model_objective": model_obj,
        "model_objective_source": source,
        "model_optimum": {str(r): v for r, v in model_asg.items()} if model_asg else None,
        "model_optimum_routes": model_report,
        "semantic_optimum": plan.to_dict(),
        "gap": gap,
    }
    return _cert("LowerBoundGap", "original", inst, inputs, evidence, gap > 0)


# --- dispatch and replay ----------------------------------------------------

def certify(inst: WasteInstance, issue: str, asg: ModelAssignment | None = None, **kw) -> FlawCertificate:
    issue = ISSUE_ALIASES.get(issue, issue)
    if issue == "Issue1":
        return certify_issue1(inst, asg)
    if issue == "Issue2":
        return certify_issue2(inst, asg)
    if issue == "Issue3":
        return certify_issue3(inst, asg)
    if issue == "Issue3Prime":
        return certify_butterfly(inst, asg, kw.get("variant", "original"))
    if issue == "Issue4":
        return certify_issue4(inst, asg, kw.get("variant", "original"))
    if issue == "Fix3Effectiveness":
        return certify_fix3_effectiveness(inst, asg, kw.get("reading", "depot_side"),
                                          kw.get("max_nodes") or FIX3_MAX_HCFS)
    if issue == "LowerBoundGap":
        return certify_lower_bound_gap(inst, kw.get("external_objective"),
                                       max_nodes=kw.get("max_nodes") or MAX_HCFS)
    raise ValueError(f"unknown issue {issue!r}; expected one of {sorted(ISSUE_ALIASES)}")


def _asg(doc):
    return ModelAssignment.from_dict(doc) if doc is not None else None


def recompute(cert: FlawCertificate) -> FlawCertificate:
    """Re-derive a certificate from its embedded instance and inputs."""
    inst = WasteInstance.from_rows(
        capacity=cert.instance["capacity"], demand_rows=cert.instance["demand"],
        distance=cert.instance["distance"], vehicle_count=cert.instance["vehicle_count"],
        name=cert.instance.get("name", ""), penalty=cert.instance.get("penalty"))
    if inst.digest() != cert.instance_digest:
        raise ValueError("embedded instance does not match its digest")
    inp = cert.inputs
    if cert.issue == "Issue1":
        return _issue1(inst, _asg(inp["assignment"]), inp["source"])
    if cert.issue == "Issue2":
        return _issue2(inst, _asg(inp["assignment"]), _asg(inp["residual"]), inp["source"])
    if cert.issue == "Issue3":
        return _issue3(inst, _asg(inp["assignment"]), inp["source"])
    if cert.issue == "Issue3Prime":
        return _butterfly(inst, _asg(inp["assignment"]), inp["source"], cert.variant)
    if cert.issue == "Issue4":
        return _issue4(inst, _asg(inp["assignment"]), inp["source"], cert.variant)
    if cert.issue == "Fix3Effectiveness":
        return _fix3(inst, _asg(inp["assignment"]), inp["source"], inp["reading"])
    if cert.issue == "LowerBoundGap":
        return _gap(inst, inp["external_objective"], inp["node_limit"], inp["max_nodes"])
    raise ValueError(f"unknown issue {cert.issue!r}")


def replay(cert: FlawCertificate) -> tuple[bool, FlawCertificate]:
    """True when recomputation gives a byte-identical certificate."""
    again = recompute(cert)
    return again.to_json() == cert.to_json(), again
