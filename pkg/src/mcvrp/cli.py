"""``mcvrp`` command line.

Exit codes: 0 success, 1 domain finding (an invalid instance, model
violations, a violated cut, an infeasible solve, a replay mismatch),
2 usage or I/O error.  Semantic route violations alone exit 0.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import warnings
from pathlib import Path

from .assignment import AssignmentError, ModelAssignment, check_domain, evaluate, objective_value
from .certify import FIX3_MAX_HCFS, ISSUE_ALIASES, FlawCertificate, certify, replay
from .export import export_lp, export_mps
from .formulation import Variant, build_model
from .instance import FleetCapacityWarning, InstanceError, fleet_capacity_warnings, load_instance, paper_instance
from .oracle import MAX_HCFS, InfeasibleError, ScaleGuardError, exact_semantic_solve, plan_to_assignment
from .paper import paper_reported_assignment
from .routes import semantic_validate, to_dot
from .subtour import READINGS, CutError, separate_subtour

OK, FINDING, USAGE = 0, 1, 2
BUILTIN_INSTANCE, BUILTIN_SOLUTION = "@paper", "@paper-solution"


class UsageError(Exception):
    pass


def _instance(ref: str):
    if ref == BUILTIN_INSTANCE:
        return paper_instance()
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", FleetCapacityWarning)
            return load_instance(ref)
    except OSError as exc:
        raise UsageError(f"cannot read instance {ref}: {exc.strerror or exc}") from None


def _assignment(ref: str) -> ModelAssignment:
    if ref == BUILTIN_SOLUTION:
        return paper_reported_assignment()
    try:
        return ModelAssignment.from_json(Path(ref).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read assignment {ref}: {exc.strerror or exc}") from None


def _write(path, text: str):
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror or exc}") from None


def _dump(args, doc):
    if args.json:
        _write(args.json, json.dumps(doc, indent=1, sort_keys=True) + "\n")


def cmd_validate(args) -> int:
    if args.instance == BUILTIN_INSTANCE:
        inst = paper_instance()
    else:
        try:
            inst = _instance(args.instance)
        except InstanceError as exc:
            for p in exc.problems:
                print(f"problem: {p}")
            _dump(args, {"valid": False, "problems": list(exc.problems), "warnings": []})
            return FINDING
    warns = fleet_capacity_warnings(inst)
    for w in warns:
        print(f"warning: {w}")
    print("instance valid")
    _dump(args, {"valid": True, "problems": [], "warnings": warns, "digest": inst.digest()})
    return OK


def cmd_check(args) -> int:
    inst = _instance(args.instance)
    asg = _assignment(args.assignment)
    model = build_model(inst, args.variant)
    defaulted = check_domain(model, asg)
    viol = evaluate(model, asg)
    report = semantic_validate(inst, asg)
    for v in viol:
        print(f"violated: {v}")
    for v in report.violations:
        where = f"vehicle {v.vehicle}" if v.vehicle is not None else "fleet"
        print(f"semantic: {v.kind} ({where}): {v.detail}")
    for veh in report.vehicles:
        print(f"vehicle {veh.vehicle}: depot visits {veh.depot_visits}, loops {[list(l) for l in veh.loops]}")
    kinds = ", ".join(sorted(report.kinds()))
    print(f"{len(viol)} model violations; {len(report.violations)} semantic violations"
          + (f" ({kinds})" if kinds else ""))
    for v in report.violations:
        if v.kind == "MultipleDepotDepartures":
            print(f"vehicle {v.vehicle}: depot visit count {report.vehicle(v.vehicle).depot_visits}")
    print(f"objective {objective_value(inst, asg)}; {len(defaulted)} unlisted variables taken as 0")
    if args.dot:
        _write(args.dot, to_dot(inst, asg))
    _dump(args, {"variant": model.variant.value, "model_violations": [v.to_dict() for v in viol],
                 "routes": report.to_dict(), "objective": objective_value(inst, asg),
                 "defaulted_to_zero": sorted(str(r) for r in defaulted)})
    return FINDING if viol else OK


def cmd_solve(args) -> int:
    inst = _instance(args.instance)
    plan = exact_semantic_solve(inst, max_nodes=args.max_nodes or MAX_HCFS)
    for k, route in enumerate(plan.routes, 1):
        print(f"route {k}: {' -> '.join(map(str, route))}")
    print(f"total distance {plan.total_distance}")
    asg = plan_to_assignment(inst, plan, args.variant)
    if args.output:
        _write(args.output, asg.to_json())
    if args.dot:
        _write(args.dot, to_dot(inst, asg))
    _dump(args, {"plan": plan.to_dict(), "variant": Variant.coerce(args.variant).value,
                 "assignment": asg.to_dict()})
    return OK


def cmd_export(args) -> int:
    inst = _instance(args.instance)
    model = build_model(inst, args.variant)
    text = export_lp(model) if args.format == "lp" else export_mps(model)
    if args.output:
        _write(args.output, text)
        print(f"wrote {args.output}: {len(model.variables)} variables, {len(model.constraints)} constraints")
    else:
        sys.stdout.write(text)
    return OK


def cmd_separate(args) -> int:
    inst = _instance(args.instance)
    asg = _assignment(args.assignment)
    vehicles = [args.vehicle] if args.vehicle else list(inst.vehicles)
    found = {}
    for k in vehicles:
        if k not in inst.vehicles:
            raise UsageError(f"vehicle {k} out of range 1..{inst.vehicle_count}")
        cut = separate_subtour(inst, asg, k, args.reading)
        found[str(k)] = cut.to_dict() if cut else None
        print(f"vehicle {k}: " + (f"violated {cut.constraint.label}, crossing arcs {cut.lhs}"
                                   if cut else "no violated cut"))
    _dump(args, {"reading": args.reading, "cuts": found})
    return FINDING if any(found.values()) else OK


def cmd_certify(args) -> int:
    inst = _instance(args.instance)
    asg = _assignment(args.assignment) if args.assignment else None
    kw = {"variant": args.variant, "reading": args.reading, "max_nodes": args.max_nodes,
          "external_objective": args.external_objective}
    cert = certify(inst, args.issue, asg, **kw)
    print(f"{cert.issue} ({cert.variant}): {cert.verdict}")
    if args.output:
        _write(args.output, cert.to_json())
    _dump(args, cert.to_dict())
    return OK


def cmd_replay(args) -> int:
    try:
        cert = FlawCertificate.from_json(Path(args.certificate).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read certificate {args.certificate}: {exc.strerror or exc}") from None
    except (KeyError, TypeError, json.JSONDecodeError) as exc:
        raise UsageError(f"malformed certificate: {exc}") from None
    same, again = replay(cert)
    print(f"{cert.issue}: recorded {cert.verdict}, recomputed {again.verdict}; "
          + ("identical" if same else "MISMATCH"))
    _dump(args, {"identical": same, "recorded": cert.verdict, "recomputed": again.verdict})
    return OK if same else FINDING


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--variant", default="original", choices=[v.value for v in Variant],
                        help="model variant (default: original)")
    common.add_argument("--json", metavar="FILE", help="write a machine-readable report")
    common.add_argument("--dot", metavar="FILE", help="write a Graphviz rendering of the routes")
    common.add_argument("--max-nodes", type=int, metavar="N",
                        help=f"raise the HCF-count guard of the exact solvers (default {MAX_HCFS}, "
                             f"{FIX3_MAX_HCFS} for cut enumeration)")

    parser = argparse.ArgumentParser(prog="mcvrp", description="Audit the multi-compartment "
                                     "healthcare-waste routing MILP against true routing semantics.")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True
    inst_help = f"instance JSON file or {BUILTIN_INSTANCE}"
    asg_help = f"assignment JSON file or {BUILTIN_SOLUTION}"

    p = sub.add_parser("validate", parents=[common], help="check an instance file")
    p.add_argument("instance", help=inst_help)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("solve", parents=[common], help="exact routing optimum for small instances")
    p.add_argument("instance", help=inst_help)
    p.add_argument("-o", "--output", help="write the lifted assignment here")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("check", parents=[common], help="evaluate an assignment against a variant")
    p.add_argument("instance", help=inst_help)
    p.add_argument("assignment", help=asg_help)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("export", parents=[common], help="write the model as LP or MPS")
    p.add_argument("instance", help=inst_help)
    p.add_argument("--format", choices=("lp", "mps"), default="lp")
    p.add_argument("-o", "--output", help="output file (default: standard output)")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("separate", parents=[common], help="find a violated subtour cut")
    p.add_argument("instance", help=inst_help)
    p.add_argument("assignment", help=asg_help)
    p.add_argument("--vehicle", type=int, help="vehicle to separate (default: all)")
    p.add_argument("--reading", choices=READINGS, default="depot_side")
    p.set_defaults(func=cmd_separate)

    p = sub.add_parser("certify", parents=[common], help="produce a flaw certificate")
    p.add_argument("instance", help=inst_help)
    p.add_argument("--issue", required=True, choices=sorted(ISSUE_ALIASES))
    p.add_argument("--assignment", help=asg_help + " (default: a built-in shape)")
    p.add_argument("--reading", choices=READINGS, default="depot_side")
    p.add_argument("--external-objective", type=int, metavar="Z",
                   help="original model optimum from an external solver (gap certificate)")
    p.add_argument("-o", "--output", help="write the certificate JSON here")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("replay", parents=[common], help="recompute a certificate and compare")
    p.add_argument("certificate")
    p.set_defaults(func=cmd_replay)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return OK if exc.code == 0 else USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"mcvrp: {exc}", file=sys.stderr)
        return USAGE
    except (InstanceError, AssignmentError, CutError, ValueError) as exc:
        print(f"mcvrp: {exc}", file=sys.stderr)
        return USAGE
    except ScaleGuardError as exc:
        print(f"mcvrp: {exc}; raise the guard with --max-nodes", file=sys.stderr)
        return USAGE
    except InfeasibleError as exc:
        print(f"mcvrp: {exc}")
        return FINDING
    except BrokenPipeError:
        # reader went away (e.g. piped into head); silence the flush at exit
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return OK


if __name__ == "__main__":
    sys.exit(main())
