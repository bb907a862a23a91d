"""Audit toolkit for a multi-compartment healthcare-waste routing MILP."""

from .assignment import (AssignmentError, ModelAssignment, ViolationRecord, evaluate, objective_value,
                         routing_feasible, u_feasibility, u_ranges)
from .certify import (FlawCertificate, certify_butterfly, certify_fix3_effectiveness,
                      certify_issue1, certify_issue2, certify_issue3, certify_issue4,
                      certify_lower_bound_gap, replay)
from .export import export_lp, export_mps
from .formulation import LinearConstraint, MilpModel, Variable, VariableRef, Variant, build_model
from .instance import InstanceError, WasteInstance, load_instance, paper_instance, parse_instance
from .oracle import (BruteForceResult, OptimalPlan, brute_force_milp, exact_semantic_solve,
                     held_karp_tour, plan_to_assignment)
from .paper import paper_reported_assignment
from .routes import RouteReport, semantic_validate, to_dot
from .subtour import make_subtour_cut, separate_subtour

__version__ = "0.1.0"

__all__ = [
    "AssignmentError", "ModelAssignment", "ViolationRecord", "evaluate", "objective_value",
    "routing_feasible", "u_feasibility", "u_ranges",
    "FlawCertificate", "certify_butterfly", "certify_fix3_effectiveness", "certify_issue1",
    "certify_issue2", "certify_issue3", "certify_issue4", "certify_lower_bound_gap", "replay",
    "export_lp", "export_mps",
    "LinearConstraint", "MilpModel", "Variable", "VariableRef", "Variant", "build_model",
    "InstanceError", "WasteInstance", "load_instance", "paper_instance", "parse_instance",
    "BruteForceResult", "OptimalPlan", "brute_force_milp", "exact_semantic_solve", "held_karp_tour",
    "plan_to_assignment",
    "paper_reported_assignment",
    "RouteReport", "semantic_validate", "to_dot",
    "make_subtour_cut", "separate_subtour",
]
