"""Flex-grid optical network planner with two-tier interference screening."""

from .catalog import Configuration, generate_catalog, load_catalog, order_configurations
from .planner import PlanMode, PlanState, audit_validated, new_state, run_plan
from .qot import ChannelState, Estimator, QotResult, nli_closed_form, nli_full_form
from .report import (
    PlanReport,
    build_report,
    compare_plans,
    compute_metrics,
    emit_report,
    fit_rate_vs_distance,
    parse_report,
)
from .spectrum import SpectrumGrid, SpectrumSlice, width_in_slots
from .topology import (
    Demand,
    DemandMode,
    Topology,
    generate_demands,
    load_demands,
    load_topology,
    shortest_path,
    spanize_link,
)

__version__ = "0.1.0"

__all__ = [
    "ChannelState",
    "Configuration",
    "Demand",
    "DemandMode",
    "Estimator",
    "PlanMode",
    "PlanReport",
    "PlanState",
    "QotResult",
    "SpectrumGrid",
    "SpectrumSlice",
    "Topology",
    "audit_validated",
    "build_report",
    "compare_plans",
    "compute_metrics",
    "emit_report",
    "fit_rate_vs_distance",
    "generate_catalog",
    "generate_demands",
    "load_catalog",
    "load_demands",
    "load_topology",
    "new_state",
    "order_configurations",
    "parse_report",
    "run_plan",
    "shortest_path",
    "spanize_link",
    "width_in_slots",
]
