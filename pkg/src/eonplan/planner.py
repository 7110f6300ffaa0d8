"""Demand planning: pre-selection, first-fit placement, and validation.

Three modes share one loop. The two-tier mode screens every placed
configuration with the cheap closed-form estimator and only falls back to
the expensive full-form integration when the screen rejects; the pure
modes use a single estimator for both screen and verdict. A demand whose
configuration fails validation releases its spectrum, steps down to the
next configuration on its pre-selected list and is placed again.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Sequence

from .catalog import Configuration, order_configurations
from .constants import C_BAND_SLOTS, DEFAULT_LAUNCH_DBM
from .errors import EstimatorError, NoiseUndefinedError
from .qot import (
    ChannelState,
    Estimator,
    QotResult,
    ase_power_w,
    evaluate_path,
    linear_osnr_db,
)
from .qot.base import dbm_to_w
from .spectrum import SpectrumGrid
from .topology import (
    BlockReason,
    Demand,
    DemandStatus,
    Link,
    Topology,
    route_demands,
)

logger = logging.getLogger(__name__)


class PlanMode:
    """Mode tokens accepted by the CLI and the report metadata."""

    HYBRID = "hybrid"
    ACF = "acf"
    FF = "ff"

    ALL = (HYBRID, ACF, FF)


@dataclass(frozen=True)
class PlanEvent:
    """One step of the planning trace, for debugging and conformance tests."""

    kind: str
    demand_id: str
    config_label: str | None = None
    estimator: str | None = None
    osnr_db: float | None = None
    required_db: float | None = None
    start_slot: int | None = None


@dataclass
class PlanState:
    """Mutable state of one planning run."""

    topology: Topology
    demands: list[Demand]
    catalog: list[Configuration]
    launch_power_w: float
    grid: SpectrumGrid
    rel_tol: float = 1e-3
    candidates: dict[str, list[Configuration]] = field(default_factory=dict)
    cursor: dict[str, int] = field(default_factory=dict)
    placed_config: dict[str, Configuration] = field(default_factory=dict)
    linear_osnr: dict[str, float] = field(default_factory=dict)
    final_result: dict[str, QotResult] = field(default_factory=dict)
    acf_calls: int = 0
    ff_calls: int = 0
    events: list[PlanEvent] = field(default_factory=list)
    wall_time_s: float = 0.0

    def path_links(self, demand: Demand) -> list[Link]:
        return [self.topology.links[lid] for lid in demand.path]


def new_state(
    topology: Topology,
    demands: Sequence[Demand],
    catalog: Sequence[Configuration],
    launch_dbm: float = DEFAULT_LAUNCH_DBM,
    n_slots: int = C_BAND_SLOTS,
    rel_tol: float = 1e-3,
) -> PlanState:
    """Route the demands and set up an empty grid; demands keep file order."""
    demand_list = [Demand(d.id, d.src, d.dst) for d in demands]
    route_demands(topology, demand_list)
    return PlanState(
        topology=topology,
        demands=demand_list,
        catalog=list(catalog),
        launch_power_w=dbm_to_w(launch_dbm),
        grid=SpectrumGrid(topology.links, n_slots=n_slots),
        rel_tol=rel_tol,
    )


def _band_center_thz(state: PlanState) -> float:
    # Pre-selection runs before placement, so the channel frequency is not
    # known yet; use the band center as the ASE reference.
    from .constants import GRID_START_THZ, SLOT_WIDTH_GHZ

    return GRID_START_THZ + state.grid.n_slots * SLOT_WIDTH_GHZ / 1000.0 / 2.0


def path_linear_osnr(state: PlanState, demand: Demand) -> float:
    """Linear OSNR of the routed path; unbounded without amplifiers."""
    amps = state.topology.path_amplifiers(demand.path)
    if not amps:
        return math.inf
    ase = ase_power_w(amps, _band_center_thz(state))
    return linear_osnr_db(state.launch_power_w, ase)


def preselect(state: PlanState, demand: Demand) -> list[Configuration]:
    """Configurations whose requirement clears the path's linear OSNR, ordered.

    A path without amplifiers has no noise floor; every configuration
    passes. The surviving list drives the demand's step-down sequence.
    """
    osnr = path_linear_osnr(state, demand)
    state.linear_osnr[demand.id] = osnr
    surviving = [c for c in state.catalog if c.required_osnr_db <= osnr]
    return order_configurations(surviving)


def preselect_all(state: PlanState) -> None:
    """Pre-select every demand; demands with an empty list block immediately."""
    for demand in state.demands:
        configs = preselect(state, demand)
        state.candidates[demand.id] = configs
        state.cursor[demand.id] = 0
        state.events.append(PlanEvent("preselect", demand.id, config_label=str(len(configs))))
        if not configs:
            demand.block(BlockReason.OSNR)
            state.events.append(PlanEvent("block-osnr", demand.id))


def place_initial(state: PlanState) -> None:
    """First-fit the head configuration of every pre-selected demand."""
    for demand in state.demands:
        if demand.status is DemandStatus.BLOCKED:
            continue
        config = state.candidates[demand.id][0]
        slice_ = state.grid.first_fit_place(demand.id, demand.path, config.width_slots)
        if slice_ is None:
            demand.block(BlockReason.SPECTRUM)
            state.events.append(PlanEvent("block-spectrum", demand.id, config.label))
            continue
        state.placed_config[demand.id] = config
        state.events.append(
            PlanEvent("place", demand.id, config.label, start_slot=slice_.start_slot)
        )


def channel_for(state: PlanState, demand: Demand) -> ChannelState:
    slice_, _path = state.grid.assignment(demand.id)
    config = state.placed_config[demand.id]
    return ChannelState(
        center_thz=slice_.center_thz,
        launch_power_w=state.launch_power_w,
        symbol_rate_gbaud=config.symbol_rate_gbaud,
        kurtosis=config.kurtosis,
        demand_id=demand.id,
    )


def channels_by_link(state: PlanState, path_link_ids: Sequence[str]) -> dict[str, list[ChannelState]]:
    """Current channel population of every link on the path."""
    by_demand: dict[str, ChannelState] = {}
    result: dict[str, list[ChannelState]] = {}
    demand_index = {d.id: d for d in state.demands}
    for lid in path_link_ids:
        states = []
        for did in state.grid.demands_on_link(lid):
            if did not in by_demand:
                by_demand[did] = channel_for(state, demand_index[did])
            states.append(by_demand[did])
        result[lid] = states
    return result


def _evaluate(state: PlanState, demand: Demand, estimator: Estimator) -> QotResult:
    if estimator is Estimator.ACF:
        state.acf_calls += 1
    else:
        state.ff_calls += 1
    return evaluate_path(
        state.path_links(demand),
        channels_by_link(state, demand.path),
        channel_for(state, demand),
        estimator,
        **({"rel_tol": state.rel_tol} if estimator is Estimator.FF else {}),
    )


def _step_down(state: PlanState, demand: Demand) -> bool:
    """Release, advance to the next configuration and re-place.

    Returns True when the demand holds a freshly placed configuration and
    should be re-screened; False when it just blocked.
    """
    state.grid.release_channel(demand.id)
    state.events.append(PlanEvent("release", demand.id, state.placed_config[demand.id].label))
    del state.placed_config[demand.id]
    state.cursor[demand.id] += 1
    candidates = state.candidates[demand.id]
    if state.cursor[demand.id] >= len(candidates):
        demand.block(BlockReason.OSNR)
        state.events.append(PlanEvent("block-osnr", demand.id))
        return False
    config = candidates[state.cursor[demand.id]]
    slice_ = state.grid.first_fit_place(demand.id, demand.path, config.width_slots)
    if slice_ is None:
        demand.block(BlockReason.OSNR)
        state.events.append(PlanEvent("block-osnr", demand.id, config.label))
        return False
    state.placed_config[demand.id] = config
    state.events.append(
        PlanEvent("place", demand.id, config.label, start_slot=slice_.start_slot)
    )
    return True


def _validate_demand(state: PlanState, demand: Demand, estimators: Sequence[Estimator]) -> None:
    """Run the screen/validate/step-down cycle for one demand."""
    while True:
        config = state.placed_config[demand.id]
        accepted = None
        for stage, estimator in enumerate(estimators):
            try:
                result = _evaluate(state, demand, estimator)
            except EstimatorError as exc:
                logger.warning("estimator %s failed on %s: %s", estimator.value, demand.id, exc)
                break
            kind = "screen" if stage == 0 and len(estimators) > 1 else "check"
            passed = result.total_osnr_db >= config.required_osnr_db
            state.events.append(
                PlanEvent(
                    f"{kind}-{'pass' if passed else 'fail'}",
                    demand.id,
                    config.label,
                    estimator.value,
                    result.total_osnr_db,
                    config.required_osnr_db,
                )
            )
            if passed:
                accepted = result
                break
        if accepted is not None:
            demand.status = DemandStatus.VALIDATED
            state.final_result[demand.id] = accepted
            state.events.append(
                PlanEvent(
                    "validate",
                    demand.id,
                    config.label,
                    accepted.estimator.value,
                    accepted.total_osnr_db,
                    config.required_osnr_db,
                )
            )
            return
        if not _step_down(state, demand):
            return


def run_plan(state: PlanState, mode: str) -> PlanState:
    """Pre-select, place and validate every demand; returns the same state.

    The wall clock covers the planning computation only (no file I/O, no
    post-run audit), so estimator cost comparisons are meaningful.
    """
    estimators = {
        PlanMode.HYBRID: (Estimator.ACF, Estimator.FF),
        PlanMode.ACF: (Estimator.ACF,),
        PlanMode.FF: (Estimator.FF,),
    }[mode]
    started = time.perf_counter()
    preselect_all(state)
    place_initial(state)
    for demand in state.demands:
        if demand.status is DemandStatus.PENDING:
            _validate_demand(state, demand, estimators)
    state.wall_time_s = time.perf_counter() - started
    logger.info(
        "%s run: %d validated, %d blocked, %d acf calls, %d ff calls, %.2f s",
        mode,
        sum(d.status is DemandStatus.VALIDATED for d in state.demands),
        sum(d.status is DemandStatus.BLOCKED for d in state.demands),
        state.acf_calls,
        state.ff_calls,
        state.wall_time_s,
    )
    return state


@dataclass(frozen=True)
class AuditViolation:
    demand_id: str
    required_osnr_db: float
    audited_osnr_db: float
    estimator: str


def audit_validated(state: PlanState) -> list[AuditViolation]:
    """Recompute every validated demand's OSNR against the final grid.

    Placements made after a demand was validated can erode its margin; the
    audit lists every demand whose requirement no longer holds. Estimator
    invocations here do not count towards the planning-loop totals.
    """
    violations = []
    for demand in state.demands:
        if demand.status is not DemandStatus.VALIDATED:
            continue
        config = state.placed_config[demand.id]
        estimator = state.final_result[demand.id].estimator
        result = evaluate_path(
            state.path_links(demand),
            channels_by_link(state, demand.path),
            channel_for(state, demand),
            estimator,
            **({"rel_tol": state.rel_tol} if estimator is Estimator.FF else {}),
        )
        if result.total_osnr_db < config.required_osnr_db:
            violations.append(
                AuditViolation(
                    demand.id,
                    config.required_osnr_db,
                    result.total_osnr_db,
                    estimator.value,
                )
            )
    return violations
