"""Plan reports: per-demand rows, aggregate metrics, fits and comparisons.

Reports serialize to JSON (lossless round trip) and CSV (per-demand rows).
Wall-clock timing is telemetry, not part of the canonical plan output: two
runs over identical inputs must produce byte-identical report files, so
``emit_report`` omits the timing field unless asked to keep it.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import ComparisonError, ReportError
from .planner import AuditViolation, PlanState
from .topology import DemandStatus

SCHEMA_VERSION = 1

CSV_COLUMNS = [
    "demand_id",
    "src",
    "dst",
    "path_km",
    "status",
    "reason",
    "data_rate_gbps",
    "bits_per_symbol",
    "fec",
    "start_slot",
    "width_slots",
    "linear_osnr_db",
    "total_osnr_db",
    "estimator",
]


@dataclass(frozen=True)
class Metrics:
    throughput_tbps: float
    blocked_spectrum: int
    blocked_osnr: int
    occupied_bandwidth_thz: float
    spectral_efficiency_tbps_thz: float
    acf_calls: int
    ff_calls: int
    wall_time_s: float | None = None


@dataclass(frozen=True)
class DemandRow:
    demand_id: str
    src: str
    dst: str
    path_km: float
    path: tuple[str, ...]
    status: str
    reason: str | None
    data_rate_gbps: int | None
    bits_per_symbol: int | None
    fec_overhead: float | None
    symbol_rate_gbaud: float | None
    start_slot: int | None
    width_slots: int | None
    linear_osnr_db: float | None
    total_osnr_db: float | None
    estimator: str | None


@dataclass(frozen=True)
class PlanReport:
    mode: str
    parameters: dict
    rows: tuple[DemandRow, ...]
    metrics: Metrics
    audit_violations: tuple[AuditViolation, ...] = ()


def compute_metrics(state: PlanState) -> Metrics:
    """Aggregate the run per the report invariants.

    Throughput counts each bidirectional demand's rate once; spectral
    efficiency is zero on an empty grid.
    """
    throughput_gbps = sum(
        state.placed_config[d.id].data_rate_gbps
        for d in state.demands
        if d.status is DemandStatus.VALIDATED
    )
    occupied_thz = state.grid.occupied_bandwidth_thz()
    throughput_tbps = throughput_gbps / 1000.0
    return Metrics(
        throughput_tbps=throughput_tbps,
        blocked_spectrum=sum(
            d.status is DemandStatus.BLOCKED and d.block_reason.value == "spectrum"
            for d in state.demands
        ),
        blocked_osnr=sum(
            d.status is DemandStatus.BLOCKED and d.block_reason.value == "osnr"
            for d in state.demands
        ),
        occupied_bandwidth_thz=occupied_thz,
        spectral_efficiency_tbps_thz=(
            throughput_tbps / occupied_thz if occupied_thz > 0 else 0.0
        ),
        acf_calls=state.acf_calls,
        ff_calls=state.ff_calls,
        wall_time_s=state.wall_time_s,
    )


def build_report(
    state: PlanState,
    mode: str,
    parameters: dict | None = None,
    audit_violations: Sequence[AuditViolation] = (),
) -> PlanReport:
    rows = []
    for demand in state.demands:
        config = state.placed_config.get(demand.id)
        result = state.final_result.get(demand.id)
        linear = state.linear_osnr.get(demand.id)
        rows.append(
            DemandRow(
                demand_id=demand.id,
                src=demand.src,
                dst=demand.dst,
                path_km=round(state.topology.path_length_km(demand.path), 6),
                path=tuple(demand.path),
                status=demand.status.value,
                reason=demand.block_reason.value if demand.block_reason else None,
                data_rate_gbps=config.data_rate_gbps if config else None,
                bits_per_symbol=config.bits_per_symbol if config else None,
                fec_overhead=config.fec_overhead if config else None,
                symbol_rate_gbaud=config.symbol_rate_gbaud if config else None,
                start_slot=(
                    state.grid.assignment(demand.id)[0].start_slot
                    if state.grid.assignment(demand.id)
                    else None
                ),
                width_slots=config.width_slots if config else None,
                linear_osnr_db=None if linear is None or math.isinf(linear) else linear,
                total_osnr_db=result.total_osnr_db if result else None,
                estimator=result.estimator.value if result else None,
            )
        )
    return PlanReport(
        mode=mode,
        parameters=dict(parameters or {}),
        rows=tuple(rows),
        metrics=compute_metrics(state),
        audit_violations=tuple(audit_violations),
    )


# --------------------------------------------------------------------------
# Rate-vs-distance fit
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class RateDistanceFit:
    """Cubic fit of assigned rate (Gbps) against path length (km).

    ``coefficients`` are ascending powers: rate = c0 + c1 d + c2 d^2 + c3 d^3.
    """

    coefficients: tuple[float, float, float, float]
    residual_norm: float
    curve_km: tuple[float, ...]
    curve_gbps: tuple[float, ...]

    def evaluate(self, distance_km: float) -> float:
        return float(np.polyval(self.coefficients[::-1], distance_km))


def fit_rate_vs_distance(rows: Iterable[DemandRow], n_curve_points: int = 50) -> RateDistanceFit:
    """Least-squares cubic over validated demands; needs 4 distinct distances."""
    points = [
        (row.path_km, float(row.data_rate_gbps))
        for row in rows
        if row.status == DemandStatus.VALIDATED.value and row.data_rate_gbps is not None
    ]
    distances = sorted({d for d, _ in points})
    if len(distances) < 4:
        raise ReportError(
            f"cubic fit needs at least 4 distinct path lengths, got {len(distances)}"
        )
    x = np.array([d for d, _ in points])
    y = np.array([r for _, r in points])
    coeffs_desc = np.polyfit(x, y, 3)
    residual = float(np.linalg.norm(y - np.polyval(coeffs_desc, x)))
    curve_x = np.linspace(min(distances), max(distances), n_curve_points)
    curve_y = np.polyval(coeffs_desc, curve_x)
    return RateDistanceFit(
        coefficients=tuple(float(c) for c in coeffs_desc[::-1]),
        residual_norm=residual,
        curve_km=tuple(float(v) for v in curve_x),
        curve_gbps=tuple(float(v) for v in curve_y),
    )


# --------------------------------------------------------------------------
# Plan comparison
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class PlanSummary:
    label: str
    mode: str
    throughput_tbps: float
    intersection_throughput_tbps: float
    blocked_spectrum: int
    blocked_osnr: int
    acf_calls: int
    ff_calls: int
    wall_time_s: float | None


@dataclass(frozen=True)
class PlanComparison:
    demand_count: int
    intersection_count: int
    summaries: tuple[PlanSummary, ...]
    throughput_ratios: dict


def compare_plans(*reports: PlanReport) -> PlanComparison:
    """Compare plans over the demands every plan validated.

    All reports must cover the identical demand list. Ratios are formed
    from intersection throughput, so modes are judged on the same demands.
    """
    if len(reports) < 2:
        raise ComparisonError("need at least two reports to compare")
    id_lists = [tuple(r.demand_id for r in rep.rows) for rep in reports]
    if any(ids != id_lists[0] for ids in id_lists[1:]):
        raise ComparisonError("reports cover different demand lists")

    validated_sets = [
        {r.demand_id for r in rep.rows if r.status == DemandStatus.VALIDATED.value}
        for rep in reports
    ]
    intersection = set.intersection(*validated_sets)

    labels = [chr(ord("a") + i) for i in range(len(reports))]
    summaries = []
    for label, rep in zip(labels, reports):
        inter_gbps = sum(
            r.data_rate_gbps for r in rep.rows if r.demand_id in intersection
        )
        summaries.append(
            PlanSummary(
                label=label,
                mode=rep.mode,
                throughput_tbps=rep.metrics.throughput_tbps,
                intersection_throughput_tbps=inter_gbps / 1000.0,
                blocked_spectrum=rep.metrics.blocked_spectrum,
                blocked_osnr=rep.metrics.blocked_osnr,
                acf_calls=rep.metrics.acf_calls,
                ff_calls=rep.metrics.ff_calls,
                wall_time_s=rep.metrics.wall_time_s,
            )
        )
    ratios = {}
    for i, si in enumerate(summaries):
        for sj in summaries[i + 1 :]:
            key = f"{si.label}_vs_{sj.label}"
            ratios[key] = (
                si.intersection_throughput_tbps / sj.intersection_throughput_tbps
                if sj.intersection_throughput_tbps > 0
                else math.inf
            )
    return PlanComparison(
        demand_count=len(id_lists[0]),
        intersection_count=len(intersection),
        summaries=tuple(summaries),
        throughput_ratios=ratios,
    )


# --------------------------------------------------------------------------
# Serialization
# --------------------------------------------------------------------------


def report_to_dict(report: PlanReport, include_timing: bool = False) -> dict:
    metrics = asdict(report.metrics)
    if not include_timing:
        metrics["wall_time_s"] = None
    return {
        "schema_version": SCHEMA_VERSION,
        "mode": report.mode,
        "parameters": report.parameters,
        "metrics": metrics,
        "demands": [asdict(row) | {"path": list(row.path)} for row in report.rows],
        "audit": {"violations": [asdict(v) for v in report.audit_violations]},
    }


def report_from_dict(payload: dict) -> PlanReport:
    try:
        rows = tuple(
            DemandRow(**{**row, "path": tuple(row["path"])}) for row in payload["demands"]
        )
        metrics = Metrics(**payload["metrics"])
        violations = tuple(
            AuditViolation(**v) for v in payload["audit"]["violations"]
        )
        return PlanReport(
            mode=payload["mode"],
            parameters=payload["parameters"],
            rows=rows,
            metrics=metrics,
            audit_violations=violations,
        )
    except (KeyError, TypeError) as exc:
        raise ReportError(f"malformed report payload: {exc}") from exc


def emit_report(
    report: PlanReport,
    format: str,
    path: str | Path,
    include_timing: bool = False,
) -> None:
    """Write the report as ``json`` (full structure) or ``csv`` (demand rows)."""
    path = Path(path)
    if format == "json":
        payload = report_to_dict(report, include_timing=include_timing)
        path.write_text(json.dumps(payload, indent=2) + "\n")
    elif format == "csv":
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_COLUMNS)
            for row in report.rows:
                writer.writerow(
                    [
                        row.demand_id,
                        row.src,
                        row.dst,
                        row.path_km,
                        row.status,
                        row.reason or "",
                        _blank(row.data_rate_gbps),
                        _blank(row.bits_per_symbol),
                        _blank(row.fec_overhead),
                        _blank(row.start_slot),
                        _blank(row.width_slots),
                        _blank(row.linear_osnr_db),
                        _blank(row.total_osnr_db),
                        row.estimator or "",
                    ]
                )
    else:
        raise ReportError(f"unknown report format {format!r} (expected json or csv)")


def _blank(value) -> object:
    return "" if value is None else value


def parse_report(path: str | Path) -> PlanReport:
    try:
        payload = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ReportError(f"cannot read report {path}: {exc}") from exc
    return report_from_dict(payload)
