"""End-to-end orchestration: load, demand, classify, design, price, emit.

The pipeline turns a validated scenario into decile report rows and design
geometry. Regions are the unit of attribution: each region contributes one
reporting unit per network level per algorithm. The regional backbone is
solved once per algorithm and its length and operating cost are split
equally across the regions it actually connects; access networks are solved
per region and attributed whole.
"""

from __future__ import annotations

import logging
import math
import os
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from . import demand as demand_mod
from .config import ScenarioConfig, parameters_payload
from .demand import AdoptionScenario, SubregionDemand, users_for_node
from .errors import DataError
from .geodata import (
    FiberLineSet,
    RoadGraph,
    Settlement,
    SettlementSet,
    haversine_km,
    load_fiber_lines,
    load_road_graph,
    load_settlements,
)
from .netdesign import (
    ClassificationResult,
    DesignResult,
    NodeRole,
    classify_nodes,
    design_network,
)
from .report import (
    DecileReportRow,
    KeyMismatch,
    McSummaryRow,
    ReportUnit,
    build_report,
    config_hash,
    emit_csv,
    emit_design_geojson,
    emit_mc_csv,
    monte_carlo,
)

log = logging.getLogger(__name__)

LEVELS = ("regional", "access")


@dataclass(frozen=True)
class LoadedInputs:
    settlements: SettlementSet
    areas: dict[str, float]
    fiber: FiberLineSet | None
    roads: RoadGraph | None


@dataclass(frozen=True)
class DemandStage:
    records: list[SubregionDemand]
    users_by_subregion: dict[str, float]
    total_users: float
    warnings: tuple[str, ...]


@dataclass
class PipelineResult:
    demand: DemandStage
    classification: ClassificationResult
    # (selection, level) -> designs; access holds one design per region in
    # region order, regional holds at most one country-wide design.
    designs: dict[tuple[str, str], list[DesignResult]]
    units: list[ReportUnit]
    rows: list[DecileReportRow]
    total_users: float
    warnings: list[str] = field(default_factory=list)


_SELECTION_TAG = {"mst": "MST", "pcst": "PCST_GW"}


def load_inputs(cfg: ScenarioConfig) -> LoadedInputs:
    """Load and validate every configured input file."""
    settlements = load_settlements(cfg.settlements_path, fmt=cfg.settlements_format)
    areas = demand_mod.load_area_table(cfg.areas_path)
    fiber = load_fiber_lines(cfg.fiber_path) if cfg.fiber_path else None
    roads = load_road_graph(cfg.roads_path) if cfg.roads_path else None
    missing = sorted(
        {s.subregion_id for s in settlements} - set(areas)
    )
    if missing:
        raise DataError(
            f"settled subregions missing from the area table: {', '.join(missing)}"
        )
    _check_subregion_regions(settlements)
    log.info(
        "loaded %d settlements, %d subregion areas, fiber=%s, roads=%s",
        len(settlements),
        len(areas),
        "yes" if fiber else "no",
        "yes" if roads else "no",
    )
    return LoadedInputs(settlements=settlements, areas=areas, fiber=fiber, roads=roads)


def _check_subregion_regions(settlements: SettlementSet) -> None:
    seen: dict[str, str] = {}
    for s in settlements:
        prior = seen.setdefault(s.subregion_id, s.region_id)
        if prior != s.region_id:
            raise DataError(
                f"subregion {s.subregion_id!r} spans regions {prior!r} and {s.region_id!r}"
            )


def build_demand(cfg: ScenarioConfig, inputs: LoadedInputs) -> DemandStage:
    """Population density, deciles, and potential users per subregion."""
    pops: dict[str, int] = {sid: 0 for sid in inputs.areas}
    for s in inputs.settlements:
        pops[s.subregion_id] += s.population
    triples = [(sid, pops[sid], inputs.areas[sid]) for sid in sorted(inputs.areas)]
    scenario = AdoptionScenario(
        adoption_rate=cfg.adoption_rate, min_density_per_km2=cfg.min_density_per_km2
    )
    warnings: list[str] = []
    if len(triples) >= 10:
        records = demand_mod.assign_deciles(triples, scenario)
    else:
        records = demand_mod.band_demand(triples, scenario)
        warnings.append(
            f"only {len(triples)} subregions: deciles assigned from density bands, "
            "not an equal-count split"
        )
        log.warning(warnings[-1])
    users = {r.subregion_id: users_for_node(r) for r in records}
    return DemandStage(
        records=records,
        users_by_subregion=users,
        total_users=math.fsum(users.values()),
        warnings=tuple(warnings),
    )


def _region_members(settlements: SettlementSet) -> dict[str, list[Settlement]]:
    members: dict[str, list[Settlement]] = {}
    for s in settlements:
        members.setdefault(s.region_id, []).append(s)
    return members


def _region_users(
    members: Mapping[str, Sequence[Settlement]], users_by_subregion: Mapping[str, float]
) -> dict[str, float]:
    out: dict[str, float] = {}
    for region in sorted(members):
        subregions = sorted({s.subregion_id for s in members[region]})
        out[region] = math.fsum(users_by_subregion[sid] for sid in subregions)
    return out


def _region_decile(
    region: str,
    classification: ClassificationResult,
    settlements: SettlementSet,
    demand_index: Mapping[str, SubregionDemand],
) -> int:
    anchor_id = classification.region_anchor[region]
    subregion = settlements.by_id(anchor_id).subregion_id
    record = demand_index.get(subregion)
    if record is None:
        raise KeyMismatch(f"anchor subregion {subregion!r} has no demand record")
    return record.decile


def _pick_backbone_root(
    classification: ClassificationResult, settlements: SettlementSet
) -> tuple[str, bool, list[str]]:
    """Root settlement for the country backbone.

    Prefers the core-adjacent settlement nearest any regional node (existing
    plant, not billed); falls back to the most populous regional node when
    nothing touches the core. Returns (root id, root is billable, warnings).
    """
    rnod_ids = sorted(classification.regional_nodes.values())
    core_ids = sorted(
        sid
        for sid, role in classification.roles.items()
        if role is NodeRole.CORE_ADJACENT
    )
    if core_ids and rnod_ids:
        rnods = [settlements.by_id(sid) for sid in rnod_ids]

        def nearest_rnod_km(core_id: str) -> float:
            core = settlements.by_id(core_id)
            return min(haversine_km(core.location, r.location) for r in rnods)

        root = min(core_ids, key=lambda sid: (nearest_rnod_km(sid), sid))
        return root, False, []
    if core_ids:
        # nothing to connect; any core settlement can stand as the root
        return core_ids[0], False, []
    fallback = max(
        rnod_ids, key=lambda sid: (settlements.by_id(sid).population, sid)
    )
    warning = (
        f"no settlement within the core buffer; backbone rooted at regional node "
        f"{fallback!r}"
    )
    log.warning(warning)
    return fallback, True, [warning]


def build_designs(
    cfg: ScenarioConfig,
    inputs: LoadedInputs,
    stage: DemandStage,
    classification: ClassificationResult,
) -> tuple[dict[tuple[str, str], list[DesignResult]], list[str]]:
    """Solve every selected algorithm at both network levels."""
    settlements = inputs.settlements
    members = _region_members(settlements)
    warnings: list[str] = []

    designs: dict[tuple[str, str], list[DesignResult]] = {}
    for selection in cfg.algorithms:
        designs[(selection, "regional")] = []
        designs[(selection, "access")] = []

        rnod_ids = sorted(classification.regional_nodes.values())
        if rnod_ids:
            root_id, root_billable, root_warnings = _pick_backbone_root(
                classification, settlements
            )
            warnings.extend(root_warnings)
            node_ids = sorted(set(rnod_ids) | {root_id})
            nodes = [settlements.by_id(sid) for sid in node_ids]
            region_users = _region_users(members, stage.users_by_subregion)
            prize_by_node = {
                sid: region_users[settlements.by_id(sid).region_id] for sid in rnod_ids
            }
            result = design_network(
                "regional",
                selection,
                nodes,
                root_id,
                roads=inputs.roads if selection == "pcst" else None,
                node_users=prize_by_node if selection == "pcst" else None,
                snap_radius_km=cfg.snap_radius_km,
                prize_scale=cfg.prize_scale,
                count_root_as_terminal=root_billable,
            )
            warnings.extend(result.warnings)
            designs[(selection, "regional")].append(result)
        else:
            warnings.append("no regional nodes: the backbone level is empty")
            log.warning(warnings[-1])

        for region in sorted(members):
            anchor_id = classification.region_anchor[region]
            access_ids = sorted(
                sid
                for sid in classification.access_nodes.values()
                if settlements.by_id(sid).region_id == region
            )
            node_ids = sorted(set(access_ids) | {anchor_id})
            nodes = [settlements.by_id(sid) for sid in node_ids]
            prize_by_node = {
                sid: stage.users_by_subregion[settlements.by_id(sid).subregion_id]
                for sid in access_ids
            }
            result = design_network(
                "access",
                selection,
                nodes,
                anchor_id,
                roads=inputs.roads if selection == "pcst" else None,
                node_users=prize_by_node if selection == "pcst" else None,
                snap_radius_km=cfg.snap_radius_km,
                prize_scale=cfg.prize_scale,
                count_root_as_terminal=True,
            )
            warnings.extend(result.warnings)
            designs[(selection, "access")].append(result)
    return designs, warnings


def build_units(
    inputs: LoadedInputs,
    stage: DemandStage,
    classification: ClassificationResult,
    designs: Mapping[tuple[str, str], list[DesignResult]],
) -> list[ReportUnit]:
    """One reporting unit per region per level per algorithm.

    The backbone's length and operating cost are split equally across the
    regions whose regional node it connects; regions it does not reach (on
    the core already, below threshold, or priced out by the prize solver)
    keep their users but carry zero backbone quantities. Access designs are
    attributed whole to their region.
    """
    settlements = inputs.settlements
    members = _region_members(settlements)
    demand_index = {r.subregion_id: r for r in stage.records}
    region_users = _region_users(members, stage.users_by_subregion)
    region_decile = {
        region: _region_decile(region, classification, settlements, demand_index)
        for region in sorted(members)
    }

    units: list[ReportUnit] = []
    for (selection, level), results in sorted(designs.items()):
        tag = _SELECTION_TAG[selection]
        if level == "regional":
            units.extend(
                _regional_units(
                    results, tag, classification, settlements, region_users, region_decile
                )
            )
        else:
            units.extend(
                _access_units(results, tag, settlements, region_users, region_decile)
            )
    return units


def _regional_units(
    results: Sequence[DesignResult],
    tag: str,
    classification: ClassificationResult,
    settlements: SettlementSet,
    region_users: Mapping[str, float],
    region_decile: Mapping[str, int],
) -> list[ReportUnit]:
    served: dict[str, bool] = {region: False for region in region_users}
    length_share = 0.0
    opex_share = 0.0
    if results:
        (result,) = results
        rnod_region = {
            sid: settlements.by_id(sid).region_id
            for sid in classification.regional_nodes.values()
        }
        connected = [
            sid for sid in result.connected_settlements() if sid in rnod_region
        ]
        k = len(connected)
        if k:
            length_share = result.design.total_length_km / k
            opex_share = 1.0 / k
        for sid in connected:
            served[rnod_region[sid]] = True
    units = []
    for region in sorted(region_users):
        reached = served[region]
        units.append(
            ReportUnit(
                key=region,
                decile=region_decile[region],
                level="regional",
                algorithm=tag,
                users=region_users[region],
                node_count=1 if reached else 0,
                length_km=length_share if reached else 0.0,
                opex_share=opex_share if reached else 0.0,
            )
        )
    return units


def _access_units(
    results: Sequence[DesignResult],
    tag: str,
    settlements: SettlementSet,
    region_users: Mapping[str, float],
    region_decile: Mapping[str, int],
) -> list[ReportUnit]:
    units = []
    for result in results:
        region = settlements.by_id(result.root_id).region_id
        units.append(
            ReportUnit(
                key=region,
                decile=region_decile[region],
                level="access",
                algorithm=tag,
                users=region_users[region],
                node_count=result.design.terminal_node_count,
                length_km=result.design.total_length_km,
                opex_share=1.0,
            )
        )
    return units


def run_pipeline(cfg: ScenarioConfig) -> PipelineResult:
    """Execute load, demand, classify, design, and pricing."""
    inputs = load_inputs(cfg)
    stage = build_demand(cfg, inputs)
    classification = classify_nodes(
        inputs.settlements,
        inputs.fiber,
        buffer_km=cfg.buffer_km,
        main_settlement_threshold=cfg.main_settlement_threshold,
    )
    warnings = list(stage.warnings)
    if classification.regions_without_candidate:
        flagged = ", ".join(classification.regions_without_candidate)
        warnings.append(f"regions without a main-settlement candidate: {flagged}")
    designs, design_warnings = build_designs(cfg, inputs, stage, classification)
    warnings.extend(design_warnings)
    units = build_units(inputs, stage, classification, designs)
    rows = build_report(units, cfg.cost_book, cfg.factor_book)
    return PipelineResult(
        demand=stage,
        classification=classification,
        designs=designs,
        units=units,
        rows=rows,
        total_users=stage.total_users,
        warnings=warnings,
    )


def run_monte_carlo(cfg: ScenarioConfig, result: PipelineResult) -> list[McSummaryRow]:
    """Re-price the pipeline's units under the configured parameter draws."""
    if cfg.mc is None:
        raise DataError("scenario has no monte_carlo section")
    return monte_carlo(result.units, cfg.cost_book, cfg.factor_book, cfg.mc)


def scenario_hash(cfg: ScenarioConfig) -> str:
    return config_hash(parameters_payload(cfg))


def emit_outputs(
    cfg: ScenarioConfig,
    result: PipelineResult,
    *,
    designs_only: bool = False,
    mc_rows: Sequence[McSummaryRow] | None = None,
) -> list[str]:
    """Write design GeoJSONs and, unless designs_only, the CSV reports."""
    os.makedirs(cfg.output_dir, exist_ok=True)
    params_hash = scenario_hash(cfg)
    written: list[str] = []

    for (selection, level), results in sorted(result.designs.items()):
        if not results:
            continue
        path = os.path.join(cfg.output_dir, f"design_{level}_{selection}.geojson")
        emit_design_geojson(results, path, parameters_hash=params_hash)
        written.append(path)

    if not designs_only:
        demand_path = os.path.join(cfg.output_dir, "demand.csv")
        demand_mod.write_demand_csv(result.demand.records, demand_path)
        written.append(demand_path)
        report_path = os.path.join(cfg.output_dir, "report.csv")
        emit_csv(result.rows, report_path, parameters_hash=params_hash)
        written.append(report_path)

    if mc_rows is not None:
        mc_path = os.path.join(cfg.output_dir, "mc_summary.csv")
        emit_mc_csv(mc_rows, mc_path, parameters_hash=params_hash)
        written.append(mc_path)
    return written
