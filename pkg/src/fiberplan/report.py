"""Reporting: decile aggregation, social carbon cost, Monte Carlo, emitters.

A reporting unit is one region's share of one network level under one
algorithm. Units are priced with the cost and emission-factor books, summed
per (decile, level, algorithm), and written as CSV. Monte Carlo re-prices
the same units under parameter draws from a counter-based generator, so
results are independent of execution order.
"""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import io
import json
import logging
import math
import os
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .costmodel import CostBook, tco_quantities
from .errors import ConfigError, DataError, OutputError
from .lca import EmissionFactorBook, emissions_quantities
from .netdesign.design import DesignResult

log = logging.getLogger(__name__)

REPORT_COLUMNS = (
    "decile",
    "level",
    "algorithm",
    "users",
    "total_length_km",
    "tco_usd",
    "annualized_tco_per_user_usd",
    "monthly_tco_per_user_usd",
    "total_kg_co2e",
    "per_user_kg_co2e",
    "annualized_per_user_kg_co2e",
    "scc_usd",
    "scc_per_user_usd",
    "annualized_scc_per_user_usd",
)

MC_COLUMNS = ("metric", "decile", "level", "algorithm", "mean", "p5", "p50", "p95")

# Row fields summarized by Monte Carlo, in report-column order.
MC_METRICS = REPORT_COLUMNS[3:]

_SEED_MASK = (1 << 64) - 1


class KeyMismatch(DataError):
    """A design references a demand key that does not exist."""


class UnknownParameterKey(ConfigError):
    """A Monte Carlo distribution names no known book parameter."""


class InvalidDistributionBounds(ConfigError):
    """A Monte Carlo distribution's bounds are inconsistent."""


class IoError(OutputError):
    """An output file could not be written."""


@dataclass(frozen=True)
class ReportUnit:
    """One region's share of one network level under one algorithm."""

    key: str  # region id (diagnostic)
    decile: int
    level: str  # "regional" | "access"
    algorithm: str  # solver tag: "MST" | "PCST_GW"
    users: float
    node_count: int
    length_km: float
    opex_share: float = 1.0

    def __post_init__(self) -> None:
        if not 1 <= self.decile <= 10:
            raise ValueError(f"decile must be 1..10, got {self.decile}")
        if self.users < 0 or self.node_count < 0 or self.length_km < 0:
            raise ValueError(f"unit quantities must be >= 0 ({self})")


@dataclass(frozen=True)
class DecileReportRow:
    decile: int
    level: str
    algorithm: str
    users: float
    total_length_km: float
    tco_usd: float
    annualized_tco_per_user_usd: float | None
    monthly_tco_per_user_usd: float | None
    total_kg_co2e: float
    per_user_kg_co2e: float | None
    annualized_per_user_kg_co2e: float | None
    scc_usd: float
    scc_per_user_usd: float | None
    annualized_scc_per_user_usd: float | None


def scc(total_kg_co2e: float, carbon_price_usd_per_tonne: float) -> float:
    """Social carbon cost of emissions at a per-tonne price."""
    if total_kg_co2e < 0 or carbon_price_usd_per_tonne < 0:
        raise ValueError("scc inputs must be >= 0")
    return (total_kg_co2e / 1000.0) * carbon_price_usd_per_tonne


def build_report(
    units: Sequence[ReportUnit],
    cost_book: CostBook,
    factor_book: EmissionFactorBook,
) -> list[DecileReportRow]:
    """Price every unit and aggregate per (decile, level, algorithm).

    Totals are sums over member units; per-user metrics divide the summed
    totals by the summed users and are None when those users are zero.
    """
    groups: dict[tuple[int, str, str], list[ReportUnit]] = {}
    for unit in units:
        groups.setdefault((unit.decile, unit.level, unit.algorithm), []).append(unit)

    rows: list[DecileReportRow] = []
    for decile, level, algorithm in sorted(groups):
        members = groups[(decile, level, algorithm)]
        users = math.fsum(m.users for m in members)
        length = math.fsum(m.length_km for m in members)
        tco_total = math.fsum(
            tco_quantities(
                m.node_count, m.length_km, cost_book, m.users, opex_share=m.opex_share
            ).tco_usd
            for m in members
        )
        kg_total = math.fsum(
            emissions_quantities(m.length_km, m.node_count, m.users, factor_book).total_kg
            for m in members
        )
        scc_total = scc(kg_total, cost_book.carbon_price_usd_per_tonne)
        if users > 0:
            ann_tco = tco_total / users / cost_book.assessment_years
            monthly = ann_tco / 12.0
            per_user_kg = kg_total / users
            ann_kg = per_user_kg / factor_book.lifetime_years
            scc_per_user = scc_total / users
            ann_scc = scc_per_user / factor_book.lifetime_years
        else:
            ann_tco = monthly = per_user_kg = ann_kg = scc_per_user = ann_scc = None
        rows.append(
            DecileReportRow(
                decile=decile,
                level=level,
                algorithm=algorithm,
                users=users,
                total_length_km=length,
                tco_usd=tco_total,
                annualized_tco_per_user_usd=ann_tco,
                monthly_tco_per_user_usd=monthly,
                total_kg_co2e=kg_total,
                per_user_kg_co2e=per_user_kg,
                annualized_per_user_kg_co2e=ann_kg,
                scc_usd=scc_total,
                scc_per_user_usd=scc_per_user,
                annualized_scc_per_user_usd=ann_scc,
            )
        )
    return rows


# --- Monte Carlo ------------------------------------------------------------

_DIST_KINDS = ("fixed", "uniform", "triangular")


@dataclass(frozen=True)
class Distribution:
    """One parameter's sampling rule."""

    kind: str
    lo: float = 0.0
    mode: float = 0.0
    hi: float = 0.0
    value: float | None = None  # fixed-at-value override; None keeps the book value

    def __post_init__(self) -> None:
        if self.kind not in _DIST_KINDS:
            raise InvalidDistributionBounds(
                f"distribution kind must be one of {_DIST_KINDS}, got {self.kind!r}"
            )
        if self.kind == "uniform" and not self.lo <= self.hi:
            raise InvalidDistributionBounds(f"uniform needs lo <= hi, got [{self.lo}, {self.hi}]")
        if self.kind == "triangular" and not self.lo <= self.mode <= self.hi:
            raise InvalidDistributionBounds(
                f"triangular needs lo <= mode <= hi, got ({self.lo}, {self.mode}, {self.hi})"
            )


@dataclass(frozen=True)
class McConfig:
    draws: int
    seed: int
    distributions: Mapping[str, Distribution]

    def __post_init__(self) -> None:
        if self.draws < 1:
            raise InvalidDistributionBounds(f"draws must be >= 1, got {self.draws}")


_COST_FIELDS = frozenset(
    f.name for f in dataclasses.fields(CostBook) if f.type in ("float", float)
)
_LCA_FIELDS = frozenset(
    f.name for f in dataclasses.fields(EmissionFactorBook) if f.type in ("float", float)
)


def resolve_parameter_key(key: str) -> str:
    """Which book ("cost" or "lca") owns a tunable parameter key.

    Only continuously valued parameters are tunable; integer fields such as
    the assessment period are rejected.
    """
    if key in _COST_FIELDS:
        return "cost"
    if key in _LCA_FIELDS:
        return "lca"
    raise UnknownParameterKey(
        f"{key!r} is not a tunable cost or emission-factor parameter"
    )


def draw_parameters(
    mc: McConfig,
    draw_index: int,
    cost_book: CostBook,
    factor_book: EmissionFactorBook,
) -> dict[str, float]:
    """Parameter values for one draw, keyed like the distributions.

    Uses a counter-based generator keyed by (seed, draw index), so any draw
    can be computed independently of the others. Parameters are sampled in
    sorted key order; fixed entries consume no randomness.
    """
    rng = np.random.Generator(np.random.Philox(key=[mc.seed & _SEED_MASK, draw_index]))
    out: dict[str, float] = {}
    for key in sorted(mc.distributions):
        dist = mc.distributions[key]
        book = cost_book if resolve_parameter_key(key) == "cost" else factor_book
        if dist.kind == "fixed":
            out[key] = float(getattr(book, key)) if dist.value is None else dist.value
        elif dist.kind == "uniform":
            out[key] = float(rng.uniform(dist.lo, dist.hi))
        else:
            out[key] = float(rng.triangular(dist.lo, dist.mode, dist.hi))
    return out


@dataclass(frozen=True)
class McSummaryRow:
    metric: str
    decile: int
    level: str
    algorithm: str
    mean: float | None
    p5: float | None
    p50: float | None
    p95: float | None


def _apply_overrides(
    overrides: Mapping[str, float], cost_book: CostBook, factor_book: EmissionFactorBook
) -> tuple[CostBook, EmissionFactorBook]:
    cost_kw = {k: v for k, v in overrides.items() if resolve_parameter_key(k) == "cost"}
    lca_kw = {k: v for k, v in overrides.items() if resolve_parameter_key(k) == "lca"}
    return (
        cost_book.replace(**cost_kw) if cost_kw else cost_book,
        factor_book.replace(**lca_kw) if lca_kw else factor_book,
    )


def monte_carlo(
    units: Sequence[ReportUnit],
    cost_book: CostBook,
    factor_book: EmissionFactorBook,
    mc: McConfig,
) -> list[McSummaryRow]:
    """Distribution summaries of every report metric under parameter draws.

    Designs are fixed; only book parameters vary. Draw d is generated
    independently with key (seed, d), so results do not depend on the order
    draws are evaluated in.
    """
    for key in mc.distributions:
        resolve_parameter_key(key)
    base_rows = build_report(units, cost_book, factor_book)
    if not base_rows:
        return []
    row_keys = [(r.decile, r.level, r.algorithm) for r in base_rows]
    samples = np.empty((mc.draws, len(base_rows), len(MC_METRICS)))
    defined = [
        [getattr(r, metric) is not None for metric in MC_METRICS] for r in base_rows
    ]
    for d in range(mc.draws):
        overrides = draw_parameters(mc, d, cost_book, factor_book)
        cb, fb = _apply_overrides(overrides, cost_book, factor_book)
        rows = build_report(units, cb, fb)
        for i, row in enumerate(rows):
            for j, metric in enumerate(MC_METRICS):
                value = getattr(row, metric)
                samples[d, i, j] = np.nan if value is None else value
    log.info("monte carlo: %d draws over %d rows", mc.draws, len(base_rows))

    summaries: list[McSummaryRow] = []
    for j, metric in enumerate(MC_METRICS):
        for i, (decile, level, algorithm) in enumerate(row_keys):
            if defined[i][j]:
                values = samples[:, i, j]
                mean = float(np.mean(values))
                p5, p50, p95 = (float(p) for p in np.percentile(values, [5.0, 50.0, 95.0]))
            else:
                mean = p5 = p50 = p95 = None
            summaries.append(
                McSummaryRow(
                    metric=metric,
                    decile=decile,
                    level=level,
                    algorithm=algorithm,
                    mean=mean,
                    p5=p5,
                    p50=p50,
                    p95=p95,
                )
            )
    return summaries


# --- emitters ---------------------------------------------------------------

def config_hash(payload: Mapping) -> str:
    """Stable hash of the semantic parameter set (never file paths)."""
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


def _fmt(value: float | int | str | None) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return format(value, ".6g")
    return str(value)


def _atomic_write_text(path: str, text: str) -> None:
    tmp = f"{path}.tmp"
    try:
        with open(tmp, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except OSError as exc:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise IoError(f"cannot write {path}: {exc}") from exc


def emit_csv(rows: Sequence[DecileReportRow], path: str, *, parameters_hash: str) -> None:
    """Write report rows as CSV with a parameters-hash comment header."""
    if not rows:
        raise ValueError("refusing to emit an empty report")
    buf = io.StringIO()
    buf.write(f"# parameters_hash={parameters_hash}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(REPORT_COLUMNS)
    for row in rows:
        writer.writerow([_fmt(getattr(row, col)) for col in REPORT_COLUMNS])
    _atomic_write_text(path, buf.getvalue())
    log.info("wrote %d report rows to %s", len(rows), path)


def emit_mc_csv(rows: Sequence[McSummaryRow], path: str, *, parameters_hash: str) -> None:
    """Write Monte Carlo summaries as CSV with a parameters-hash header."""
    buf = io.StringIO()
    buf.write(f"# parameters_hash={parameters_hash}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(MC_COLUMNS)
    for row in rows:
        writer.writerow([_fmt(getattr(row, col)) for col in MC_COLUMNS])
    _atomic_write_text(path, buf.getvalue())
    log.info("wrote %d mc summary rows to %s", len(rows), path)


def emit_design_geojson(
    results: Sequence[DesignResult],
    path: str,
    *,
    parameters_hash: str,
) -> None:
    """Write designs as a GeoJSON FeatureCollection.

    Each design contributes LineString features per kept edge and Point
    features per terminal (connected or not) and per routing vertex used by
    an edge.
    """
    features: list[dict] = []
    for result in results:
        design = result.design
        algorithm = design.algorithm
        graph = result.graph
        terminal_ids = {v: sid for sid, v in result.terminal_vertex.items()}
        used_vertices: set[int] = set()
        for u, v, w in design.edges:
            used_vertices.update((u, v))
            pu, pv = graph.payloads[u].point, graph.payloads[v].point
            features.append(
                {
                    "type": "Feature",
                    "geometry": {
                        "type": "LineString",
                        "coordinates": [
                            [round(pu.lon, 6), round(pu.lat, 6)],
                            [round(pv.lon, 6), round(pv.lat, 6)],
                        ],
                    },
                    "properties": {
                        "level": result.level,
                        "algorithm": algorithm,
                        "weight_km": float(format(w, ".6g")),
                    },
                }
            )
        point_vertices = sorted(used_vertices | set(terminal_ids))
        for vid in point_vertices:
            payload = graph.payloads[vid]
            sid = terminal_ids.get(vid)
            if sid == result.root_id:
                role = "root"
            elif sid is not None:
                role = "terminal"
            else:
                role = "steiner"
            features.append(
                {
                    "type": "Feature",
                    "geometry": {
                        "type": "Point",
                        "coordinates": [round(payload.point.lon, 6), round(payload.point.lat, 6)],
                    },
                    "properties": {
                        "level": result.level,
                        "algorithm": algorithm,
                        "role": role,
                        "connected": vid in design.connected_vertices,
                        **({"settlement_id": sid} if sid is not None else {}),
                    },
                }
            )
    doc = {
        "type": "FeatureCollection",
        "parameters_hash": parameters_hash,
        "features": features,
    }
    _atomic_write_text(path, json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n")
    log.info("wrote %d geojson features to %s", len(features), path)
