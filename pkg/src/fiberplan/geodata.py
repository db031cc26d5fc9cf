"""Geospatial inputs: settlements, existing fiber routes, road networks.

Distances are great-circle kilometres on a spherical Earth. Point-to-polyline
proximity uses a local tangent-plane approximation, which is accurate to well
under a metre at the few-kilometre scales the buffer predicate operates on.
"""

from __future__ import annotations

import csv
import json
import logging
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .errors import DataError

log = logging.getLogger(__name__)

EARTH_RADIUS_KM = 6371.0088

SETTLEMENT_COLUMNS = ("id", "lat", "lon", "population", "region_id", "subregion_id")


class ParseError(DataError):
    """A row or feature could not be parsed."""


class MissingColumn(DataError):
    """A required CSV column is absent."""


class DuplicateId(DataError):
    """Two settlements share an id."""


class CoordinateOutOfRange(DataError):
    """Latitude outside [-90, 90] or longitude outside [-180, 180]."""


class NegativePopulation(DataError):
    """A settlement population is negative."""


class EmptyCollection(DataError):
    """A geometry input contains no usable features."""


class DegenerateGeometry(DataError):
    """A line feature has fewer than two distinct vertices or zero length."""


@dataclass(frozen=True, order=True)
class GeoPoint:
    """A WGS84 coordinate pair in decimal degrees."""

    lat: float
    lon: float


@dataclass(frozen=True)
class Settlement:
    id: str
    location: GeoPoint
    population: int
    region_id: str
    subregion_id: str


@dataclass(frozen=True)
class SettlementSet:
    """Validated settlements with id-unique lookup."""

    settlements: tuple[Settlement, ...]

    def __len__(self) -> int:
        return len(self.settlements)

    def __iter__(self) -> Iterator[Settlement]:
        return iter(self.settlements)

    def by_id(self, settlement_id: str) -> Settlement:
        return self._index()[settlement_id]

    def _index(self) -> dict[str, Settlement]:
        # Built lazily; the set is frozen so the cache cannot go stale.
        cache = getattr(self, "_by_id", None)
        if cache is None:
            cache = {s.id: s for s in self.settlements}
            object.__setattr__(self, "_by_id", cache)
        return cache


@dataclass(frozen=True)
class FiberLineSet:
    """Existing long-haul fiber routes as polylines."""

    lines: tuple[tuple[GeoPoint, ...], ...]


@dataclass(frozen=True)
class RoadGraph:
    """Road network as vertices plus undirected weighted edges.

    Vertices are deduplicated by exact coordinate equality; edge weights are
    great-circle segment lengths in km. Edges are stored with u < v.
    """

    vertices: tuple[GeoPoint, ...]
    edges: tuple[tuple[int, int, float], ...]


def haversine_km(a: GeoPoint, b: GeoPoint) -> float:
    """Great-circle distance between two points in kilometres."""
    phi1 = math.radians(a.lat)
    phi2 = math.radians(b.lat)
    dphi = math.radians(b.lat - a.lat)
    dlam = math.radians(b.lon - a.lon)
    h = math.sin(dphi / 2.0) ** 2 + math.cos(phi1) * math.cos(phi2) * math.sin(dlam / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_KM * math.asin(min(1.0, math.sqrt(h)))


def _local_xy(origin: GeoPoint, p: GeoPoint) -> tuple[float, float]:
    """Project p onto a tangent plane centered at origin (km east, km north)."""
    dlon = p.lon - origin.lon
    # Wrap so a segment crossing the antimeridian projects near the origin.
    if dlon > 180.0:
        dlon -= 360.0
    elif dlon < -180.0:
        dlon += 360.0
    x = math.radians(dlon) * math.cos(math.radians(origin.lat)) * EARTH_RADIUS_KM
    y = math.radians(p.lat - origin.lat) * EARTH_RADIUS_KM
    return x, y


def point_segment_km(p: GeoPoint, a: GeoPoint, b: GeoPoint) -> float:
    """Distance from p to the segment a-b in kilometres."""
    ax, ay = _local_xy(p, a)
    bx, by = _local_xy(p, b)
    dx, dy = bx - ax, by - ay
    seg_sq = dx * dx + dy * dy
    if seg_sq == 0.0:
        return math.hypot(ax, ay)
    # p is the origin of the local frame; project it onto the segment.
    t = -(ax * dx + ay * dy) / seg_sq
    t = max(0.0, min(1.0, t))
    return math.hypot(ax + t * dx, ay + t * dy)


def polyline_length_km(points: Sequence[GeoPoint]) -> float:
    return math.fsum(haversine_km(a, b) for a, b in zip(points, points[1:]))


def within_buffer(point: GeoPoint, lines: FiberLineSet, radius_km: float) -> bool:
    """True when the point lies within radius_km of any polyline."""
    if radius_km < 0:
        raise ValueError(f"radius_km must be >= 0, got {radius_km}")
    for line in lines.lines:
        for a, b in zip(line, line[1:]):
            if point_segment_km(point, a, b) <= radius_km:
                return True
    return False


def _check_coords(lat: float, lon: float, where: str) -> None:
    if not (-90.0 <= lat <= 90.0):
        raise CoordinateOutOfRange(f"{where}: latitude {lat} outside [-90, 90]")
    if not (-180.0 <= lon <= 180.0):
        raise CoordinateOutOfRange(f"{where}: longitude {lon} outside [-180, 180]")


def _build_settlement(
    raw: dict[str, str | float | int], where: str, seen: dict[str, str]
) -> Settlement:
    sid = str(raw["id"]).strip()
    if not sid:
        raise ParseError(f"{where}: empty settlement id")
    if sid in seen:
        raise DuplicateId(f"{where}: duplicate settlement id {sid!r} (first seen at {seen[sid]})")
    seen[sid] = where
    try:
        lat = float(raw["lat"])
        lon = float(raw["lon"])
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{where}: non-numeric coordinate: {exc}") from exc
    _check_coords(lat, lon, where)
    try:
        population = int(raw["population"])
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{where}: non-integer population: {exc}") from exc
    if population < 0:
        raise NegativePopulation(f"{where}: population {population} is negative")
    region_id = str(raw["region_id"]).strip()
    subregion_id = str(raw["subregion_id"]).strip()
    if not region_id or not subregion_id:
        raise ParseError(f"{where}: empty region_id or subregion_id")
    return Settlement(
        id=sid,
        location=GeoPoint(lat, lon),
        population=population,
        region_id=region_id,
        subregion_id=subregion_id,
    )


def load_settlements(path: str, fmt: str = "csv") -> SettlementSet:
    """Load settlements from a CSV table or GeoJSON point collection.

    Args:
        path: input file path.
        fmt: "csv" or "geojson".
    """
    if fmt == "csv":
        settlements = _load_settlements_csv(path)
    elif fmt == "geojson":
        settlements = _load_settlements_geojson(path)
    else:
        raise ValueError(f"unknown settlements format {fmt!r}")
    log.info("loaded %d settlements from %s", len(settlements), path)
    return SettlementSet(settlements=tuple(settlements))


def _load_settlements_csv(path: str) -> list[Settlement]:
    out: list[Settlement] = []
    seen: dict[str, str] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in SETTLEMENT_COLUMNS if c not in header]
        if missing:
            raise MissingColumn(f"{path}: missing columns {', '.join(missing)}")
        for lineno, row in enumerate(reader, start=2):
            out.append(_build_settlement(row, f"{path}:{lineno}", seen))
    return out


def _load_settlements_geojson(path: str) -> list[Settlement]:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    out: list[Settlement] = []
    seen: dict[str, str] = {}
    for i, feature in enumerate(doc.get("features", [])):
        where = f"{path}:feature[{i}]"
        geom = feature.get("geometry") or {}
        if geom.get("type") != "Point":
            raise ParseError(f"{where}: expected Point geometry, got {geom.get('type')!r}")
        lon, lat = geom["coordinates"][:2]
        props = feature.get("properties") or {}
        missing = [k for k in ("id", "population", "region_id", "subregion_id") if k not in props]
        if missing:
            raise MissingColumn(f"{where}: missing properties {', '.join(missing)}")
        raw = {"lat": lat, "lon": lon, **{k: props[k] for k in ("id", "population", "region_id", "subregion_id")}}
        out.append(_build_settlement(raw, where, seen))
    return out


def write_settlements_csv(settlements: SettlementSet, path: str) -> None:
    """Serialize settlements in canonical CSV form (round-trips exactly)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(SETTLEMENT_COLUMNS)
        for s in settlements:
            writer.writerow(
                [s.id, repr(s.location.lat), repr(s.location.lon), s.population, s.region_id, s.subregion_id]
            )


def _iter_polylines(doc: dict, path: str) -> Iterator[tuple[str, list[list[float]]]]:
    """Yield (where, coordinate list) for each LineString, flattening MultiLineStrings."""
    for i, feature in enumerate(doc.get("features", [])):
        where = f"{path}:feature[{i}]"
        geom = feature.get("geometry") or {}
        gtype = geom.get("type")
        if gtype == "LineString":
            yield where, geom["coordinates"]
        elif gtype == "MultiLineString":
            for j, part in enumerate(geom["coordinates"]):
                yield f"{where}[{j}]", part
        else:
            raise ParseError(f"{where}: expected LineString/MultiLineString, got {gtype!r}")


def _parse_polyline(where: str, coords: list[list[float]]) -> tuple[GeoPoint, ...]:
    if len(coords) < 2:
        raise DegenerateGeometry(f"{where}: polyline needs at least 2 vertices, got {len(coords)}")
    points = []
    for c in coords:
        lon, lat = c[:2]
        _check_coords(lat, lon, where)
        points.append(GeoPoint(float(lat), float(lon)))
    line = tuple(points)
    if polyline_length_km(line) == 0.0:
        raise DegenerateGeometry(f"{where}: polyline has zero length")
    return line


def load_fiber_lines(path: str) -> FiberLineSet:
    """Load existing fiber routes from a GeoJSON line collection."""
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    lines = [_parse_polyline(where, coords) for where, coords in _iter_polylines(doc, path)]
    if not lines:
        raise EmptyCollection(f"{path}: no line features")
    log.info("loaded %d fiber polylines from %s", len(lines), path)
    return FiberLineSet(lines=tuple(lines))


def load_road_graph(path: str) -> RoadGraph:
    """Load a road network from GeoJSON lines into a weighted graph.

    Consecutive polyline vertices become edges weighted by great-circle
    length. Coincident endpoints across features share a vertex, which is how
    separate road features connect into one network.
    """
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    vertex_ids: dict[GeoPoint, int] = {}
    vertices: list[GeoPoint] = []
    edge_weights: dict[tuple[int, int], float] = {}
    n_lines = 0
    for where, coords in _iter_polylines(doc, path):
        line = _parse_polyline(where, coords)
        n_lines += 1
        for a, b in zip(line, line[1:]):
            if a == b:
                continue  # zero-length segment contributes nothing
            for p in (a, b):
                if p not in vertex_ids:
                    vertex_ids[p] = len(vertices)
                    vertices.append(p)
            u, v = vertex_ids[a], vertex_ids[b]
            if u > v:
                u, v = v, u
            w = haversine_km(a, b)
            prev = edge_weights.get((u, v))
            if prev is None or w < prev:
                edge_weights[(u, v)] = w
    if n_lines == 0:
        raise EmptyCollection(f"{path}: no line features")
    edges = tuple((u, v, w) for (u, v), w in sorted(edge_weights.items()))
    log.info(
        "loaded road graph from %s: %d vertices, %d edges", path, len(vertices), len(edges)
    )
    return RoadGraph(vertices=tuple(vertices), edges=edges)
