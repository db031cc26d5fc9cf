"""Demand modelling: subregion densities, decile geotypes, potential users.

Subregions are ranked by population density (densest first) and split into
ten equal-count deciles; when the count is not divisible by ten, the denser
deciles absorb the remainder. Potential users per km2 follow a flat adoption
rate applied above a minimum-density cutoff.
"""

from __future__ import annotations

import csv
import io
import logging
import math
import os
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import DataError, OutputError

log = logging.getLogger(__name__)

AREA_COLUMNS = ("subregion_id", "area_km2")

DEMAND_COLUMNS = (
    "subregion_id",
    "area_km2",
    "population",
    "density_per_km2",
    "decile",
    "users_per_km2",
)

# Density floors (per km2) of deciles 1..9 for the band-based fallback used
# when a scenario has too few subregions for an equal-count split; anything
# below the last floor is decile 10.
DENSITY_BAND_FLOORS = (958.0, 456.0, 273.0, 172.0, 107.0, 64.0, 40.0, 22.0, 10.0)


class ZeroArea(DataError):
    """A subregion area is zero or negative."""


class TooFewSubregions(DataError):
    """Fewer than ten subregions; an equal-count decile split is undefined."""


@dataclass(frozen=True)
class AdoptionScenario:
    """Flat adoption assumption: fraction of population that subscribes."""

    adoption_rate: float
    min_density_per_km2: float = 0.0

    def __post_init__(self) -> None:
        if not 0.0 < self.adoption_rate <= 1.0:
            raise ValueError(f"adoption_rate must be in (0, 1], got {self.adoption_rate}")
        if self.min_density_per_km2 < 0.0:
            raise ValueError(f"min_density_per_km2 must be >= 0, got {self.min_density_per_km2}")


@dataclass(frozen=True)
class SubregionDemand:
    subregion_id: str
    area_km2: float
    population: int
    density_per_km2: float
    decile: int
    users_per_km2: float


def population_density(population: int, area_km2: float) -> float:
    """People per km2; rejects non-positive areas."""
    if area_km2 <= 0.0:
        raise ZeroArea(f"area must be positive, got {area_km2}")
    if population < 0:
        raise ValueError(f"population must be >= 0, got {population}")
    return population / area_km2


def potential_users(density_per_km2: float, scenario: AdoptionScenario) -> float:
    """Potential users per km2 at the scenario's adoption rate.

    Densities at or below the minimum-density cutoff yield zero.
    """
    if density_per_km2 <= scenario.min_density_per_km2:
        return 0.0
    return density_per_km2 * scenario.adoption_rate


def decile_for_density(density_per_km2: float) -> int:
    """Decile from fixed density bands (fallback for small scenarios)."""
    for i, floor in enumerate(DENSITY_BAND_FLOORS, start=1):
        if density_per_km2 >= floor:
            return i
    return 10


def assign_deciles(
    subregions: Iterable[tuple[str, int, float]],
    scenario: AdoptionScenario | None = None,
) -> list[SubregionDemand]:
    """Rank subregions by density and split into ten equal-count deciles.

    Args:
        subregions: (subregion_id, population, area_km2) triples.
        scenario: when given, fills users_per_km2; otherwise it is 0.

    Returns:
        SubregionDemand records sorted density-descending (ties by
        subregion_id ascending), decile 1 = densest. With n = 10q + r
        subregions, the first r deciles hold q + 1 subregions each.
    """
    rows = list(subregions)
    if len(rows) < 10:
        raise TooFewSubregions(f"need at least 10 subregions for deciles, got {len(rows)}")
    seen: set[str] = set()
    ranked: list[tuple[float, str, int, float]] = []
    for sid, population, area in rows:
        if sid in seen:
            raise DataError(f"duplicate subregion_id {sid!r}")
        seen.add(sid)
        ranked.append((population_density(population, area), sid, population, area))
    ranked.sort(key=lambda t: (-t[0], t[1]))

    n = len(ranked)
    q, r = divmod(n, 10)
    out: list[SubregionDemand] = []
    index = 0
    for decile in range(1, 11):
        size = q + (1 if decile <= r else 0)
        for _ in range(size):
            density, sid, population, area = ranked[index]
            users = potential_users(density, scenario) if scenario is not None else 0.0
            out.append(
                SubregionDemand(
                    subregion_id=sid,
                    area_km2=area,
                    population=population,
                    density_per_km2=density,
                    decile=decile,
                    users_per_km2=users,
                )
            )
            index += 1
    log.info("assigned deciles for %d subregions", n)
    return out


def band_demand(
    subregions: Iterable[tuple[str, int, float]],
    scenario: AdoptionScenario | None = None,
) -> list[SubregionDemand]:
    """Demand records with band-based deciles (no minimum subregion count)."""
    out = []
    seen: set[str] = set()
    for sid, population, area in subregions:
        if sid in seen:
            raise DataError(f"duplicate subregion_id {sid!r}")
        seen.add(sid)
        density = population_density(population, area)
        users = potential_users(density, scenario) if scenario is not None else 0.0
        out.append(
            SubregionDemand(
                subregion_id=sid,
                area_km2=area,
                population=population,
                density_per_km2=density,
                decile=decile_for_density(density),
                users_per_km2=users,
            )
        )
    out.sort(key=lambda d: (-d.density_per_km2, d.subregion_id))
    return out


def users_for_node(demand: SubregionDemand) -> float:
    """Total potential users in a subregion (users/km2 times area)."""
    return demand.users_per_km2 * demand.area_km2


def load_area_table(path: str) -> dict[str, float]:
    """Load subregion areas from a CSV with columns subregion_id,area_km2."""
    try:
        fh = open(path, newline="", encoding="utf-8-sig")
    except OSError as exc:
        raise DataError(f"cannot read area table {path}: {exc}") from exc
    with fh:
        reader = csv.DictReader(fh)
        missing = set(AREA_COLUMNS) - set(reader.fieldnames or ())
        if missing:
            raise DataError(f"{path}: missing columns {sorted(missing)}")
        out: dict[str, float] = {}
        for lineno, row in enumerate(reader, start=2):
            sid = (row.get("subregion_id") or "").strip()
            if not sid:
                raise DataError(f"{path}:{lineno}: empty subregion_id")
            if sid in out:
                raise DataError(f"{path}:{lineno}: duplicate subregion_id {sid!r}")
            raw_area = row.get("area_km2")
            try:
                area = float(raw_area)
            except (TypeError, ValueError) as exc:
                raise DataError(f"{path}:{lineno}: bad area_km2 {raw_area!r}") from exc
            if not math.isfinite(area) or area <= 0:
                raise ZeroArea(f"{path}:{lineno}: area_km2 must be positive, got {area}")
            out[sid] = area
    if not out:
        raise DataError(f"{path}: area table has no rows")
    return out


def write_demand_csv(demands: Sequence[SubregionDemand], path: str) -> None:
    """Serialize demand records with 6-significant-digit floats."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(DEMAND_COLUMNS)
    for d in demands:
        writer.writerow(
            [
                d.subregion_id,
                format(d.area_km2, ".6g"),
                d.population,
                format(d.density_per_km2, ".6g"),
                d.decile,
                format(d.users_per_km2, ".6g"),
            ]
        )
    tmp = f"{path}.tmp"
    try:
        with open(tmp, "w", newline="", encoding="utf-8") as fh:
            fh.write(buf.getvalue())
        os.replace(tmp, path)
    except OSError as exc:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise OutputError(f"cannot write demand table {path}: {exc}") from exc
