"""Network cost model: capex, discounted opex, and per-user TCO metrics.

Capex prices terminal nodes (equipment, civil works, routing and
distribution hardware) per node and fiber (transport plus installation) per
km. Opex is an annual stream discounted over the assessment period,
inclusive of year zero. Per-user metrics divide by the potential-user count
and are marked undefined (None) rather than infinite when it is zero.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

from .netdesign import NetworkDesign


@dataclass(frozen=True)
class CostBook:
    """Unit costs and financial parameters.

    Per-node costs are USD per terminal node, per-km costs USD per km of
    fiber, opex items USD per network per year. carbon_price_usd_per_tonne
    monetizes emissions downstream.
    """

    c_olt: float = 28_000.0
    c_civil: float = 120_000.0
    c_rpu: float = 11_000.0
    c_odf: float = 18_000.0
    c_splt: float = 0.0
    c_trans: float = 600.0
    c_inst: float = 6_000.0
    o_rent: float = 11_000.0
    o_staff: float = 150_000.0
    o_pwr: float = 1_000.0
    o_reg: float = 60_000.0
    o_acq: float = 120_000.0
    o_other: float = 180_000.0
    discount_rate: float = 0.0833
    assessment_years: int = 30
    carbon_price_usd_per_tonne: float = 75.0

    def __post_init__(self) -> None:
        for name in (
            "c_olt",
            "c_civil",
            "c_rpu",
            "c_odf",
            "c_splt",
            "c_trans",
            "c_inst",
            "o_rent",
            "o_staff",
            "o_pwr",
            "o_reg",
            "o_acq",
            "o_other",
            "carbon_price_usd_per_tonne",
        ):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0, got {getattr(self, name)}")
        if not 0.0 <= self.discount_rate < 1.0:
            raise ValueError(f"discount_rate must be in [0, 1), got {self.discount_rate}")
        if self.assessment_years < 1:
            raise ValueError(f"assessment_years must be >= 1, got {self.assessment_years}")

    @property
    def per_node_cost(self) -> float:
        return self.c_olt + self.c_civil + self.c_rpu + self.c_odf + self.c_splt

    @property
    def per_km_cost(self) -> float:
        return self.c_trans + self.c_inst

    @property
    def annual_opex(self) -> float:
        return self.o_rent + self.o_staff + self.o_pwr + self.o_reg + self.o_acq + self.o_other

    def replace(self, **overrides: float) -> "CostBook":
        return dataclasses.replace(self, **overrides)


@dataclass(frozen=True)
class CostBreakdown:
    """Priced design with per-user derivatives (None when users == 0)."""

    capex_usd: float
    opex_npv_usd: float
    tco_usd: float
    users: float
    tco_per_user_usd: float | None
    annualized_per_user_usd: float | None
    monthly_per_user_usd: float | None


def capex_quantities(node_count: int, length_km: float, book: CostBook) -> float:
    """Capex for raw quantities: node_count terminals and length_km fiber."""
    if node_count < 0:
        raise ValueError(f"node_count must be >= 0, got {node_count}")
    if length_km < 0:
        raise ValueError(f"length_km must be >= 0, got {length_km}")
    return node_count * book.per_node_cost + length_km * book.per_km_cost


def capex(design: NetworkDesign, book: CostBook) -> float:
    """Capital expenditure of a design: per-node plus per-km costs."""
    return capex_quantities(design.terminal_node_count, design.total_length_km, book)


def opex_npv(book: CostBook) -> float:
    """Present value of the annual opex stream over years 0..n inclusive."""
    r = book.discount_rate
    annual = book.annual_opex
    return math.fsum(annual / (1.0 + r) ** y for y in range(book.assessment_years + 1))


def tco(design: NetworkDesign, book: CostBook, users: float) -> CostBreakdown:
    """Total cost of ownership with per-user annualized and monthly views."""
    return tco_quantities(
        design.terminal_node_count, design.total_length_km, book, users
    )


def tco_quantities(
    node_count: int, length_km: float, book: CostBook, users: float, *, opex_share: float = 1.0
) -> CostBreakdown:
    """TCO from raw quantities; opex_share scales the opex stream for
    designs whose operating cost is split across several reporting units."""
    if users < 0:
        raise ValueError(f"users must be >= 0, got {users}")
    if not 0.0 <= opex_share <= 1.0:
        raise ValueError(f"opex_share must be in [0, 1], got {opex_share}")
    cap = capex_quantities(node_count, length_km, book)
    opex = opex_npv(book) * opex_share
    total = cap + opex
    if users == 0:
        per_user = annualized = monthly = None
    else:
        per_user = total / users
        annualized = per_user / book.assessment_years
        monthly = annualized / 12.0
    return CostBreakdown(
        capex_usd=cap,
        opex_npv_usd=opex,
        tco_usd=total,
        users=users,
        tco_per_user_usd=per_user,
        annualized_per_user_usd=annualized,
        monthly_per_user_usd=monthly,
    )
