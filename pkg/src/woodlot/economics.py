"""Monetary and volumetric arithmetic: yields, revenues, premiums, NPV.

Volumes are exact rationals internally; revenue is rounded half-up to whole
euros exactly once, at the end, so replays are bit-identical across platforms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import ConfigError, RuleViolation
from .models import TREES_PER_HECTARE, GamePhase, YIELD_PHASES

PULP_PRICE = 20  # EUR per m3, all phases
SAW_PRICE_BY_PHASE = {
    GamePhase.Y30_THINNING: 0,  # first thinning carries no sawwood
    GamePhase.Y45_THINNING: 50,
    GamePhase.Y60_FELLING: 60,
}

_NOMINAL_STANDING = {
    GamePhase.Y30_THINNING: 2000,
    GamePhase.Y45_THINNING: 1000,
    GamePhase.Y60_FELLING: 400,
}
_NOMINAL_REMOVAL = {
    GamePhase.Y30_THINNING: 1000,
    GamePhase.Y45_THINNING: 600,
    GamePhase.Y60_FELLING: 400,
}
_NOMINAL_PULP = {
    GamePhase.Y30_THINNING: 50,
    GamePhase.Y45_THINNING: 50,
    GamePhase.Y60_FELLING: 50,
}
_NOMINAL_SAW = {
    GamePhase.Y30_THINNING: 0,
    GamePhase.Y45_THINNING: 50,
    GamePhase.Y60_FELLING: 150,
}

# Insurance premium by the decision phase in which the policy is bought.
INSURANCE_PREMIUM = {
    GamePhase.Y0_PLANTING: 500,
    GamePhase.Y30_THINNING: 1000,
    GamePhase.Y45_THINNING: 2000,
}


class CashFlowKind(Enum):
    PLANTING = "planting"
    INSURANCE = "insurance"
    LEASE = "lease"
    PARCEL_PURCHASE = "parcel_purchase"
    HARVEST_REVENUE = "harvest_revenue"


@dataclass(frozen=True)
class CashFlow:
    year: int
    amount: int  # signed euros; negative = cost
    kind: CashFlowKind

    def to_doc(self) -> dict:
        return {"year": self.year, "amount": self.amount, "kind": self.kind.value}

    @classmethod
    def from_doc(cls, doc: dict) -> "CashFlow":
        return cls(year=int(doc["year"]), amount=int(doc["amount"]), kind=CashFlowKind(doc["kind"]))


@dataclass(frozen=True)
class YieldSchedule:
    """Per-phase nominal stand density, removal, and assortment volumes."""

    standing_before: Mapping[GamePhase, int] = field(default_factory=lambda: dict(_NOMINAL_STANDING))
    removal: Mapping[GamePhase, int] = field(default_factory=lambda: dict(_NOMINAL_REMOVAL))
    pulp_m3: Mapping[GamePhase, int] = field(default_factory=lambda: dict(_NOMINAL_PULP))
    saw_m3: Mapping[GamePhase, int] = field(default_factory=lambda: dict(_NOMINAL_SAW))

    def validate(self) -> None:
        phases = list(YIELD_PHASES)
        for table in (self.standing_before, self.removal, self.pulp_m3, self.saw_m3):
            missing = [p for p in phases if p not in table]
            if missing:
                raise ConfigError(f"yield schedule missing phases {missing}")
            if any(table[p] < 0 for p in phases):
                raise ConfigError("yield schedule values must be non-negative")
        # Removals must chain the stand down to zero.
        standing = self.standing_before[phases[0]]
        for p in phases:
            if self.standing_before[p] != standing:
                raise ConfigError(
                    f"standing_before[{p.value}]={self.standing_before[p]} breaks the removal chain"
                )
            standing -= self.removal[p]
        if standing != 0:
            raise ConfigError("removals must sum to the initial stand density")

    def to_doc(self) -> dict:
        return {
            "standing_before": {p.value: self.standing_before[p] for p in YIELD_PHASES},
            "removal": {p.value: self.removal[p] for p in YIELD_PHASES},
            "pulp_m3": {p.value: self.pulp_m3[p] for p in YIELD_PHASES},
            "saw_m3": {p.value: self.saw_m3[p] for p in YIELD_PHASES},
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "YieldSchedule":
        def table(name: str, defaults: Mapping[GamePhase, int]) -> dict:
            raw = doc.get(name, {})
            return {p: int(raw.get(p.value, defaults[p])) for p in YIELD_PHASES}

        return cls(
            standing_before=table("standing_before", _NOMINAL_STANDING),
            removal=table("removal", _NOMINAL_REMOVAL),
            pulp_m3=table("pulp_m3", _NOMINAL_PULP),
            saw_m3=table("saw_m3", _NOMINAL_SAW),
        )


@dataclass(frozen=True)
class PriceTable:
    """Unit prices per assortment; the market modifier is applied additively
    to both and the effective price is floored at zero."""

    pulp_price: int = PULP_PRICE
    saw_price: Mapping[GamePhase, int] = field(default_factory=lambda: dict(SAW_PRICE_BY_PHASE))

    def effective_pulp(self, modifier: int = 0) -> int:
        return max(0, self.pulp_price + modifier)

    def effective_saw(self, phase: GamePhase, modifier: int = 0) -> int:
        return max(0, self.saw_price[phase] + modifier)

    def validate(self) -> None:
        if self.pulp_price < 0 or any(v < 0 for v in self.saw_price.values()):
            raise ConfigError("base prices must be non-negative")
        missing = [p for p in YIELD_PHASES if p not in self.saw_price]
        if missing:
            raise ConfigError(f"saw price table missing phases {missing}")

    def to_doc(self) -> dict:
        return {
            "pulp_price": self.pulp_price,
            "saw_price": {p.value: self.saw_price[p] for p in YIELD_PHASES},
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "PriceTable":
        raw = doc.get("saw_price", {})
        saw = {p: int(raw.get(p.value, SAW_PRICE_BY_PHASE[p])) for p in YIELD_PHASES}
        return cls(pulp_price=int(doc.get("pulp_price", PULP_PRICE)), saw_price=saw)


@dataclass
class HarvestResult:
    trees_removed: int
    pulp_m3: Fraction
    saw_m3: Fraction
    revenue: int = 0

    @property
    def total_m3(self) -> Fraction:
        return self.pulp_m3 + self.saw_m3


def round_half_up(value: Fraction) -> int:
    """Round a non-negative rational to the nearest integer, halves up."""
    if value < 0:
        raise ValueError("revenue rounding is defined for non-negative values")
    return math.floor(value + Fraction(1, 2))


def stocking_fraction(
    trees: int, phase: GamePhase, schedule: YieldSchedule = YieldSchedule()
) -> Fraction:
    """Current stocking relative to the nominal pre-phase density, capped at 1.

    Trees left standing by skipped thinnings never boost later harvests
    beyond the nominal schedule.
    """
    if phase not in YIELD_PHASES:
        raise ValueError(f"{phase.value} is not a harvest phase")
    if trees < 0:
        raise ValueError("tree count cannot be negative")
    return min(Fraction(1), Fraction(trees, schedule.standing_before[phase]))


def harvest_yield(
    trees: int, phase: GamePhase, schedule: YieldSchedule = YieldSchedule()
) -> HarvestResult:
    """Volumes and tree removal for harvesting a parcel at ``phase``.

    An empty parcel yields a zero result rather than an error.
    """
    f = stocking_fraction(trees, phase, schedule)
    removed = math.floor(schedule.removal[phase] * f)
    return HarvestResult(
        trees_removed=removed,
        pulp_m3=schedule.pulp_m3[phase] * f,
        saw_m3=schedule.saw_m3[phase] * f,
    )


def harvest_revenue(
    result: HarvestResult,
    phase: GamePhase,
    prices: PriceTable = PriceTable(),
    modifier: int = 0,
    downgraded: bool = False,
) -> int:
    """Euros for a harvest: pulp at the effective pulp price, saw at the
    effective saw price, or the pulp price when the sawwood is downgraded.
    One final half-up rounding to whole euros."""
    pulp_eff = prices.effective_pulp(modifier)
    saw_eff = pulp_eff if downgraded else prices.effective_saw(phase, modifier)
    total = result.pulp_m3 * pulp_eff + result.saw_m3 * saw_eff
    return round_half_up(total)


def insurance_premium(phase: GamePhase) -> int:
    """Premium for buying coverage during ``phase``; rejected at final felling."""
    if phase is GamePhase.Y60_FELLING:
        raise RuleViolation("insurance_window_closed", "no coverage window remains at final felling")
    try:
        return INSURANCE_PREMIUM[phase]
    except KeyError:
        raise RuleViolation("illegal_phase", f"insurance cannot be bought in {phase.value}") from None


def npv(flows: Iterable[CashFlow], rate: float) -> float:
    """Net present value, discounting each flow by (1+rate)**year.

    Returned with 2-decimal precision; at rate 0 this equals the plain sum.
    """
    if rate < 0:
        raise ValueError("discount rate must be non-negative")
    total = math.fsum(flow.amount / (1.0 + rate) ** flow.year for flow in flows)
    return round(total, 2)


def net_cash(flows: Iterable[CashFlow]) -> int:
    return sum(flow.amount for flow in flows)
