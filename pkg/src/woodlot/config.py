"""Game configuration: rule constants, deck composition, scoring coefficients.

Defaults are embedded; everything is overridable through a JSON config
document (``woodlot-config/1``) so rule variants and surrogate coefficients
stay out of the code.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Any, Mapping, Optional

from .economics import PriceTable, YieldSchedule
from .errors import ConfigError
from .models import PARCEL_COUNT

CONFIG_FORMAT = "woodlot-config/1"

# Default multi-risk deck composition (card kind -> count), 20 cards.
DEFAULT_DECK_SPEC: dict[str, int] = {
    "mammal": 4,
    "beetle": 4,
    "storm": 3,
    "root_rot": 3,
    "price_up": 3,
    "price_down": 3,
}

INDICATOR_FIELDS = (
    "tree_biomass_carbon",
    "total_soil_carbon",
    "ecosystem_carbon",
    "wood_products_carbon",
    "timber",
    "deadwood",
    "soil_water",
    "net_present_value",
)


@dataclass(frozen=True)
class CoefficientTable:
    """Surrogate scoring coefficients.

    These stand in for an external process-based ecosystem simulator; they are
    deliberately simple, configurable, and echoed verbatim into every score
    report so nobody mistakes them for measured values.
    """

    carbon_per_m3: float = 0.2  # tC per m3 of stemwood
    tree_volume_mature: float = 0.5  # m3 per tree from the second era on
    tree_volume_young: float = 0.05  # m3 per tree lost before first thinning
    soil_carbon_base: float = 70.0  # tC per hectare
    soil_carbon_deadwood_gain: float = 0.05  # tC per m3 of deadwood retained
    soil_carbon_removal_loss: float = 0.02  # tC per m3 removed in harvest
    soil_water_base: float = 100.0  # index points per hectare
    soil_water_felling_penalty: float = 5.0  # per parcel cleared by harvest

    def validate(self) -> None:
        for name, value in self.to_doc().items():
            if value < 0:
                raise ConfigError(f"coefficient {name} must be non-negative, got {value}")

    def to_doc(self) -> dict[str, float]:
        return {
            "carbon_per_m3": self.carbon_per_m3,
            "tree_volume_mature": self.tree_volume_mature,
            "tree_volume_young": self.tree_volume_young,
            "soil_carbon_base": self.soil_carbon_base,
            "soil_carbon_deadwood_gain": self.soil_carbon_deadwood_gain,
            "soil_carbon_removal_loss": self.soil_carbon_removal_loss,
            "soil_water_base": self.soil_water_base,
            "soil_water_felling_penalty": self.soil_water_felling_penalty,
        }

    @classmethod
    def from_doc(cls, doc: Mapping[str, Any]) -> "CoefficientTable":
        known = cls().to_doc()
        unknown = set(doc) - set(known)
        if unknown:
            raise ConfigError(f"unknown coefficients: {sorted(unknown)}")
        merged = {**known, **{k: float(v) for k, v in doc.items()}}
        table = cls(**merged)
        table.validate()
        return table


@dataclass(frozen=True)
class GameConfig:
    players: int = 4
    seed: int = 0
    start_cash: int = 8000
    parcels_per_player: int = 10
    planting_cost: int = 1000
    unowned_parcel_price: int = 1500
    discount_rate: float = 0.03
    storm_severity: float = 0.40
    deck_spec: Mapping[str, int] = field(default_factory=lambda: dict(DEFAULT_DECK_SPEC))
    coefficients: CoefficientTable = field(default_factory=CoefficientTable)
    prices: PriceTable = field(default_factory=PriceTable)
    yields: YieldSchedule = field(default_factory=YieldSchedule)
    player_names: Optional[tuple[str, ...]] = None

    def validate(self) -> None:
        if not 1 <= self.players <= 4:
            raise ConfigError(f"player count must be 1..4, got {self.players}")
        if self.parcels_per_player < 0:
            raise ConfigError("parcels_per_player must be non-negative")
        if self.players * self.parcels_per_player > PARCEL_COUNT:
            raise ConfigError(
                f"{self.players} players x {self.parcels_per_player} parcels "
                f"exceeds the {PARCEL_COUNT}-parcel board"
            )
        for name in ("start_cash", "planting_cost", "unowned_parcel_price"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be non-negative")
        if self.discount_rate < 0:
            raise ConfigError("discount_rate must be non-negative")
        if not 0.0 <= self.storm_severity <= 1.0:
            raise ConfigError("storm_severity must be within [0, 1]")
        if not self.deck_spec or sum(self.deck_spec.values()) < 1:
            raise ConfigError("deck must contain at least one card")
        if any(count < 0 for count in self.deck_spec.values()):
            raise ConfigError("deck counts must be non-negative")
        if self.player_names is not None and len(self.player_names) != self.players:
            raise ConfigError("player_names length must match player count")
        self.coefficients.validate()
        self.prices.validate()
        self.yields.validate()

    def name_for(self, seat: int) -> str:
        if self.player_names is not None:
            return self.player_names[seat]
        return f"P{seat + 1}"

    def with_seed(self, seed: int) -> "GameConfig":
        return replace(self, seed=seed)

    def to_doc(self) -> dict[str, Any]:
        doc: dict[str, Any] = {
            "format": CONFIG_FORMAT,
            "players": self.players,
            "seed": self.seed,
            "start_cash": self.start_cash,
            "parcels_per_player": self.parcels_per_player,
            "planting_cost": self.planting_cost,
            "unowned_parcel_price": self.unowned_parcel_price,
            "discount_rate": self.discount_rate,
            "storm_severity": self.storm_severity,
            "deck": {k: v for k, v in sorted(self.deck_spec.items())},
            "coefficients": self.coefficients.to_doc(),
            "prices": self.prices.to_doc(),
            "yields": self.yields.to_doc(),
        }
        if self.player_names is not None:
            doc["player_names"] = list(self.player_names)
        return doc

    @classmethod
    def from_doc(cls, doc: Mapping[str, Any]) -> "GameConfig":
        """Build a config from a (possibly partial) document; unspecified
        fields keep their defaults."""
        fmt = doc.get("format", CONFIG_FORMAT)
        if fmt != CONFIG_FORMAT:
            raise ConfigError(f"unsupported config format {fmt!r}")
        base = cls()
        names = doc.get("player_names")
        config = cls(
            players=int(doc.get("players", base.players)),
            seed=int(doc.get("seed", base.seed)),
            start_cash=int(doc.get("start_cash", base.start_cash)),
            parcels_per_player=int(doc.get("parcels_per_player", base.parcels_per_player)),
            planting_cost=int(doc.get("planting_cost", base.planting_cost)),
            unowned_parcel_price=int(doc.get("unowned_parcel_price", base.unowned_parcel_price)),
            discount_rate=float(doc.get("discount_rate", base.discount_rate)),
            storm_severity=float(doc.get("storm_severity", base.storm_severity)),
            deck_spec={str(k): int(v) for k, v in doc.get("deck", DEFAULT_DECK_SPEC).items()},
            coefficients=CoefficientTable.from_doc(doc.get("coefficients", {})),
            prices=PriceTable.from_doc(doc.get("prices", {})),
            yields=YieldSchedule.from_doc(doc.get("yields", {})),
            player_names=tuple(names) if names is not None else None,
        )
        config.validate()
        return config
