"""Post-game scoring: the eight per-player outcome indicators and the 1-100
cross-player scaling, packaged as a reproducible score report.

Indicators come either from the built-in coefficient surrogate (documented,
configurable, clearly flagged) or from an external simulation imported
through the published indicator document schema.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Iterable, Mapping, Optional

from . import economics, engine
from .canon import canonical_dumps
from .config import CoefficientTable, INDICATOR_FIELDS
from .errors import SchemaError
from .models import DecisionLog, GamePhase, GameState

REPORT_FORMAT = "woodlot-report/1"
IMPORT_FORMAT = "woodlot-indicators/1"

INDICATOR_UNITS = {
    "tree_biomass_carbon": "tC",
    "total_soil_carbon": "tC",
    "ecosystem_carbon": "tC",
    "wood_products_carbon": "tC",
    "timber": "m3",
    "deadwood": "m3",
    "soil_water": "index",
    "net_present_value": "EUR",
}

# Scaling direction per indicator; every default indicator is higher-is-better.
DEFAULT_DIRECTIONS = {name: "higher" for name in INDICATOR_FIELDS}


@dataclass
class IndicatorVector:
    tree_biomass_carbon: float = 0.0
    total_soil_carbon: float = 0.0
    ecosystem_carbon: float = 0.0
    wood_products_carbon: float = 0.0
    timber: float = 0.0
    deadwood: float = 0.0
    soil_water: float = 0.0
    net_present_value: float = 0.0

    def to_doc(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in INDICATOR_FIELDS}

    @classmethod
    def from_doc(cls, doc: Mapping[str, Any]) -> "IndicatorVector":
        missing = [name for name in INDICATOR_FIELDS if name not in doc]
        if missing:
            raise SchemaError(f"indicator document missing field {missing[0]!r}")
        unknown = set(doc) - set(INDICATOR_FIELDS)
        if unknown:
            raise SchemaError(f"unknown indicator field {sorted(unknown)[0]!r}")
        values = {}
        for name in INDICATOR_FIELDS:
            try:
                value = float(doc[name])
            except (TypeError, ValueError) as exc:
                raise SchemaError(f"indicator {name!r} is not a number") from exc
            if not math.isfinite(value):
                raise SchemaError(f"indicator {name!r} must be finite, got {value}")
            values[name] = value
        return cls(**values)


def indicators_from_state(
    state: GameState, coeffs: Optional[CoefficientTable] = None
) -> dict[int, IndicatorVector]:
    """Surrogate indicators computed from a final (or partial) game state.

    Harvest-driven indicators are attributed to the player who harvested;
    stock indicators are summed over the parcels each player manages at the
    end of the log.
    """
    coeffs = coeffs or state.config.coefficients
    vectors: dict[int, IndicatorVector] = {}
    for player in state.players:
        saw = float(player.timber_saw)
        timber = float(player.timber_pulp + player.timber_saw)

        biomass_carbon = 0.0
        soil_carbon = 0.0
        soil_water = 0.0
        deadwood = 0.0
        for pid in sorted(player.managed):
            parcel = state.parcel(pid)
            parcel_deadwood = sum(
                rec.trees
                * (
                    coeffs.tree_volume_young
                    if rec.phase is GamePhase.RISK_0
                    else coeffs.tree_volume_mature
                )
                for rec in parcel.losses
            )
            deadwood += parcel_deadwood
            biomass_carbon += coeffs.carbon_per_m3 * parcel.trees * coeffs.tree_volume_mature
            soil_carbon += (
                coeffs.soil_carbon_base
                + coeffs.soil_carbon_deadwood_gain * parcel_deadwood
                - coeffs.soil_carbon_removal_loss * float(parcel.removed_m3)
            )
            cleared_by_harvest = (
                parcel.species is not None and parcel.trees == 0 and parcel.harvested_trees > 0
            )
            soil_water += coeffs.soil_water_base - (
                coeffs.soil_water_felling_penalty if cleared_by_harvest else 0.0
            )

        vectors[player.id] = IndicatorVector(
            tree_biomass_carbon=biomass_carbon,
            total_soil_carbon=soil_carbon,
            ecosystem_carbon=biomass_carbon + soil_carbon + coeffs.carbon_per_m3 * deadwood,
            wood_products_carbon=coeffs.carbon_per_m3 * saw,
            timber=timber,
            deadwood=deadwood,
            soil_water=soil_water,
            net_present_value=economics.npv(player.flows, state.config.discount_rate),
        )
    return vectors


def compute_indicators(
    log: DecisionLog, coeffs: Optional[CoefficientTable] = None
) -> dict[int, IndicatorVector]:
    """Replay a decision log and compute surrogate indicators per player."""
    state = engine.replay(log)
    return indicators_from_state(state, coeffs)


def import_external_indicators(
    doc: Mapping[str, Any], log: DecisionLog
) -> dict[int, IndicatorVector]:
    """Validate an externally simulated indicator document against the log's
    roster and return its values verbatim."""
    if doc.get("format") != IMPORT_FORMAT:
        raise SchemaError(f"unsupported indicator format {doc.get('format')!r}")
    units = doc.get("units")
    if units is not None:
        for name, unit in units.items():
            if name not in INDICATOR_UNITS:
                raise SchemaError(f"unknown indicator field {name!r} in units")
            if unit != INDICATOR_UNITS[name]:
                raise SchemaError(
                    f"unit mismatch for {name!r}: expected {INDICATOR_UNITS[name]!r}, got {unit!r}"
                )
    entries = doc.get("players")
    if not isinstance(entries, list):
        raise SchemaError("indicator document needs a 'players' list")
    roster_ids = {p["id"] for p in log.header.get("players", [])}
    vectors: dict[int, IndicatorVector] = {}
    for entry in entries:
        pid = entry.get("id")
        if pid not in roster_ids:
            raise SchemaError(f"player id {pid!r} is not in the game log")
        if pid in vectors:
            raise SchemaError(f"duplicate indicators for player {pid}")
        vectors[pid] = IndicatorVector.from_doc(entry.get("indicators", {}))
    missing = roster_ids - set(vectors)
    if missing:
        raise SchemaError(f"indicator document missing player {sorted(missing)[0]}")
    return vectors


def scale_1_100(
    vectors: Mapping[int, IndicatorVector],
    directions: Optional[Mapping[str, str]] = None,
) -> dict[int, IndicatorVector]:
    """Min-max scale each indicator to [1, 100] across players.

    The best value maps to 100 and the worst to 1; when all players tie
    (including the single-player case) everyone receives 100. ``directions``
    may mark individual indicators as ``"lower"``-is-better.
    """
    if not vectors:
        raise ValueError("need at least one player to scale")
    directions = {**DEFAULT_DIRECTIONS, **(directions or {})}
    scaled = {pid: IndicatorVector() for pid in vectors}
    for name in INDICATOR_FIELDS:
        values = {pid: getattr(vec, name) for pid, vec in vectors.items()}
        lo, hi = min(values.values()), max(values.values())
        for pid, value in values.items():
            if hi == lo:
                score = 100.0
            else:
                # Divide before multiplying so the endpoints map to exactly
                # 1 and 100; clamp interior round-off just in case.
                if directions.get(name) == "lower":
                    ratio = (hi - value) / (hi - lo)
                else:
                    ratio = (value - lo) / (hi - lo)
                score = 1.0 + 99.0 * ratio
            setattr(scaled[pid], name, min(100.0, max(1.0, score)))
    return scaled


@dataclass
class ScoreReport:
    """Per-player raw and scaled indicators plus the cash-flow ledger,
    reproducible from (log, coefficients)."""

    source: str  # "surrogate" or "imported"
    log_digest: str
    coefficients: CoefficientTable
    directions: dict[str, str]
    players: list[dict[str, Any]]

    def to_doc(self) -> dict[str, Any]:
        return {
            "format": REPORT_FORMAT,
            "source": self.source,
            "log_digest": self.log_digest,
            "coefficients": self.coefficients.to_doc(),
            "directions": dict(sorted(self.directions.items())),
            "units": dict(sorted(INDICATOR_UNITS.items())),
            "players": self.players,
        }

    def canonical(self) -> str:
        return canonical_dumps(self.to_doc())

    def raw_vector(self, player_id: int) -> IndicatorVector:
        entry = next(p for p in self.players if p["id"] == player_id)
        return IndicatorVector.from_doc(entry["raw"])


def build_report(
    log: DecisionLog,
    coeffs: Optional[CoefficientTable] = None,
    imported: Optional[Mapping[str, Any]] = None,
    directions: Optional[Mapping[str, str]] = None,
    state: Optional[GameState] = None,
) -> ScoreReport:
    """Assemble the score report from a log, either via the surrogate model
    or from an imported indicator document.

    ``state`` may pass the already-replayed final state to skip a redundant
    replay; it must be the state the log produces.
    """
    if state is None:
        state = engine.replay(log)
    coeffs = coeffs or state.config.coefficients
    if imported is not None:
        vectors = import_external_indicators(imported, log)
        source = "imported"
    else:
        vectors = indicators_from_state(state, coeffs)
        source = "surrogate"
    directions = {**DEFAULT_DIRECTIONS, **(directions or {})}
    scaled = scale_1_100(vectors, directions)
    players = [
        {
            "id": player.id,
            "seat": player.seat,
            "name": player.name,
            "raw": vectors[player.id].to_doc(),
            "scaled": scaled[player.id].to_doc(),
            "cash": player.cash,
            "cash_flows": [f.to_doc() for f in player.flows],
        }
        for player in state.players
    ]
    return ScoreReport(
        source=source,
        log_digest=log.digest(),
        coefficients=coeffs,
        directions=dict(directions),
        players=players,
    )
