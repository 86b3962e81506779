"""Core game data model: board, players, phases, actions, and the decision log.

All monetary amounts are integer euros and all tree counts are integers, so
state snapshots serialize canonically. Harvested timber volumes are tracked
as exact rationals (``Fraction``) and serialized as ``"num/den"`` strings to
keep digests platform-independent.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import TYPE_CHECKING, Any, Optional

from .canon import canonical_dumps, sha256_hex
from .errors import LogValidationError

if TYPE_CHECKING:
    from .config import GameConfig
    from .economics import CashFlow
    from .risk import Deck

PARCEL_COUNT = 40
TREES_PER_HECTARE = 2000
TREES_PER_PIN = 400
PINS_PER_PARCEL = TREES_PER_HECTARE // TREES_PER_PIN
LOG_FORMAT = "woodlot-log/1"


class Species(Enum):
    PINE = "pine"
    SPRUCE = "spruce"
    BIRCH = "birch"


# Board display colors, one per species.
SPECIES_COLOR = {
    Species.PINE: "red",
    Species.SPRUCE: "green",
    Species.BIRCH: "white",
}


class GamePhase(Enum):
    SETUP = "setup"
    Y0_PLANTING = "y0_planting"
    RISK_0 = "risk_0"
    Y30_THINNING = "y30_thinning"
    RISK_30 = "risk_30"
    Y45_THINNING = "y45_thinning"
    RISK_45 = "risk_45"
    Y60_FELLING = "y60_felling"
    SCORING = "scoring"
    FINISHED = "finished"


PHASE_ORDER: tuple[GamePhase, ...] = tuple(GamePhase)
DECISION_PHASES = (
    GamePhase.Y0_PLANTING,
    GamePhase.Y30_THINNING,
    GamePhase.Y45_THINNING,
    GamePhase.Y60_FELLING,
)
YIELD_PHASES = (
    GamePhase.Y30_THINNING,
    GamePhase.Y45_THINNING,
    GamePhase.Y60_FELLING,
)
RISK_PHASES = (GamePhase.RISK_0, GamePhase.RISK_30, GamePhase.RISK_45)

# Game-clock year of each phase, used to date cash flows.
PHASE_YEAR = {
    GamePhase.SETUP: 0,
    GamePhase.Y0_PLANTING: 0,
    GamePhase.RISK_0: 0,
    GamePhase.Y30_THINNING: 30,
    GamePhase.RISK_30: 30,
    GamePhase.Y45_THINNING: 45,
    GamePhase.RISK_45: 45,
    GamePhase.Y60_FELLING: 60,
    GamePhase.SCORING: 60,
    GamePhase.FINISHED: 60,
}


def phase_index(phase: GamePhase) -> int:
    return PHASE_ORDER.index(phase)


def next_phase(phase: GamePhase) -> GamePhase:
    idx = phase_index(phase)
    if idx + 1 >= len(PHASE_ORDER):
        raise ValueError("no phase after finished")
    return PHASE_ORDER[idx + 1]


class ActionKind(Enum):
    PLANT = "plant"
    BUY_INSURANCE = "buy_insurance"
    LEASE_OFFER = "lease_offer"
    LEASE_ACCEPT = "lease_accept"
    BUY_PARCEL = "buy_parcel"
    HARVEST = "harvest"
    SKIP = "skip"
    PASS = "pass"


@dataclass
class Action:
    """A player decision. ``actor`` is the player id taking the action."""

    actor: int
    kind: ActionKind
    parcel: Optional[int] = None
    species: Optional[Species] = None
    price: Optional[int] = None
    offer: Optional[int] = None

    def to_doc(self) -> dict[str, Any]:
        doc: dict[str, Any] = {"actor": self.actor, "kind": self.kind.value}
        if self.parcel is not None:
            doc["parcel"] = self.parcel
        if self.species is not None:
            doc["species"] = self.species.value
        if self.price is not None:
            doc["price"] = self.price
        if self.offer is not None:
            doc["offer"] = self.offer
        return doc

    @classmethod
    def from_doc(cls, doc: dict[str, Any]) -> "Action":
        try:
            kind = ActionKind(doc["kind"])
            actor = int(doc["actor"])
            species = Species(doc["species"]) if "species" in doc else None
            parcel = int(doc["parcel"]) if doc.get("parcel") is not None else None
            price = int(doc["price"]) if doc.get("price") is not None else None
            offer = int(doc["offer"]) if doc.get("offer") is not None else None
        except (KeyError, TypeError, ValueError) as exc:
            raise LogValidationError(f"malformed action document: {exc}") from exc
        return cls(
            actor=actor, kind=kind, parcel=parcel, species=species, price=price, offer=offer
        )


@dataclass
class LossRecord:
    """Trees lost to a disturbance, kept for deadwood and conservation audits."""

    phase: GamePhase
    trees: int
    cause: str

    def to_doc(self) -> dict[str, Any]:
        return {"phase": self.phase.value, "trees": self.trees, "cause": self.cause}


@dataclass
class Parcel:
    """One hectare square on the 8x5 board."""

    id: int
    owner: Optional[int] = None
    manager: Optional[int] = None
    species: Optional[Species] = None
    trees: int = 0
    insured: bool = False
    # Sawwood devaluation timers. A beetle hit devalues the next
    # sawwood-bearing harvest; root rot devalues the final felling.
    downgrade_next_saw: bool = False
    downgrade_final: bool = False
    harvested_trees: int = 0
    removed_m3: Fraction = Fraction(0)
    losses: list[LossRecord] = field(default_factory=list)

    @property
    def pending_downgrade(self) -> bool:
        return self.downgrade_next_saw or self.downgrade_final

    @property
    def planted(self) -> bool:
        return self.species is not None

    @property
    def planted_trees(self) -> int:
        return TREES_PER_HECTARE if self.species is not None else 0

    @property
    def trees_lost(self) -> int:
        return sum(rec.trees for rec in self.losses)

    @property
    def pins(self) -> int:
        return (self.trees + TREES_PER_PIN // 2) // TREES_PER_PIN

    def record_loss(self, phase: GamePhase, trees: int, cause: str) -> None:
        if trees < 0 or trees > self.trees:
            raise ValueError(f"loss of {trees} trees impossible on parcel {self.id}")
        self.trees -= trees
        self.losses.append(LossRecord(phase, trees, cause))

    def to_doc(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "owner": self.owner,
            "manager": self.manager,
            "species": self.species.value if self.species else None,
            "trees": self.trees,
            "insured": self.insured,
            "downgrade_next_saw": self.downgrade_next_saw,
            "downgrade_final": self.downgrade_final,
            "harvested_trees": self.harvested_trees,
            "removed_m3": _frac_str(self.removed_m3),
            "losses": [rec.to_doc() for rec in self.losses],
        }


@dataclass
class Player:
    id: int
    seat: int
    name: str
    cash: int
    owned: set[int] = field(default_factory=set)
    managed: set[int] = field(default_factory=set)
    flows: list["CashFlow"] = field(default_factory=list)
    # Volumes harvested by this player (as manager at harvest time).
    timber_pulp: Fraction = Fraction(0)
    timber_saw: Fraction = Fraction(0)

    def to_doc(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "seat": self.seat,
            "name": self.name,
            "cash": self.cash,
            "owned": sorted(self.owned),
            "managed": sorted(self.managed),
            "flows": [f.to_doc() for f in self.flows],
            "timber_pulp": _frac_str(self.timber_pulp),
            "timber_saw": _frac_str(self.timber_saw),
        }


@dataclass
class LeaseOffer:
    id: int
    parcel: int
    offerer: int
    price: int
    open: bool = True

    def to_doc(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "parcel": self.parcel,
            "offerer": self.offerer,
            "price": self.price,
            "open": self.open,
        }


@dataclass
class DecisionLog:
    """Ordered, seed-stamped event record sufficient for bit-exact replay.

    Events are plain dicts in the documented wire format:
    ``{"type": "action", "phase": ..., **action}``,
    ``{"type": "card_drawn", "phase": ..., "player": ..., "card": ...}``,
    ``{"type": "phase_advanced", "to": ...}``.
    """

    header: dict[str, Any]
    events: list[dict[str, Any]] = field(default_factory=list)

    def append(self, event: dict[str, Any]) -> None:
        self.events.append(event)

    def to_lines(self) -> list[str]:
        return [canonical_dumps(self.header)] + [canonical_dumps(ev) for ev in self.events]

    def digest(self) -> str:
        return sha256_hex("\n".join(self.to_lines()) + "\n")


def action_event(phase: GamePhase, action: Action) -> dict[str, Any]:
    ev = {"type": "action", "phase": phase.value}
    ev.update(action.to_doc())
    return ev


def card_event(phase: GamePhase, player: int, card_kind: str) -> dict[str, Any]:
    return {"type": "card_drawn", "phase": phase.value, "player": player, "card": card_kind}


def phase_event(to: GamePhase) -> dict[str, Any]:
    return {"type": "phase_advanced", "to": to.value}


@dataclass
class GameState:
    """Complete authoritative snapshot of one game.

    Mutated only by the engine's single command stream; readers take
    serialized snapshots (``state_doc``/``public`` views) instead of
    sharing the live object.
    """

    config: "GameConfig"
    phase: GamePhase
    players: list[Player]
    parcels: list[Parcel]
    deck: "Deck"
    price_modifier: int = 0
    lease_offers: list[LeaseOffer] = field(default_factory=list)
    next_offer_id: int = 0
    passed: set[int] = field(default_factory=set)
    decisions: dict[int, str] = field(default_factory=dict)
    bank_net: int = 0
    log: DecisionLog = None  # type: ignore[assignment]

    def player(self, pid: int) -> Player:
        return self.players[pid]

    def parcel(self, pid: int) -> Parcel:
        return self.parcels[pid]

    @property
    def is_decision_phase(self) -> bool:
        return self.phase in DECISION_PHASES

    @property
    def finished(self) -> bool:
        return self.phase is GamePhase.FINISHED

    @property
    def year(self) -> int:
        return PHASE_YEAR[self.phase]

    def clone(self) -> "GameState":
        return copy.deepcopy(self)

    def state_doc(self) -> dict[str, Any]:
        """Full canonical snapshot used for digests (not an API response)."""
        return {
            "bank_net": self.bank_net,
            "config": self.config.to_doc(),
            "deck": self.deck.to_doc(),
            "decisions": {str(k): v for k, v in sorted(self.decisions.items())},
            "lease_offers": [o.to_doc() for o in self.lease_offers],
            "log": {"digest": self.log.digest(), "events": len(self.log.events)},
            "next_offer_id": self.next_offer_id,
            "parcels": [p.to_doc() for p in self.parcels],
            "passed": sorted(self.passed),
            "phase": self.phase.value,
            "players": [p.to_doc() for p in self.players],
            "price_modifier": self.price_modifier,
        }

    def digest(self) -> str:
        return sha256_hex(canonical_dumps(self.state_doc()))


def _frac_str(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"
