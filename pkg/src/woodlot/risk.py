"""Multi-risk card deck: construction, seeded draws, and effect application.

Disturbance cards touch only the drawer's managed parcels; market cards move
the global price modifier. Insurance blocks beetle, storm, and root rot, but
not mammal grazing.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from typing import Any, Iterable, Mapping

from .errors import ConfigError, RuleViolation
from .models import GamePhase, GameState, RISK_PHASES, Species

PRICE_DELTA = 10  # EUR per m3 moved by one market card


class CardKind(Enum):
    MAMMAL = "mammal"
    BEETLE = "beetle"
    STORM = "storm"
    ROOT_ROT = "root_rot"
    PRICE_UP = "price_up"
    PRICE_DOWN = "price_down"


DISTURBANCE_KINDS = frozenset(
    {CardKind.MAMMAL, CardKind.BEETLE, CardKind.STORM, CardKind.ROOT_ROT}
)
MARKET_KINDS = frozenset({CardKind.PRICE_UP, CardKind.PRICE_DOWN})

MAMMAL_LOSS_FRACTION = 0.40  # young pine/birch grazing loss, first era only


def _fisher_yates(items: list, rng: random.Random) -> list:
    shuffled = list(items)
    for i in range(len(shuffled) - 1, 0, -1):
        j = rng.randrange(i + 1)
        shuffled[i], shuffled[j] = shuffled[j], shuffled[i]
    return shuffled


@dataclass
class Deck:
    """Ordered card list with a draw cursor, discard pile, and its own RNG.

    The order is fully determined by the game seed; exhausting the deck
    reshuffles the discard pile with the same generator, so the entire draw
    stream is a pure function of (spec, seed).
    """

    cards: list[CardKind]
    rng: random.Random
    cursor: int = 0
    discard: list[CardKind] = field(default_factory=list)

    @property
    def remaining(self) -> int:
        return len(self.cards) - self.cursor

    def clone(self) -> "Deck":
        rng = random.Random()
        rng.setstate(self.rng.getstate())
        return Deck(cards=list(self.cards), rng=rng, cursor=self.cursor, discard=list(self.discard))

    def draw_mut(self) -> CardKind:
        if self.cursor >= len(self.cards):
            self.cards = _fisher_yates(self.discard, self.rng)
            self.discard = []
            self.cursor = 0
        card = self.cards[self.cursor]
        self.cursor += 1
        self.discard.append(card)
        return card

    def to_doc(self) -> dict[str, Any]:
        version, internal, gauss = self.rng.getstate()
        return {
            "order": [c.value for c in self.cards],
            "cursor": self.cursor,
            "discard": [c.value for c in self.discard],
            "rng": [version, list(internal), gauss],
        }


def build_deck(spec: Mapping[str, int] | Mapping[CardKind, int], seed: int) -> Deck:
    """Build and shuffle a deck from a card-kind -> count spec."""
    counts: dict[CardKind, int] = {}
    for kind, count in spec.items():
        key = kind if isinstance(kind, CardKind) else CardKind(str(kind))
        if count < 0:
            raise ConfigError(f"negative card count for {key.value}")
        counts[key] = counts.get(key, 0) + int(count)
    cards = [kind for kind in CardKind for _ in range(counts.get(kind, 0))]
    if not cards:
        raise ConfigError("deck must contain at least one card")
    rng = random.Random(seed)
    return Deck(cards=_fisher_yates(cards, rng), rng=rng)


def draw(deck: Deck) -> tuple[CardKind, Deck]:
    """Draw the next card, returning it with the successor deck value.

    The input deck is left untouched so concurrent readers never observe a
    half-drawn deck.
    """
    successor = deck.clone()
    card = successor.draw_mut()
    return card, successor


def apply_card(state: GameState, drawer: int, card: CardKind) -> GameState:
    """Apply one drawn card to the game state (mutating it).

    Must be called during a risk phase; the engine does so once per player
    per phase, in seat order.
    """
    if state.phase not in RISK_PHASES:
        raise RuleViolation("illegal_phase", f"risk cards cannot resolve in {state.phase.value}")

    if card is CardKind.PRICE_UP:
        state.price_modifier += PRICE_DELTA
        return state
    if card is CardKind.PRICE_DOWN:
        state.price_modifier -= PRICE_DELTA
        return state

    managed = [state.parcel(pid) for pid in sorted(state.player(drawer).managed)]

    if card is CardKind.MAMMAL:
        # Grazing only harms young saplings, so the card is inert after the
        # first risk phase. Insurance does not cover it.
        if state.phase is not GamePhase.RISK_0:
            return state
        for parcel in managed:
            if parcel.species in (Species.PINE, Species.BIRCH) and parcel.trees > 0:
                lost = math.floor(MAMMAL_LOSS_FRACTION * parcel.trees)
                parcel.record_loss(state.phase, lost, CardKind.MAMMAL.value)
        return state

    if card is CardKind.STORM:
        severity = state.config.storm_severity
        for parcel in managed:
            if parcel.trees > 0 and not parcel.insured:
                lost = math.floor(severity * parcel.trees)
                parcel.record_loss(state.phase, lost, CardKind.STORM.value)
        return state

    if card is CardKind.BEETLE:
        for parcel in managed:
            if parcel.species is Species.SPRUCE and not parcel.insured:
                parcel.downgrade_next_saw = True
        return state

    if card is CardKind.ROOT_ROT:
        for parcel in managed:
            if parcel.species is Species.SPRUCE and not parcel.insured:
                parcel.downgrade_final = True
        return state

    raise ConfigError(f"unhandled card kind {card}")


def card_texts(locale: str = "en") -> dict[str, dict[str, str]]:
    """UI strings for each card kind, loaded from the packaged locale file."""
    data = resources.files("woodlot").joinpath(f"locale/cards_{locale}.json").read_text("utf-8")
    return json.loads(data)
