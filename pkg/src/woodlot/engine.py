"""Deterministic rules engine: game setup, legal moves, action application,
phase advancement, and bit-exact replay of decision logs.

Every accepted command appends events to the state's decision log; replaying
those events from the same config and seed reproduces the state digest
exactly. Action handlers validate fully before mutating, so a rejected
action always leaves the state untouched.
"""

from __future__ import annotations

from typing import Any, Iterable, Optional

from . import economics, risk
from .config import GameConfig
from .errors import LogValidationError, RuleViolation
from .models import (
    Action,
    ActionKind,
    DecisionLog,
    DECISION_PHASES,
    GamePhase,
    GameState,
    LeaseOffer,
    LOG_FORMAT,
    PARCEL_COUNT,
    Parcel,
    Player,
    RISK_PHASES,
    Species,
    TREES_PER_HECTARE,
    YIELD_PHASES,
    action_event,
    card_event,
    next_phase,
    phase_event,
    phase_index,
)


def new_game(config: GameConfig, deck_order: Optional[list[risk.CardKind]] = None) -> GameState:
    """Set up a fresh game: parcels allotted in seat order from parcel 0
    upward, full starting cash, deck shuffled from the seed, planting phase
    open.

    ``deck_order`` forces an explicit card order (used by the enumeration
    oracle); it must contain the same multiset of cards as the config spec.
    """
    config.validate()
    players = [
        Player(id=seat, seat=seat, name=config.name_for(seat), cash=config.start_cash)
        for seat in range(config.players)
    ]
    parcels = [Parcel(id=i) for i in range(PARCEL_COUNT)]
    for player in players:
        start = player.seat * config.parcels_per_player
        for pid in range(start, start + config.parcels_per_player):
            parcels[pid].owner = player.id
            parcels[pid].manager = player.id
            player.owned.add(pid)
            player.managed.add(pid)

    deck = risk.build_deck(config.deck_spec, config.seed)
    if deck_order is not None:
        if sorted(c.value for c in deck_order) != sorted(c.value for c in deck.cards):
            raise RuleViolation("deck_mismatch", "forced deck order must match the config spec")
        deck.cards = list(deck_order)

    header = {
        "format": LOG_FORMAT,
        "seed": config.seed,
        "config": config.to_doc(),
        "players": [{"id": p.id, "seat": p.seat, "name": p.name} for p in players],
    }
    return GameState(
        config=config,
        phase=GamePhase.Y0_PLANTING,
        players=players,
        parcels=parcels,
        deck=deck,
        log=DecisionLog(header=header),
    )


# ---------------------------------------------------------------------------
# Legal moves


def legal_actions(state: GameState, player_id: int) -> list[Action]:
    """Actions ``apply_action`` would accept for this player right now.

    Parameterized actions are listed once per target: Plant uses pine as a
    placeholder species (any species is accepted) and LeaseOffer carries the
    unowned-parcel price as a suggested price (any non-negative price is
    accepted). An empty list means the player has no moves.
    """
    actions: list[Action] = []
    if state.phase not in DECISION_PHASES or player_id in state.passed:
        return actions
    player = state.player(player_id)
    managed = [state.parcel(pid) for pid in sorted(player.managed)]

    if state.phase is GamePhase.Y0_PLANTING:
        if player.cash >= state.config.planting_cost:
            for parcel in managed:
                if parcel.species is None:
                    actions.append(
                        Action(player_id, ActionKind.PLANT, parcel=parcel.id, species=Species.PINE)
                    )
        if player.cash >= state.config.unowned_parcel_price:
            for parcel in state.parcels:
                if parcel.owner is None:
                    actions.append(Action(player_id, ActionKind.BUY_PARCEL, parcel=parcel.id))

    if state.phase is not GamePhase.Y60_FELLING:
        premium = economics.INSURANCE_PREMIUM[state.phase]
        if player.cash >= premium:
            for parcel in managed:
                if parcel.species is not None and parcel.trees > 0 and not parcel.insured:
                    actions.append(Action(player_id, ActionKind.BUY_INSURANCE, parcel=parcel.id))

    if state.phase in YIELD_PHASES:
        for parcel in managed:
            if parcel.species is not None and parcel.trees > 0 and parcel.id not in state.decisions:
                actions.append(Action(player_id, ActionKind.HARVEST, parcel=parcel.id))
                actions.append(Action(player_id, ActionKind.SKIP, parcel=parcel.id))

    offered = {o.parcel for o in state.lease_offers if o.open}
    for parcel in managed:
        if parcel.owner == player_id and parcel.species is None and parcel.id not in offered:
            actions.append(
                Action(
                    player_id,
                    ActionKind.LEASE_OFFER,
                    parcel=parcel.id,
                    price=state.config.unowned_parcel_price,
                )
            )
    for offer in state.lease_offers:
        if offer.open and offer.offerer != player_id and player.cash >= offer.price:
            actions.append(Action(player_id, ActionKind.LEASE_ACCEPT, offer=offer.id))

    actions.append(Action(player_id, ActionKind.PASS))
    return actions


# ---------------------------------------------------------------------------
# Action application


def apply_action(state: GameState, action: Action) -> GameState:
    """Validate and apply one player action, appending it to the log.

    Raises RuleViolation (state untouched) with a distinct reason per rule:
    illegal_phase, not_manager, insufficient_funds, double_decision, ...
    """
    if state.phase not in DECISION_PHASES:
        raise RuleViolation("illegal_phase", f"no actions allowed in {state.phase.value}")
    if not 0 <= action.actor < len(state.players):
        raise RuleViolation("unknown_player", f"no player {action.actor}")
    if action.actor in state.passed:
        raise RuleViolation("already_passed", "player already passed this phase")

    handler = _HANDLERS[action.kind]
    handler(state, action)
    state.log.append(action_event(state.phase, action))
    return state


def _require_parcel(state: GameState, action: Action) -> Parcel:
    if action.parcel is None or not 0 <= action.parcel < PARCEL_COUNT:
        raise RuleViolation("unknown_parcel", f"no parcel {action.parcel}")
    return state.parcel(action.parcel)


def _require_manager(parcel: Parcel, actor: int) -> None:
    if parcel.manager != actor:
        raise RuleViolation("not_manager", f"parcel {parcel.id} is not managed by player {actor}")


def _charge(state: GameState, player: Player, amount: int, kind: economics.CashFlowKind) -> None:
    """Move euros between a player and the bank (negative amount = cost)."""
    if player.cash + amount < 0:
        raise RuleViolation("insufficient_funds", f"player {player.id} cannot pay {-amount}")
    player.cash += amount
    state.bank_net -= amount
    player.flows.append(economics.CashFlow(state.year, amount, kind))


def _apply_plant(state: GameState, action: Action) -> None:
    if state.phase is not GamePhase.Y0_PLANTING:
        raise RuleViolation("illegal_phase", "planting happens in the planting phase only")
    parcel = _require_parcel(state, action)
    _require_manager(parcel, action.actor)
    if action.species is None:
        raise RuleViolation("missing_species", "plant requires a species")
    if parcel.species is not None:
        raise RuleViolation("already_planted", f"parcel {parcel.id} already planted")
    player = state.player(action.actor)
    if player.cash < state.config.planting_cost:
        raise RuleViolation("insufficient_funds", "cannot afford planting")
    _charge(state, player, -state.config.planting_cost, economics.CashFlowKind.PLANTING)
    parcel.species = action.species
    parcel.trees = TREES_PER_HECTARE


def _apply_buy_insurance(state: GameState, action: Action) -> None:
    premium = economics.insurance_premium(state.phase)
    parcel = _require_parcel(state, action)
    _require_manager(parcel, action.actor)
    if parcel.species is None or parcel.trees == 0:
        raise RuleViolation("not_planted", f"parcel {parcel.id} has nothing to insure")
    if parcel.insured:
        raise RuleViolation("already_insured", f"parcel {parcel.id} is already insured")
    player = state.player(action.actor)
    if player.cash < premium:
        raise RuleViolation("insufficient_funds", "cannot afford the premium")
    _charge(state, player, -premium, economics.CashFlowKind.INSURANCE)
    parcel.insured = True


def _apply_lease_offer(state: GameState, action: Action) -> None:
    parcel = _require_parcel(state, action)
    if parcel.owner != action.actor:
        raise RuleViolation("not_owner", f"parcel {parcel.id} is not owned by player {action.actor}")
    _require_manager(parcel, action.actor)
    if parcel.species is not None:
        raise RuleViolation("already_planted", "only unplanted parcels can be leased out")
    if action.price is None or action.price < 0:
        raise RuleViolation("invalid_price", "lease price must be a non-negative integer")
    if any(o.open and o.parcel == parcel.id for o in state.lease_offers):
        raise RuleViolation("duplicate_offer", f"parcel {parcel.id} already has an open offer")
    state.lease_offers.append(
        LeaseOffer(id=state.next_offer_id, parcel=parcel.id, offerer=action.actor, price=action.price)
    )
    state.next_offer_id += 1


def _apply_lease_accept(state: GameState, action: Action) -> None:
    offer = next((o for o in state.lease_offers if o.id == action.offer), None)
    if offer is None:
        raise RuleViolation("unknown_offer", f"no lease offer {action.offer}")
    if not offer.open:
        raise RuleViolation("offer_closed", f"lease offer {offer.id} was already accepted")
    if offer.offerer == action.actor:
        raise RuleViolation("own_offer", "cannot accept your own lease offer")
    lessee = state.player(action.actor)
    lessor = state.player(offer.offerer)
    if lessee.cash < offer.price:
        raise RuleViolation("insufficient_funds", "cannot afford the lease price")
    # Managership and the price move atomically; the transfer is zero-sum.
    parcel = state.parcel(offer.parcel)
    lessee.cash -= offer.price
    lessor.cash += offer.price
    lessee.flows.append(economics.CashFlow(state.year, -offer.price, economics.CashFlowKind.LEASE))
    lessor.flows.append(economics.CashFlow(state.year, offer.price, economics.CashFlowKind.LEASE))
    lessor.managed.discard(parcel.id)
    lessee.managed.add(parcel.id)
    parcel.manager = lessee.id
    offer.open = False


def _apply_buy_parcel(state: GameState, action: Action) -> None:
    if state.phase is not GamePhase.Y0_PLANTING:
        raise RuleViolation("illegal_phase", "parcels can be bought in the planting phase only")
    parcel = _require_parcel(state, action)
    if parcel.owner is not None:
        raise RuleViolation("not_purchasable", f"parcel {parcel.id} is already owned")
    player = state.player(action.actor)
    if player.cash < state.config.unowned_parcel_price:
        raise RuleViolation("insufficient_funds", "cannot afford the parcel")
    _charge(state, player, -state.config.unowned_parcel_price, economics.CashFlowKind.PARCEL_PURCHASE)
    parcel.owner = player.id
    parcel.manager = player.id
    player.owned.add(parcel.id)
    player.managed.add(parcel.id)


def _require_decidable(state: GameState, action: Action) -> Parcel:
    if state.phase not in YIELD_PHASES:
        raise RuleViolation("illegal_phase", "harvest decisions happen in yield phases only")
    parcel = _require_parcel(state, action)
    _require_manager(parcel, action.actor)
    if parcel.species is None or parcel.trees == 0:
        raise RuleViolation("not_planted", f"parcel {parcel.id} has no standing trees")
    if parcel.id in state.decisions:
        raise RuleViolation("double_decision", f"parcel {parcel.id} already decided this phase")
    return parcel


def _apply_harvest(state: GameState, action: Action) -> None:
    parcel = _require_decidable(state, action)
    result = economics.harvest_yield(parcel.trees, state.phase, state.config.yields)
    downgraded = (parcel.downgrade_next_saw and result.saw_m3 > 0) or (
        parcel.downgrade_final and state.phase is GamePhase.Y60_FELLING
    )
    result.revenue = economics.harvest_revenue(
        result, state.phase, state.config.prices, state.price_modifier, downgraded
    )
    player = state.player(action.actor)
    parcel.trees -= result.trees_removed
    parcel.harvested_trees += result.trees_removed
    parcel.removed_m3 += result.total_m3
    player.timber_pulp += result.pulp_m3
    player.timber_saw += result.saw_m3
    _charge(state, player, result.revenue, economics.CashFlowKind.HARVEST_REVENUE)
    if result.saw_m3 > 0:
        parcel.downgrade_next_saw = False
    if state.phase is GamePhase.Y60_FELLING:
        parcel.downgrade_final = False
    state.decisions[parcel.id] = ActionKind.HARVEST.value


def _apply_skip(state: GameState, action: Action) -> None:
    parcel = _require_decidable(state, action)
    state.decisions[parcel.id] = ActionKind.SKIP.value


def _apply_pass(state: GameState, action: Action) -> None:
    # Passing ends the player's phase. In yield phases any of their still
    # undecided planted parcels are skipped, so a pass can never deadlock
    # the phase; the implied skips are deterministic from the log.
    state.passed.add(action.actor)
    if state.phase in YIELD_PHASES:
        for pid in sorted(state.player(action.actor).managed):
            parcel = state.parcel(pid)
            if parcel.species is not None and parcel.trees > 0 and pid not in state.decisions:
                state.decisions[pid] = ActionKind.SKIP.value


_HANDLERS = {
    ActionKind.PLANT: _apply_plant,
    ActionKind.BUY_INSURANCE: _apply_buy_insurance,
    ActionKind.LEASE_OFFER: _apply_lease_offer,
    ActionKind.LEASE_ACCEPT: _apply_lease_accept,
    ActionKind.BUY_PARCEL: _apply_buy_parcel,
    ActionKind.HARVEST: _apply_harvest,
    ActionKind.SKIP: _apply_skip,
    ActionKind.PASS: _apply_pass,
}


# ---------------------------------------------------------------------------
# Phase flow


def phase_complete(state: GameState) -> bool:
    """True when the current phase has nothing left to wait for."""
    if state.phase in DECISION_PHASES:
        if len(state.passed) < len(state.players):
            return False
        if state.phase in YIELD_PHASES:
            for parcel in state.parcels:
                if (
                    parcel.manager is not None
                    and parcel.species is not None
                    and parcel.trees > 0
                    and parcel.id not in state.decisions
                ):
                    return False
        return True
    return state.phase is not GamePhase.FINISHED


def advance_phase(state: GameState) -> GameState:
    """Move to the next phase. Entering a risk phase draws and resolves one
    card per player in seat order; no cards are drawn after final felling."""
    if state.phase is GamePhase.FINISHED:
        raise RuleViolation("game_finished", "no phase after finished")
    if not phase_complete(state):
        raise RuleViolation("phase_incomplete", "players are still undecided")

    target = next_phase(state.phase)
    state.phase = target
    state.passed.clear()
    state.decisions.clear()
    state.log.append(phase_event(target))

    if target in RISK_PHASES:
        for player in state.players:
            card, state.deck = risk.draw(state.deck)
            state.log.append(card_event(target, player.id, card.value))
            risk.apply_card(state, player.id, card)
    return state


def advance_to_next_decision(state: GameState) -> GameState:
    """Advance at least once, then keep going through non-decision phases."""
    advance_phase(state)
    while state.phase not in DECISION_PHASES and not state.finished:
        advance_phase(state)
    return state


# ---------------------------------------------------------------------------
# Replay


def replay(log: DecisionLog) -> GameState:
    """Re-execute a decision log from its recorded config and seed.

    Card draws are regenerated from the seeded deck and must match the
    logged events; any divergence raises LogValidationError naming the
    offending event index.
    """
    header = log.header
    if header.get("format") != LOG_FORMAT:
        raise LogValidationError(f"unsupported log format {header.get('format')!r}")
    try:
        config = GameConfig.from_doc(header["config"])
    except KeyError as exc:
        raise LogValidationError(f"log header missing {exc}") from exc
    roster = header.get("players")
    expected_roster = [{"id": p, "seat": p, "name": config.name_for(p)} for p in range(config.players)]
    if roster != expected_roster:
        raise LogValidationError("log header roster does not match its config")

    state = new_game(config)
    events = log.events
    index = 0
    while index < len(events):
        produced = state.log.events
        if index < len(produced):
            if produced[index] != events[index]:
                raise LogValidationError(
                    f"expected {canonical(produced[index])}, log has {canonical(events[index])}",
                    event_index=index,
                )
            index += 1
            continue
        event = events[index]
        etype = event.get("type")
        try:
            if etype == "action":
                apply_action(state, Action.from_doc(event))
            elif etype == "phase_advanced":
                advance_phase(state)
            elif etype == "card_drawn":
                raise LogValidationError(
                    "card draw without a preceding phase advance", event_index=index
                )
            else:
                raise LogValidationError(f"unknown event type {etype!r}", event_index=index)
        except RuleViolation as exc:
            raise LogValidationError(f"illegal event: {exc}", event_index=index) from exc
        # The loop re-checks everything the command just appended against the
        # input log, which validates regenerated card draws position by
        # position.
    if len(state.log.events) != len(events):
        raise LogValidationError(
            "log ends mid-command: engine produced "
            f"{len(state.log.events)} events for {len(events)} logged",
            event_index=len(events),
        )
    return state


def canonical(event: dict[str, Any]) -> str:
    from .canon import canonical_dumps

    return canonical_dumps(event)


def state_digest(state: GameState) -> str:
    """Hex digest of the canonical state snapshot; stable across platforms."""
    return state.digest()


# ---------------------------------------------------------------------------
# Public views


def public_view(state: GameState, seat: Optional[int] = None) -> dict[str, Any]:
    """Full-information snapshot for clients, minus the undrawn deck order.

    With ``seat`` given, includes that player's legal actions so clients can
    enable exactly the moves the engine will accept.
    """
    view: dict[str, Any] = {
        "format": "woodlot-state/1",
        "phase": state.phase.value,
        "year": state.year,
        "price_modifier": state.price_modifier,
        "players": [
            {
                "id": p.id,
                "seat": p.seat,
                "name": p.name,
                "cash": p.cash,
                "owned": sorted(p.owned),
                "managed": sorted(p.managed),
                "passed": p.id in state.passed,
            }
            for p in state.players
        ],
        "parcels": [
            {
                "id": p.id,
                "owner": p.owner,
                "manager": p.manager,
                "species": p.species.value if p.species else None,
                "trees": p.trees,
                "pins": p.pins,
                "insured": p.insured,
                "pending_downgrade": p.pending_downgrade,
                "decided": state.decisions.get(p.id),
            }
            for p in state.parcels
        ],
        "deck": {
            "remaining": state.deck.remaining,
            "discard": [c.value for c in state.deck.discard],
        },
        "lease_offers": [o.to_doc() for o in state.lease_offers if o.open],
        "event_count": len(state.log.events),
        "digest": state.digest(),
    }
    if seat is not None and 0 <= seat < len(state.players) and not state.finished:
        view["legal_actions"] = [a.to_doc() for a in legal_actions(state, seat)]
    return view
