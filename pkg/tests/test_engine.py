"""Rules-engine behavior: setup, legal moves, action application, phase flow,
replay validation, and state digests."""

from __future__ import annotations

import pytest

from woodlot import GameConfig, Species, new_game
from woodlot.economics import CashFlowKind
from woodlot.engine import (
    advance_phase,
    advance_to_next_decision,
    apply_action,
    legal_actions,
    phase_complete,
    public_view,
    replay,
)
from woodlot.errors import ConfigError, LogValidationError, RuleViolation
from woodlot.models import Action, ActionKind, DecisionLog, GamePhase

# Recorded at first implementation; guards cross-version digest stability.
GOLDEN_NEW_GAME_SEED42 = "36e9d7eb10dc81c8d610c677679c67147ec1d3a60f4ff9944018e46cf0baf78d"


def act(state, actor, kind, **kwargs):
    return apply_action(state, Action(actor, kind, **kwargs))


def pass_all(state):
    for player in state.players:
        if player.id not in state.passed:
            act(state, player.id, ActionKind.PASS)


class TestNewGame:
    def test_four_player_default(self, default_config):
        state = new_game(default_config)
        assert state.phase is GamePhase.Y0_PLANTING
        assert len(state.parcels) == 40
        assert all(p.cash == 8000 for p in state.players)
        assert all(p.owner is not None for p in state.parcels)
        for player in state.players:
            assert player.owned == set(range(player.seat * 10, player.seat * 10 + 10))
            assert player.managed == player.owned
        assert state.price_modifier == 0
        assert state.log.events == []
        assert state.log.header["format"] == "woodlot-log/1"

    def test_two_player_leaves_purchasable_parcels(self):
        state = new_game(GameConfig(players=2, seed=1))
        owned = [p for p in state.parcels if p.owner is not None]
        unowned = [p for p in state.parcels if p.owner is None]
        assert len(owned) == 20 and len(unowned) == 20

    def test_five_players_rejected(self):
        with pytest.raises(ConfigError):
            GameConfig(players=5).validate()

    def test_empty_deck_rejected(self):
        with pytest.raises(ConfigError):
            new_game(GameConfig(deck_spec={"mammal": 0}))

    def test_deck_built_from_seed(self, default_config):
        a = new_game(default_config)
        b = new_game(default_config)
        assert a.deck.cards == b.deck.cards
        assert len(a.deck.cards) == 20


class TestLegalActions:
    def test_broke_player_with_all_planted_can_only_pass(self):
        state = new_game(GameConfig(players=1, seed=3, start_cash=10000))
        for pid in range(10):
            act(state, 0, ActionKind.PLANT, parcel=pid, species=Species.PINE)
        assert state.player(0).cash == 0
        options = legal_actions(state, 0)
        assert [a.kind for a in options] == [ActionKind.PASS]

    def test_ten_plants_listed_at_start(self, solo_config):
        state = new_game(solo_config)
        plants = [a for a in legal_actions(state, 0) if a.kind is ActionKind.PLANT]
        assert len(plants) == 10
        assert {a.parcel for a in plants} == set(range(10))

    def test_yield_phase_offers_harvest_and_skip(self, calm_config):
        state = new_game(calm_config)
        act(state, 0, ActionKind.PLANT, parcel=0, species=Species.SPRUCE)
        pass_all(state)
        advance_to_next_decision(state)
        assert state.phase is GamePhase.Y30_THINNING
        kinds = {(a.kind, a.parcel) for a in legal_actions(state, 0)}
        assert (ActionKind.HARVEST, 0) in kinds
        assert (ActionKind.SKIP, 0) in kinds

    def test_passed_player_has_no_moves(self, solo_config):
        state = new_game(solo_config)
        act(state, 0, ActionKind.PASS)
        assert legal_actions(state, 0) == []

    def test_soundness_everything_listed_is_accepted(self, default_config):
        state = new_game(default_config)
        for action in legal_actions(state, 2):
            clone = state.clone()
            apply_action(clone, action)

    def test_no_actions_listed_in_risk_phase(self, calm_config):
        state = new_game(calm_config)
        pass_all(state)
        advance_phase(state)
        assert state.phase is GamePhase.RISK_0
        assert legal_actions(state, 0) == []


class TestPlant:
    def test_plant_sets_species_trees_and_cost(self, default_config):
        state = new_game(default_config)
        act(state, 0, ActionKind.PLANT, parcel=3, species=Species.PINE)
        parcel = state.parcel(3)
        assert parcel.species is Species.PINE
        assert parcel.trees == 2000
        assert state.player(0).cash == 7000
        assert state.player(0).flows[-1].kind is CashFlowKind.PLANTING

    def test_already_planted_rejected_state_unchanged(self, default_config):
        state = new_game(default_config)
        act(state, 0, ActionKind.PLANT, parcel=3, species=Species.PINE)
        digest = state.digest()
        with pytest.raises(RuleViolation) as err:
            act(state, 0, ActionKind.PLANT, parcel=3, species=Species.BIRCH)
        assert err.value.reason == "already_planted"
        assert state.digest() == digest

    def test_budget_exhaustion_on_ninth_plant(self, default_config):
        state = new_game(default_config)
        for pid in range(8):
            act(state, 0, ActionKind.PLANT, parcel=pid, species=Species.SPRUCE)
        assert state.player(0).cash == 0
        with pytest.raises(RuleViolation) as err:
            act(state, 0, ActionKind.PLANT, parcel=8, species=Species.SPRUCE)
        assert err.value.reason == "insufficient_funds"

    def test_non_manager_rejected(self, default_config):
        state = new_game(default_config)
        with pytest.raises(RuleViolation) as err:
            act(state, 0, ActionKind.PLANT, parcel=15, species=Species.PINE)
        assert err.value.reason == "not_manager"

    def test_plant_outside_y0_rejected(self, calm_config):
        state = new_game(calm_config)
        pass_all(state)
        advance_to_next_decision(state)
        with pytest.raises(RuleViolation) as err:
            act(state, 0, ActionKind.PLANT, parcel=0, species=Species.PINE)
        assert err.value.reason == "illegal_phase"


class TestInsurance:
    def test_buy_at_y0_costs_500(self, default_config):
        state = new_game(default_config)
        act(state, 0, ActionKind.PLANT, parcel=0, species=Species.SPRUCE)
        act(state, 0, ActionKind.BUY_INSURANCE, parcel=0)
        assert state.parcel(0).insured is True
        assert state.player(0).cash == 8000 - 1000 - 500

    def test_unplanted_uninsurable(self, default_config):
        state = new_game(default_config)
        with pytest.raises(RuleViolation) as err:
            act(state, 0, ActionKind.BUY_INSURANCE, parcel=0)
        assert err.value.reason == "not_planted"

    def test_double_insurance_rejected(self, default_config):
        state = new_game(default_config)
        act(state, 0, ActionKind.PLANT, parcel=0, species=Species.SPRUCE)
        act(state, 0, ActionKind.BUY_INSURANCE, parcel=0)
        with pytest.raises(RuleViolation) as err:
            act(state, 0, ActionKind.BUY_INSURANCE, parcel=0)
        assert err.value.reason == "already_insured"

    def test_premium_rises_with_phase(self, calm_config):
        state = new_game(calm_config)
        act(state, 0, ActionKind.PLANT, parcel=0, species=Species.SPRUCE)
        act(state, 0, ActionKind.PLANT, parcel=1, species=Species.SPRUCE)
        pass_all(state)
        advance_to_next_decision(state)  # Y30
        act(state, 0, ActionKind.BUY_INSURANCE, parcel=0)
        assert state.player(0).flows[-1].amount == -1000
        act(state, 0, ActionKind.SKIP, parcel=0)
        act(state, 0, ActionKind.SKIP, parcel=1)
        pass_all(state)
        advance_to_next_decision(state)  # Y45
        act(state, 0, ActionKind.BUY_INSURANCE, parcel=1)
        assert state.player(0).flows[-1].amount == -2000

    def test_no_insurance_at_final_felling(self, calm_config):
        state = new_game(calm_config)
        act(state, 0, ActionKind.PLANT, parcel=0, species=Species.SPRUCE)
        for _ in range(3):
            pass_all(state)
            advance_to_next_decision(state)
        assert state.phase is GamePhase.Y60_FELLING
        kinds = {a.kind for a in legal_actions(state, 0)}
        assert ActionKind.BUY_INSURANCE not in kinds
        with pytest.raises(RuleViolation) as err:
            act(state, 0, ActionKind.BUY_INSURANCE, parcel=0)
        assert err.value.reason == "insurance_window_closed"


class TestLeaseAndPurchase:
    def test_lease_transfers_managership_and_cash(self, default_config):
        state = new_game(default_config)
        act(state, 0, ActionKind.LEASE_OFFER, parcel=5, price=1200)
        offer = state.lease_offers[0]
        act(state, 1, ActionKind.LEASE_ACCEPT, offer=offer.id)
        assert state.parcel(5).manager == 1
        assert state.parcel(5).owner == 0
        assert 5 in state.player(1).managed and 5 not in state.player(0).managed
        assert state.player(0).cash == 9200
        assert state.player(1).cash == 6800
        assert not offer.open

    def test_own_offer_unacceptable(self, default_config):
        state = new_game(default_config)
        act(state, 0, ActionKind.LEASE_OFFER, parcel=5, price=100)
        with pytest.raises(RuleViolation) as err:
            act(state, 0, ActionKind.LEASE_ACCEPT, offer=0)
        assert err.value.reason == "own_offer"

    def test_closed_offer_unacceptable(self, default_config):
        state = new_game(default_config)
        act(state, 0, ActionKind.LEASE_OFFER, parcel=5, price=100)
        act(state, 1, ActionKind.LEASE_ACCEPT, offer=0)
        with pytest.raises(RuleViolation) as err:
            act(state, 2, ActionKind.LEASE_ACCEPT, offer=0)
        assert err.value.reason == "offer_closed"

    def test_duplicate_offer_rejected(self, default_config):
        state = new_game(default_config)
        act(state, 0, ActionKind.LEASE_OFFER, parcel=5, price=100)
        with pytest.raises(RuleViolation) as err:
            act(state, 0, ActionKind.LEASE_OFFER, parcel=5, price=300)
        assert err.value.reason == "duplicate_offer"

    def test_lessee_plants_and_earns_on_leased_parcel(self, default_config):
        state = new_game(default_config)
        act(state, 0, ActionKind.LEASE_OFFER, parcel=5, price=0)
        act(state, 1, ActionKind.LEASE_ACCEPT, offer=0)
        act(state, 1, ActionKind.PLANT, parcel=5, species=Species.SPRUCE)
        assert state.parcel(5).species is Species.SPRUCE

    def test_buy_unowned_parcel(self):
        state = new_game(GameConfig(players=2, seed=2))
        act(state, 0, ActionKind.BUY_PARCEL, parcel=25)
        assert state.parcel(25).owner == 0
        assert state.parcel(25).manager == 0
        assert state.player(0).cash == 8000 - 1500

    def test_owned_parcel_not_purchasable(self, default_config):
        state = new_game(default_config)
        with pytest.raises(RuleViolation) as err:
            act(state, 0, ActionKind.BUY_PARCEL, parcel=15)
        assert err.value.reason == "not_purchasable"

    def test_purchase_only_at_y0(self, calm_config):
        state = new_game(calm_config)
        pass_all(state)
        advance_to_next_decision(state)
        with pytest.raises(RuleViolation) as err:
            act(state, 0, ActionKind.BUY_PARCEL, parcel=30)
        assert err.value.reason == "illegal_phase"


class TestHarvestFlow:
    def test_double_decision_rejected(self, calm_config):
        state = new_game(calm_config)
        act(state, 0, ActionKind.PLANT, parcel=0, species=Species.SPRUCE)
        pass_all(state)
        advance_to_next_decision(state)
        act(state, 0, ActionKind.HARVEST, parcel=0)
        with pytest.raises(RuleViolation) as err:
            act(state, 0, ActionKind.SKIP, parcel=0)
        assert err.value.reason == "double_decision"

    def test_full_cycle_cash_and_emptying(self, calm_config):
        state = new_game(calm_config)
        act(state, 0, ActionKind.PLANT, parcel=0, species=Species.SPRUCE)
        assert state.player(0).cash == 7000
        for expected_cash, expected_trees in ((8000, 1000), (11500, 400), (21500, 0)):
            pass_all(state)
            advance_to_next_decision(state)
            act(state, 0, ActionKind.HARVEST, parcel=0)
            assert state.player(0).cash == expected_cash
            assert state.parcel(0).trees == expected_trees
        assert state.parcel(0).harvested_trees == 2000

    def test_skipped_trees_remain_standing(self, calm_config):
        state = new_game(calm_config)
        act(state, 0, ActionKind.PLANT, parcel=0, species=Species.SPRUCE)
        pass_all(state)
        advance_to_next_decision(state)
        act(state, 0, ActionKind.SKIP, parcel=0)
        pass_all(state)
        advance_to_next_decision(state)
        # Y45 with 2000 standing: capped at nominal yield.
        act(state, 0, ActionKind.HARVEST, parcel=0)
        assert state.player(0).cash == 7000 + 3500
        assert state.parcel(0).trees == 1400

    def test_root_rot_downgrades_final_felling(self):
        config = GameConfig(players=1, seed=6, deck_spec={"root_rot": 4})
        state = new_game(config)
        act(state, 0, ActionKind.PLANT, parcel=0, species=Species.SPRUCE)
        pass_all(state)
        advance_to_next_decision(state)  # rot flag set at the first risk phase
        assert state.parcel(0).downgrade_final is True
        act(state, 0, ActionKind.SKIP, parcel=0)
        pass_all(state)
        advance_to_next_decision(state)
        act(state, 0, ActionKind.SKIP, parcel=0)
        pass_all(state)
        advance_to_next_decision(state)
        assert state.phase is GamePhase.Y60_FELLING
        act(state, 0, ActionKind.HARVEST, parcel=0)
        # Skipped thinnings cap at nominal volumes: 50 pulp + 150 saw, all
        # at pulp price under the rot downgrade.
        assert state.player(0).flows[-1].amount == 200 * 20
        assert state.parcel(0).downgrade_final is False

    def test_beetle_flag_clears_after_sawwood_harvest(self, calm_config):
        state = new_game(calm_config)
        act(state, 0, ActionKind.PLANT, parcel=0, species=Species.SPRUCE)
        state.parcel(0).downgrade_next_saw = True  # as an uninsured beetle hit would
        pass_all(state)
        advance_to_next_decision(state)
        act(state, 0, ActionKind.HARVEST, parcel=0)
        # First thinning carries no sawwood: full price, flag persists.
        assert state.player(0).flows[-1].amount == 1000
        assert state.parcel(0).downgrade_next_saw is True
        pass_all(state)
        advance_to_next_decision(state)
        act(state, 0, ActionKind.HARVEST, parcel=0)
        assert state.player(0).flows[-1].amount == 2000  # downgraded, then clears
        assert state.parcel(0).downgrade_next_saw is False
        pass_all(state)
        advance_to_next_decision(state)
        act(state, 0, ActionKind.HARVEST, parcel=0)
        assert state.player(0).flows[-1].amount == 10000  # back to full price

    def test_pass_skips_undecided_parcels(self, calm_config):
        state = new_game(calm_config)
        act(state, 0, ActionKind.PLANT, parcel=0, species=Species.SPRUCE)
        act(state, 0, ActionKind.PLANT, parcel=1, species=Species.SPRUCE)
        pass_all(state)
        advance_to_next_decision(state)
        act(state, 0, ActionKind.HARVEST, parcel=0)
        act(state, 0, ActionKind.PASS)
        assert state.decisions[1] == "skip"
        assert phase_complete(state)


class TestPhaseFlow:
    def test_advance_rejected_while_undecided(self, default_config):
        state = new_game(default_config)
        with pytest.raises(RuleViolation) as err:
            advance_phase(state)
        assert err.value.reason == "phase_incomplete"

    def test_risk_entry_draws_one_card_per_player_in_seat_order(self, default_config):
        state = new_game(default_config)
        expected = [c.value for c in state.deck.cards[:4]]
        pass_all(state)
        advance_phase(state)
        draws = [e for e in state.log.events if e["type"] == "card_drawn"]
        assert [e["player"] for e in draws] == [0, 1, 2, 3]
        assert [e["card"] for e in draws] == expected

    def test_no_draws_after_final_felling(self, calm_config):
        state = new_game(calm_config)
        for _ in range(3):
            pass_all(state)
            advance_to_next_decision(state)
        assert state.phase is GamePhase.Y60_FELLING
        pass_all(state)
        advance_phase(state)
        assert state.phase is GamePhase.SCORING
        advance_phase(state)
        assert state.finished
        draws = [e for e in state.log.events if e["type"] == "card_drawn"]
        assert len(draws) == 3  # one per risk phase for the single player

    def test_phase_events_strictly_increasing(self, default_config):
        state = new_game(default_config)
        while not state.finished:
            pass_all(state)
            advance_to_next_decision(state)
        names = [e["to"] for e in state.log.events if e["type"] == "phase_advanced"]
        order = [p.value for p in GamePhase]
        indices = [order.index(n) for n in names]
        assert indices == sorted(indices) and len(set(indices)) == len(indices)

    def test_no_actions_after_finish(self, calm_config):
        state = new_game(calm_config)
        while not state.finished:
            pass_all(state)
            advance_to_next_decision(state)
        with pytest.raises(RuleViolation):
            act(state, 0, ActionKind.PASS)
        with pytest.raises(RuleViolation):
            advance_phase(state)


class TestReplay:
    def test_empty_log_equals_new_game(self, default_config):
        state = new_game(default_config)
        replayed = replay(DecisionLog(header=state.log.header))
        assert replayed.digest() == state.digest()

    def test_full_game_replays_to_same_digest(self, default_config):
        from woodlot.strategy import random_playout

        state = random_playout(default_config, decision_seed=5)
        assert replay(state.log).digest() == state.digest()

    def test_tampered_card_draw_detected(self, calm_config):
        state = new_game(calm_config)
        pass_all(state)
        advance_phase(state)
        draw_index = next(
            i for i, e in enumerate(state.log.events) if e["type"] == "card_drawn"
        )
        bad = DecisionLog(header=state.log.header, events=[dict(e) for e in state.log.events])
        bad.events[draw_index] = {**bad.events[draw_index], "card": "price_up"}
        with pytest.raises(LogValidationError) as err:
            replay(bad)
        assert err.value.event_index == draw_index

    def test_illegal_event_names_index(self, default_config):
        state = new_game(default_config)
        bad = DecisionLog(
            header=state.log.header,
            events=[{"type": "action", "phase": "y0_planting", "actor": 0, "kind": "plant", "parcel": 39, "species": "pine"}],
        )
        with pytest.raises(LogValidationError) as err:
            replay(bad)
        assert err.value.event_index == 0

    def test_version_mismatch_rejected(self, default_config):
        state = new_game(default_config)
        bad = DecisionLog(header={**state.log.header, "format": "woodlot-log/99"})
        with pytest.raises(LogValidationError):
            replay(bad)


class TestDigest:
    def test_golden_new_game(self):
        state = new_game(GameConfig(seed=42))
        assert state.digest() == GOLDEN_NEW_GAME_SEED42

    def test_one_tree_changes_digest(self, default_config):
        a = new_game(default_config)
        b = new_game(default_config)
        b.parcel(0).species = Species.PINE
        b.parcel(0).trees = 1999
        assert a.digest() != b.digest()

    def test_seed_changes_digest(self):
        assert new_game(GameConfig(seed=1)).digest() != new_game(GameConfig(seed=2)).digest()


class TestPublicView:
    def test_view_hides_undrawn_deck(self, default_config):
        state = new_game(default_config)
        view = public_view(state, seat=0)
        assert set(view["deck"]) == {"remaining", "discard"}
        assert view["deck"]["remaining"] == 20
        assert "rng" not in str(view["deck"])

    def test_view_lists_legal_actions_for_seat(self, default_config):
        state = new_game(default_config)
        view = public_view(state, seat=1)
        kinds = {a["kind"] for a in view["legal_actions"]}
        assert "plant" in kinds and "pass" in kinds
        assert all(a["actor"] == 1 for a in view["legal_actions"])

    def test_pin_counts(self, default_config):
        state = new_game(default_config)
        act(state, 0, ActionKind.PLANT, parcel=0, species=Species.PINE)
        view = public_view(state)
        assert view["parcels"][0]["pins"] == 5
        assert view["parcels"][1]["pins"] == 0
