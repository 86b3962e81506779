"""Deck construction/draw determinism and card effect rules."""

from __future__ import annotations

from collections import Counter

import pytest

from woodlot import GameConfig, Species, new_game
from woodlot.engine import advance_phase, apply_action, legal_actions
from woodlot.errors import ConfigError, RuleViolation
from woodlot.models import Action, ActionKind, GamePhase
from woodlot.risk import CardKind, apply_card, build_deck, card_texts, draw


class TestBuildDeck:
    def test_default_spec_counts(self):
        spec = {"mammal": 4, "beetle": 4, "storm": 3, "root_rot": 3, "price_up": 3, "price_down": 3}
        deck = build_deck(spec, seed=1)
        assert len(deck.cards) == 20
        assert Counter(c.value for c in deck.cards) == spec

    def test_same_seed_same_order(self):
        a = build_deck({"mammal": 5, "storm": 5}, seed=99)
        b = build_deck({"mammal": 5, "storm": 5}, seed=99)
        assert a.cards == b.cards

    def test_different_seed_usually_differs(self):
        spec = {"mammal": 10, "storm": 10}
        orders = {tuple(build_deck(spec, seed=s).cards) for s in range(8)}
        assert len(orders) > 1

    def test_empty_spec_rejected(self):
        with pytest.raises(ConfigError):
            build_deck({}, seed=1)
        with pytest.raises(ConfigError):
            build_deck({"mammal": 0}, seed=1)

    def test_negative_count_rejected(self):
        with pytest.raises(ConfigError):
            build_deck({"mammal": -1}, seed=1)


class TestDraw:
    def test_draw_is_pure(self):
        deck = build_deck({"mammal": 3, "beetle": 3}, seed=5)
        before = list(deck.cards)
        card, successor = draw(deck)
        assert deck.cards == before and deck.cursor == 0 and deck.discard == []
        assert card is before[0]
        assert successor.cursor == 1
        assert successor.discard == [card]

    def test_draws_follow_shuffled_order(self):
        deck = build_deck({"mammal": 2, "storm": 2}, seed=11)
        expected = list(deck.cards)
        drawn = []
        for _ in range(4):
            card, deck = draw(deck)
            drawn.append(card)
        assert drawn == expected

    def test_reshuffle_on_exhaustion_is_deterministic(self):
        def run():
            deck = build_deck({"mammal": 2, "beetle": 1, "storm": 1}, seed=3)
            out = []
            for _ in range(9):  # forces two reshuffles
                card, deck = draw(deck)
                out.append(card.value)
            return out

        first, second = run(), run()
        assert first == second
        assert Counter(first[:4]) == Counter(first[4:8])  # same multiset recycles


def _risk0_state(config: GameConfig):
    state = new_game(config)
    return state


def _plant(state, actor, parcel, species):
    apply_action(state, Action(actor, ActionKind.PLANT, parcel=parcel, species=species))


def _insure(state, actor, parcel):
    apply_action(state, Action(actor, ActionKind.BUY_INSURANCE, parcel=parcel))


def _enter_risk0(state):
    for player in state.players:
        apply_action(state, Action(player.id, ActionKind.PASS))
    # Advance manually without card draws by replacing a known deck: the
    # tests below call apply_card directly instead.
    state.phase = GamePhase.RISK_0
    state.passed.clear()
    return state


class TestApplyCard:
    def setup_method(self):
        self.config = GameConfig(players=2, seed=8, deck_spec={"mammal": 6})

    def test_mammal_hits_pine_and_birch_not_spruce(self):
        state = _risk0_state(self.config)
        _plant(state, 0, 0, Species.PINE)
        _plant(state, 0, 1, Species.BIRCH)
        _plant(state, 0, 2, Species.SPRUCE)
        _enter_risk0(state)
        apply_card(state, 0, CardKind.MAMMAL)
        assert state.parcel(0).trees == 1200
        assert state.parcel(1).trees == 1200
        assert state.parcel(2).trees == 2000
        assert [rec.cause for rec in state.parcel(0).losses] == ["mammal"]

    def test_mammal_only_hits_drawer(self):
        state = _risk0_state(self.config)
        _plant(state, 0, 0, Species.PINE)
        _plant(state, 1, 10, Species.PINE)
        _enter_risk0(state)
        apply_card(state, 0, CardKind.MAMMAL)
        assert state.parcel(0).trees == 1200
        assert state.parcel(10).trees == 2000

    def test_mammal_inert_after_first_era(self):
        state = _risk0_state(self.config)
        _plant(state, 0, 0, Species.PINE)
        _enter_risk0(state)
        state.phase = GamePhase.RISK_30
        apply_card(state, 0, CardKind.MAMMAL)
        assert state.parcel(0).trees == 2000
        assert state.parcel(0).losses == []

    def test_mammal_ignores_insurance(self):
        state = _risk0_state(self.config)
        _plant(state, 0, 0, Species.PINE)
        _insure(state, 0, 0)
        _enter_risk0(state)
        apply_card(state, 0, CardKind.MAMMAL)
        assert state.parcel(0).trees == 1200

    def test_beetle_flags_uninsured_spruce_only(self):
        state = _risk0_state(self.config)
        _plant(state, 0, 0, Species.SPRUCE)
        _plant(state, 0, 1, Species.SPRUCE)
        _plant(state, 0, 2, Species.PINE)
        _insure(state, 0, 1)
        _enter_risk0(state)
        apply_card(state, 0, CardKind.BEETLE)
        assert state.parcel(0).downgrade_next_saw is True
        assert state.parcel(1).downgrade_next_saw is False
        assert state.parcel(2).downgrade_next_saw is False

    def test_storm_spares_insured(self):
        state = _risk0_state(self.config)
        _plant(state, 0, 0, Species.PINE)
        _plant(state, 0, 1, Species.SPRUCE)
        _insure(state, 0, 1)
        _enter_risk0(state)
        apply_card(state, 0, CardKind.STORM)
        assert state.parcel(0).trees == 1200  # default severity 0.40
        assert state.parcel(1).trees == 2000
        assert [rec.cause for rec in state.parcel(0).losses] == ["storm"]

    def test_storm_severity_configurable(self):
        config = GameConfig(players=1, seed=8, deck_spec={"storm": 3}, storm_severity=0.25)
        state = new_game(config)
        _plant(state, 0, 0, Species.PINE)
        _enter_risk0(state)
        apply_card(state, 0, CardKind.STORM)
        assert state.parcel(0).trees == 1500

    def test_root_rot_flags_final_felling(self):
        state = _risk0_state(self.config)
        _plant(state, 0, 0, Species.SPRUCE)
        _enter_risk0(state)
        apply_card(state, 0, CardKind.ROOT_ROT)
        assert state.parcel(0).downgrade_final is True
        assert state.parcel(0).downgrade_next_saw is False

    def test_market_cards_move_global_modifier_only(self):
        state = _risk0_state(self.config)
        _plant(state, 0, 0, Species.PINE)
        _enter_risk0(state)
        apply_card(state, 0, CardKind.PRICE_DOWN)
        apply_card(state, 1, CardKind.PRICE_DOWN)
        assert state.price_modifier == -20
        assert state.parcel(0).trees == 2000
        apply_card(state, 0, CardKind.PRICE_UP)
        assert state.price_modifier == -10

    def test_disturbance_leaves_prices_alone(self):
        state = _risk0_state(self.config)
        _plant(state, 0, 0, Species.SPRUCE)
        _enter_risk0(state)
        for kind in (CardKind.MAMMAL, CardKind.BEETLE, CardKind.STORM, CardKind.ROOT_ROT):
            apply_card(state, 0, kind)
        assert state.price_modifier == 0

    def test_rejected_outside_risk_phase(self):
        state = _risk0_state(self.config)
        with pytest.raises(RuleViolation) as err:
            apply_card(state, 0, CardKind.STORM)
        assert err.value.reason == "illegal_phase"


class TestCardTexts:
    def test_every_kind_has_text(self):
        texts = card_texts()
        assert set(texts) == {kind.value for kind in CardKind}
        for entry in texts.values():
            assert entry["title"] and entry["body"]
