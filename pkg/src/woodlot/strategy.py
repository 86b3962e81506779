"""Policy evaluation lab: scripted policies, full-game rollouts, Monte Carlo
estimation with common random numbers, and an exact enumeration oracle for
small decks.

Per-rollout seeds are derived from (master seed, rollout index) with a
splitmix64 mix, so two policy sets evaluated under the same master seed face
identical card sequences rollout for rollout.
"""

from __future__ import annotations

import csv
import io
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Iterable, Mapping, Optional, Sequence

from . import economics, engine, outcomes, risk
from .config import GameConfig, INDICATOR_FIELDS
from .errors import ConfigError, PolicyFault, RuleViolation, StateSpaceError
from .models import (
    Action,
    ActionKind,
    DecisionLog,
    GamePhase,
    GameState,
    Species,
    YIELD_PHASES,
)

EXPERIMENT_FORMAT = "woodlot-experiment/1"
RESULTS_FORMAT = "woodlot-experiment-results/1"

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(value: int) -> int:
    """One splitmix64 output step; the documented rollout-seed mixer."""
    value = (value + _GOLDEN) & _MASK64
    value = ((value ^ (value >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    value = ((value ^ (value >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (value ^ (value >> 31)) & _MASK64


def derive_rollout_seed(master_seed: int, index: int) -> int:
    return splitmix64((master_seed & _MASK64) ^ splitmix64(index))


# ---------------------------------------------------------------------------
# Policies


@dataclass(frozen=True)
class Policy:
    """A deterministic scripted player.

    ``species_mix`` is cycled over the player's parcels in id order;
    ``plant_count`` caps how many parcels to plant at year 0 (None = as many
    as cash allows); ``insure_species`` lists the species insured right after
    planting (None = never insure); ``harvest`` maps each yield phase to
    "harvest" or "skip".
    """

    species_mix: tuple[Species, ...] = (Species.SPRUCE,)
    plant_count: Optional[int] = None
    insure_species: Optional[frozenset[Species]] = None
    harvest: Mapping[GamePhase, str] = field(
        default_factory=lambda: {p: "harvest" for p in YIELD_PHASES}
    )
    lease_out: Optional[tuple[int, int]] = None  # (parcels, price), offered at year 0
    accept_leases: bool = False

    def policy_id(self) -> str:
        mix = "+".join(s.value for s in self.species_mix)
        plant = "max" if self.plant_count is None else str(self.plant_count)
        if self.insure_species is None:
            ins = "never"
        elif self.insure_species == frozenset(Species):
            ins = "always"
        else:
            ins = "+".join(sorted(s.value for s in self.insure_species))
        marks = "".join("H" if self.harvest[p] == "harvest" else "S" for p in YIELD_PHASES)
        lease = "none" if self.lease_out is None else f"{self.lease_out[0]}@{self.lease_out[1]}"
        accept = "y" if self.accept_leases else "n"
        return f"mix={mix}|plant={plant}|ins={ins}|harvest={marks}|lease={lease}|accept={accept}"

    def to_doc(self) -> dict[str, Any]:
        if self.insure_species is None:
            insurance: Any = "never"
        elif self.insure_species == frozenset(Species):
            insurance = "always_y0"
        else:
            insurance = {"species": sorted(s.value for s in self.insure_species)}
        return {
            "species": [s.value for s in self.species_mix],
            "plant": "max" if self.plant_count is None else self.plant_count,
            "insurance": insurance,
            "harvest": {p.value: self.harvest[p] for p in YIELD_PHASES},
            "lease": None
            if self.lease_out is None
            else {"parcels": self.lease_out[0], "price": self.lease_out[1]},
            "accept_leases": self.accept_leases,
        }

    @classmethod
    def from_doc(cls, doc: Mapping[str, Any]) -> "Policy":
        species_raw = doc.get("species", ["spruce"])
        if isinstance(species_raw, str):
            species_raw = [species_raw]
        mix = tuple(Species(s) for s in species_raw)
        plant_raw = doc.get("plant", "max")
        plant = None if plant_raw in ("max", None) else int(plant_raw)
        ins_raw = doc.get("insurance", "never")
        if ins_raw == "never":
            insure = None
        elif ins_raw == "always_y0":
            insure = frozenset(Species)
        elif isinstance(ins_raw, Mapping):
            insure = frozenset(Species(s) for s in ins_raw.get("species", []))
        else:
            raise ConfigError(f"unknown insurance rule {ins_raw!r}")
        harvest_raw = doc.get("harvest", {})
        harvest = {}
        for phase in YIELD_PHASES:
            choice = harvest_raw.get(phase.value, "harvest")
            if choice not in ("harvest", "skip"):
                raise ConfigError(f"harvest rule must be harvest/skip, got {choice!r}")
            harvest[phase] = choice
        lease_raw = doc.get("lease")
        lease = None
        if lease_raw:
            lease = (int(lease_raw["parcels"]), int(lease_raw["price"]))
        return cls(
            species_mix=mix,
            plant_count=plant,
            insure_species=insure,
            harvest=harvest,
            lease_out=lease,
            accept_leases=bool(doc.get("accept_leases", False)),
        )

    def phase_actions(self, state: GameState, player_id: int) -> list[Action]:
        """All actions for the current phase, ending with Pass. Total by
        construction: every emitted action is affordability-checked against
        the running cash projection."""
        player = state.player(player_id)
        actions: list[Action] = []
        cash = player.cash
        if state.phase is GamePhase.Y0_PLANTING:
            parcels = [state.parcel(pid) for pid in sorted(player.managed)]
            unplanted = [p for p in parcels if p.species is None]
            budget = len(unplanted) if self.plant_count is None else min(self.plant_count, len(unplanted))
            planted_now: list[tuple[int, Species]] = []
            for i, parcel in enumerate(unplanted[:budget]):
                if cash < state.config.planting_cost:
                    break
                species = self.species_mix[i % len(self.species_mix)]
                actions.append(Action(player_id, ActionKind.PLANT, parcel=parcel.id, species=species))
                planted_now.append((parcel.id, species))
                cash -= state.config.planting_cost
            if self.insure_species is not None:
                premium = economics.INSURANCE_PREMIUM[GamePhase.Y0_PLANTING]
                already = [
                    (p.id, p.species)
                    for p in parcels
                    if p.species is not None and not p.insured
                ]
                for pid, species in already + planted_now:
                    if species in self.insure_species and cash >= premium:
                        actions.append(Action(player_id, ActionKind.BUY_INSURANCE, parcel=pid))
                        cash -= premium
            if self.lease_out is not None:
                count, price = self.lease_out
                offered = {o.parcel for o in state.lease_offers if o.open}
                candidates = [
                    p
                    for p in parcels
                    if p.owner == player_id
                    and p.species is None
                    and p.id not in offered
                    and p.id not in {pid for pid, _ in planted_now}
                ]
                for parcel in candidates[:count]:
                    actions.append(
                        Action(player_id, ActionKind.LEASE_OFFER, parcel=parcel.id, price=price)
                    )
        if self.accept_leases and state.is_decision_phase:
            for offer in state.lease_offers:
                if offer.open and offer.offerer != player_id and cash >= offer.price:
                    actions.append(Action(player_id, ActionKind.LEASE_ACCEPT, offer=offer.id))
                    cash -= offer.price
        if state.phase in YIELD_PHASES and self.harvest[state.phase] == "harvest":
            for pid in sorted(player.managed):
                parcel = state.parcel(pid)
                if parcel.species is not None and parcel.trees > 0 and pid not in state.decisions:
                    actions.append(Action(player_id, ActionKind.HARVEST, parcel=pid))
        actions.append(Action(player_id, ActionKind.PASS))
        return actions


def _play(state: GameState, policies: Sequence[Policy]) -> GameState:
    """Drive a game to the finish with one policy per seat."""
    while not state.finished:
        if state.is_decision_phase:
            for player in state.players:
                if player.id in state.passed:
                    continue
                for action in policies[player.seat].phase_actions(state, player.id):
                    try:
                        engine.apply_action(state, action)
                    except RuleViolation as exc:
                        raise PolicyFault(
                            player.seat,
                            f"illegal {action.kind.value} in {state.phase.value}: {exc}",
                        ) from exc
        engine.advance_to_next_decision(state)
    return state


@dataclass
class RolloutOutcome:
    log: DecisionLog
    report: outcomes.ScoreReport
    net_cash: list[int]  # per seat, relative to starting cash
    npv: list[float]  # per seat
    indicators: list[dict[str, float]]  # per seat


def rollout(
    policies: Sequence[Policy], config: GameConfig, seed: int
) -> RolloutOutcome:
    """Play one complete game with the given seed; deterministic for fixed
    inputs and replayable from the returned log."""
    if len(policies) != config.players:
        raise ConfigError(f"need {config.players} policies, got {len(policies)}")
    state = engine.new_game(config.with_seed(seed))
    _play(state, policies)
    return _outcome_from_state(state)


def _outcome_from_state(state: GameState) -> RolloutOutcome:
    report = outcomes.build_report(state.log, state=state)
    vectors = {p["id"]: p["raw"] for p in report.players}
    return RolloutOutcome(
        log=state.log,
        report=report,
        net_cash=[economics.net_cash(p.flows) for p in state.players],
        npv=[vectors[p.id]["net_present_value"] for p in state.players],
        indicators=[vectors[p.id] for p in state.players],
    )


# ---------------------------------------------------------------------------
# Random legal play (test driver)


def random_playout(
    config: GameConfig,
    decision_seed: int,
    check: Optional[Callable[[GameState], None]] = None,
) -> GameState:
    """Play a full game choosing uniformly among legal actions.

    The decision RNG is independent of the game seed. ``check`` runs after
    every applied event (actions, draws, phase advances), which is how the
    conservation suite audits each step.
    """
    rng = random.Random(decision_seed)
    state = engine.new_game(config)
    if check:
        check(state)
    while not state.finished:
        if state.is_decision_phase:
            open_players = [p.id for p in state.players if p.id not in state.passed]
            if open_players:
                actor = rng.choice(open_players)
                options = engine.legal_actions(state, actor)
                action = rng.choice(options)
                if action.kind is ActionKind.PLANT:
                    action.species = rng.choice(list(Species))
                elif action.kind is ActionKind.LEASE_OFFER:
                    action.price = rng.randrange(0, 3001)
                engine.apply_action(state, action)
                if check:
                    check(state)
                continue
        engine.advance_phase(state)
        if check:
            check(state)
    return state


# ---------------------------------------------------------------------------
# Monte Carlo evaluation


@dataclass
class EvaluationResult:
    samples: int
    mean_net_cash: float
    var_net_cash: float
    ci_net_cash: float  # 95% half-width for the mean
    mean_npv: float
    var_npv: float
    ci_npv: float
    indicator_means: dict[str, float]

    def to_doc(self) -> dict[str, Any]:
        return {
            "samples": self.samples,
            "mean_net_cash": self.mean_net_cash,
            "var_net_cash": self.var_net_cash,
            "ci_net_cash": self.ci_net_cash,
            "mean_npv": self.mean_npv,
            "var_npv": self.var_npv,
            "ci_npv": self.ci_npv,
            "indicator_means": self.indicator_means,
        }


def _draws_in_game(config: GameConfig) -> int:
    # One card per player in each of the three risk phases.
    return 3 * config.players


def _draw_prefix(config: GameConfig, seed: int, count: int) -> tuple[str, ...]:
    """The first ``count`` cards the seeded deck will deal, via the same deck
    code path the engine uses."""
    deck = risk.build_deck(config.deck_spec, seed)
    return tuple(deck.cards[i].value for i in range(count))


def evaluate_mc(
    policies: Sequence[Policy],
    config: GameConfig,
    samples: int,
    master_seed: int,
    seat: int = 0,
) -> EvaluationResult:
    """Estimate a seat's outcome distribution over ``samples`` independent
    rollouts seeded from ``master_seed``.

    Deterministic policies make each rollout a pure function of its card
    sequence, so when the game cannot exhaust the deck (draws <= deck size)
    outcomes are cached per draw prefix; results are bitwise identical to
    playing every rollout in full.
    """
    if samples < 1:
        raise ConfigError("need at least one sample")
    if not 0 <= seat < config.players:
        raise ConfigError(f"seat {seat} out of range")
    draws = _draws_in_game(config)
    cacheable = draws <= sum(config.deck_spec.values())
    cache: dict[tuple[str, ...], tuple[int, float, dict[str, float]]] = {}

    cash_values: list[int] = []
    npv_values: list[float] = []
    indicator_sums = {name: 0.0 for name in INDICATOR_FIELDS}
    for index in range(samples):
        seed = derive_rollout_seed(master_seed, index)
        key = _draw_prefix(config, seed, draws) if cacheable else None
        if key is not None and key in cache:
            cash, npv_value, indicators = cache[key]
        else:
            try:
                result = rollout(policies, config, seed)
            except PolicyFault as exc:
                raise PolicyFault(exc.seat, f"rollout {index}: {exc}") from exc
            cash = result.net_cash[seat]
            npv_value = result.npv[seat]
            indicators = result.indicators[seat]
            if key is not None:
                cache[key] = (cash, npv_value, indicators)
        cash_values.append(cash)
        npv_values.append(npv_value)
        for name in INDICATOR_FIELDS:
            indicator_sums[name] += indicators[name]

    mean_cash, var_cash = _mean_var_int(cash_values)
    mean_npv, var_npv = _mean_var_float(npv_values)
    return EvaluationResult(
        samples=samples,
        mean_net_cash=mean_cash,
        var_net_cash=var_cash,
        ci_net_cash=1.96 * math.sqrt(var_cash / samples),
        mean_npv=mean_npv,
        var_npv=var_npv,
        ci_npv=1.96 * math.sqrt(var_npv / samples),
        indicator_means={name: total / samples for name, total in indicator_sums.items()},
    )


def _mean_var_int(values: list[int]) -> tuple[float, float]:
    """Mean and sample variance from exact integer sums."""
    n = len(values)
    total = sum(values)
    if n == 1:
        return float(total), 0.0
    sq = sum(v * v for v in values)
    mean = total / n
    var = (sq - total * total / n) / (n - 1)
    return mean, max(0.0, var)


def _mean_var_float(values: list[float]) -> tuple[float, float]:
    n = len(values)
    mean = math.fsum(values) / n
    if n == 1:
        return mean, 0.0
    var = math.fsum((v - mean) ** 2 for v in values) / (n - 1)
    return mean, var


# ---------------------------------------------------------------------------
# Exact enumeration oracle


@dataclass
class ExactResult:
    sequences: int
    mean_net_cash: Fraction
    mean_npv: float
    indicator_means: dict[str, float]

    @property
    def mean_net_cash_float(self) -> float:
        return float(self.mean_net_cash)


def enumerate_exact(
    policies: Sequence[Policy],
    config: GameConfig,
    draws_per_phase: Optional[int] = None,
    seat: int = 0,
    limit: int = 10**6,
) -> ExactResult:
    """Exact expectation over all equally likely card orderings.

    Only usable when the game cannot exhaust the deck (a reshuffle would make
    orderings non-uniform to enumerate) and when the number of distinct kind
    sequences stays within ``limit``.
    """
    if draws_per_phase is not None and draws_per_phase != config.players:
        raise ConfigError(
            "the engine draws one card per player per risk phase; "
            f"draws_per_phase={draws_per_phase} would not match live play"
        )
    total_draws = _draws_in_game(config)
    counts = {risk.CardKind(k): int(v) for k, v in config.deck_spec.items() if int(v) > 0}
    deck_size = sum(counts.values())
    if total_draws > deck_size:
        raise StateSpaceError(
            f"{total_draws} draws exceed the {deck_size}-card deck; reshuffles "
            "cannot be enumerated as uniform orderings"
        )
    sequences = _count_sequences(counts, total_draws, limit)

    acc_cash = Fraction(0)
    acc_npv = Fraction(0)
    acc_ind = {name: Fraction(0) for name in INDICATOR_FIELDS}
    leftovers: Callable[[dict[risk.CardKind, int]], list[risk.CardKind]] = lambda left: [
        kind for kind in risk.CardKind for _ in range(left.get(kind, 0))
    ]

    def visit(remaining: dict[risk.CardKind, int], prefix: list[risk.CardKind], prob: Fraction) -> None:
        if len(prefix) == total_draws:
            order = prefix + leftovers(remaining)
            state = engine.new_game(config, deck_order=order)
            _play(state, policies)
            player = state.players[seat]
            nonlocal acc_cash, acc_npv
            acc_cash += prob * economics.net_cash(player.flows)
            vectors = outcomes.indicators_from_state(state)
            doc = vectors[player.id].to_doc()
            acc_npv += prob * Fraction(str(doc["net_present_value"]))
            for name in INDICATOR_FIELDS:
                acc_ind[name] += prob * Fraction(doc[name])
            return
        left_total = sum(remaining.values())
        for kind in risk.CardKind:
            count = remaining.get(kind, 0)
            if count == 0:
                continue
            remaining[kind] = count - 1
            prefix.append(kind)
            visit(remaining, prefix, prob * Fraction(count, left_total))
            prefix.pop()
            remaining[kind] = count

    visit(dict(counts), [], Fraction(1))
    return ExactResult(
        sequences=sequences,
        mean_net_cash=acc_cash,
        mean_npv=float(acc_npv),
        indicator_means={name: float(v) for name, v in acc_ind.items()},
    )


def _count_sequences(counts: Mapping[risk.CardKind, int], depth: int, limit: int) -> int:
    memo: dict[tuple, int] = {}

    def rec(state: tuple[int, ...], d: int) -> int:
        if d == 0:
            return 1
        key = (state, d)
        if key in memo:
            return memo[key]
        total = 0
        for i, count in enumerate(state):
            if count:
                total += rec(state[:i] + (count - 1,) + state[i + 1 :], d - 1)
                if total > limit:
                    raise StateSpaceError(f"more than {limit} distinct draw sequences")
        memo[key] = total
        return total

    return rec(tuple(counts.values()), depth)


# ---------------------------------------------------------------------------
# Policy search


def search_policies(
    candidates: Sequence[Policy],
    config: GameConfig,
    budget: int,
    master_seed: int,
    objective: str = "npv",
    seat: int = 0,
    baseline: Optional[Sequence[Policy]] = None,
) -> list[tuple[Policy, EvaluationResult]]:
    """Evaluate each candidate with common random numbers and rank them.

    ``budget`` is the number of rollouts per candidate. The candidate under
    test occupies ``seat``; other seats play ``baseline`` policies (default:
    plant-nothing). Ties break on lower variance, then policy id.
    """
    if not candidates:
        raise ConfigError("empty policy space")
    if budget < 1:
        raise ConfigError("search budget must be at least one rollout per candidate")
    if objective not in ("npv", "net_cash"):
        raise ConfigError(f"unknown objective {objective!r}")
    others = list(baseline) if baseline is not None else [
        Policy(plant_count=0) for _ in range(config.players - 1)
    ]
    if len(others) != config.players - 1:
        raise ConfigError("baseline must cover every non-candidate seat")

    ranked: list[tuple[Policy, EvaluationResult]] = []
    for candidate in candidates:
        seats = list(others)
        seats.insert(seat, candidate)
        ranked.append((candidate, evaluate_mc(seats, config, budget, master_seed, seat=seat)))

    def key(item: tuple[Policy, EvaluationResult]):
        policy, result = item
        if objective == "npv":
            return (-result.mean_npv, result.var_npv, policy.policy_id())
        return (-result.mean_net_cash, result.var_net_cash, policy.policy_id())

    ranked.sort(key=key)
    return ranked


# ---------------------------------------------------------------------------
# Experiment documents


def expand_grid(grid: Mapping[str, Sequence[Any]]) -> list[Policy]:
    """Cross product of policy-field values into concrete policies."""
    keys = sorted(grid)
    policies: list[Policy] = []

    def rec(i: int, doc: dict[str, Any]) -> None:
        if i == len(keys):
            policies.append(Policy.from_doc(doc))
            return
        for value in grid[keys[i]]:
            rec(i + 1, {**doc, keys[i]: value})

    rec(0, {})
    return policies


def run_experiment(doc: Mapping[str, Any]) -> dict[str, Any]:
    """Run an experiment document: evaluate a policy grid or candidate list
    and return the ranked-results document."""
    if doc.get("format") != EXPERIMENT_FORMAT:
        raise ConfigError(f"unsupported experiment format {doc.get('format')!r}")
    config = GameConfig.from_doc(doc.get("config", {}))
    samples = int(doc.get("samples", 100))
    master_seed = int(doc.get("master_seed", 0))
    objective = doc.get("objective", "npv")
    seat = int(doc.get("seat", 0))
    if "candidates" in doc:
        candidates = [Policy.from_doc(d) for d in doc["candidates"]]
    elif "grid" in doc:
        candidates = expand_grid(doc["grid"])
    else:
        raise ConfigError("experiment needs 'candidates' or 'grid'")
    baseline = None
    if "baseline" in doc:
        baseline = [Policy.from_doc(d) for d in doc["baseline"]]
    ranked = search_policies(
        candidates, config, samples, master_seed, objective=objective, seat=seat, baseline=baseline
    )
    top_policy = ranked[0][0]
    seats = list(baseline) if baseline is not None else [
        Policy(plant_count=0) for _ in range(config.players - 1)
    ]
    seats.insert(seat, top_policy)
    sample_report = rollout(seats, config, derive_rollout_seed(master_seed, 0)).report
    return {
        "format": RESULTS_FORMAT,
        "experiment": dict(doc),
        "results": [
            {
                "rank": i + 1,
                "policy_id": policy.policy_id(),
                "policy": policy.to_doc(),
                "evaluation": result.to_doc(),
            }
            for i, (policy, result) in enumerate(ranked)
        ],
        "sample_report": sample_report.to_doc(),
    }


def results_to_csv(results_doc: Mapping[str, Any]) -> str:
    """Ranked results as CSV (one row per policy)."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(
        [
            "rank",
            "policy_id",
            "samples",
            "mean_npv",
            "ci_npv",
            "mean_net_cash",
            "ci_net_cash",
            "var_net_cash",
        ]
    )
    for row in results_doc["results"]:
        ev = row["evaluation"]
        writer.writerow(
            [
                row["rank"],
                row["policy_id"],
                ev["samples"],
                f"{ev['mean_npv']:.2f}",
                f"{ev['ci_npv']:.2f}",
                f"{ev['mean_net_cash']:.2f}",
                f"{ev['ci_net_cash']:.2f}",
                f"{ev['var_net_cash']:.2f}",
            ]
        )
    return buffer.getvalue()
