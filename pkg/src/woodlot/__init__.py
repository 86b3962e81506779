"""Woodlot: a deterministic forest-rotation management game.

Players plant, insure, lease, and harvest hectare parcels over a 60-year
cycle punctuated by multi-risk cards; every game is replayable bit-exactly
from its decision log, scored on eight ecosystem/economy indicators, and
explorable through a Monte Carlo policy lab and a multiplayer HTTP service.
"""

from .config import CoefficientTable, GameConfig
from .economics import (
    CashFlow,
    CashFlowKind,
    HarvestResult,
    PriceTable,
    YieldSchedule,
    harvest_revenue,
    harvest_yield,
    insurance_premium,
    npv,
    stocking_fraction,
)
from .engine import (
    advance_phase,
    advance_to_next_decision,
    apply_action,
    legal_actions,
    new_game,
    public_view,
    replay,
    state_digest,
)
from .errors import (
    ConfigError,
    LogValidationError,
    PolicyFault,
    RuleViolation,
    SchemaError,
    StateSpaceError,
)
from .models import (
    Action,
    ActionKind,
    DecisionLog,
    GamePhase,
    GameState,
    Parcel,
    Player,
    Species,
)
from .outcomes import (
    IndicatorVector,
    ScoreReport,
    build_report,
    compute_indicators,
    import_external_indicators,
    scale_1_100,
)
from .risk import CardKind, Deck, apply_card, build_deck, draw
from .strategy import (
    EvaluationResult,
    Policy,
    enumerate_exact,
    evaluate_mc,
    rollout,
    search_policies,
)

__version__ = "0.1.0"
