from __future__ import annotations

import pytest

from woodlot import GameConfig, Species
from woodlot.strategy import Policy


@pytest.fixture
def default_config() -> GameConfig:
    return GameConfig(seed=42)


@pytest.fixture
def solo_config() -> GameConfig:
    return GameConfig(players=1, seed=42)


@pytest.fixture
def calm_config() -> GameConfig:
    """A deck that cannot disturb spruce economics: mammal cards only touch
    pine/birch and only in the first risk phase."""
    return GameConfig(players=1, seed=42, deck_spec={"mammal": 20})


@pytest.fixture
def spruce_max() -> Policy:
    return Policy(species_mix=(Species.SPRUCE,), plant_count=None)
