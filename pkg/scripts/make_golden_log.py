#!/usr/bin/env python3
"""Regenerate the golden decision-log fixtures under tests/golden/.

Run from the repository root after any intentional change to the log format
or rules; commit the resulting files together with the change.
"""

from __future__ import annotations

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from woodlot import GameConfig, Species  # noqa: E402
from woodlot.engine import new_game  # noqa: E402
from woodlot.logio import write_log  # noqa: E402
from woodlot.strategy import Policy, rollout  # noqa: E402

GOLDEN_DIR = Path(__file__).resolve().parents[1] / "tests" / "golden"

GOLDEN_CONFIG = GameConfig(players=4, seed=20_250_601)
GOLDEN_POLICIES = [
    Policy(species_mix=(Species.PINE,), plant_count=8),
    Policy(species_mix=(Species.SPRUCE,), plant_count=5, insure_species=frozenset({Species.SPRUCE})),
    Policy(species_mix=(Species.BIRCH, Species.PINE), plant_count=6),
    Policy(species_mix=(Species.SPRUCE,), plant_count=7),
]


def main() -> None:
    GOLDEN_DIR.mkdir(parents=True, exist_ok=True)

    result = rollout(GOLDEN_POLICIES, GOLDEN_CONFIG, seed=GOLDEN_CONFIG.seed)
    write_log(GOLDEN_DIR / "golden_game.log", result.log)
    from woodlot.engine import replay

    digest = replay(result.log).digest()
    (GOLDEN_DIR / "golden_game.digest").write_text(digest + "\n", encoding="utf-8")

    empty = new_game(GameConfig(players=4, seed=7))
    write_log(GOLDEN_DIR / "empty_game.log", empty.log)

    print("golden_game.log digest:", digest)
    print("events:", len(result.log.events))


if __name__ == "__main__":
    main()
