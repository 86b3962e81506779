#!/usr/bin/env python3
"""Insurance study: is insuring spruce worth the premium under beetle-heavy
decks?

Compares insure-never / insure-spruce policies by Monte Carlo and, where the
deck allows, against the exact enumeration oracle. Usage:

    python3 scripts/run_insurance_study.py [--samples N] [--master-seed S]
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from woodlot import GameConfig, Species  # noqa: E402
from woodlot.errors import StateSpaceError  # noqa: E402
from woodlot.strategy import Policy, enumerate_exact, evaluate_mc  # noqa: E402

DECKS = {
    "beetles-only (4)": {"beetle": 4},
    "mixed small (5)": {"beetle": 2, "storm": 1, "price_up": 1, "price_down": 1},
    "default (20)": {"mammal": 4, "beetle": 4, "storm": 3, "root_rot": 3, "price_up": 3, "price_down": 3},
}

POLICIES = {
    "never": Policy(species_mix=(Species.SPRUCE,), plant_count=5),
    "insure-spruce": Policy(
        species_mix=(Species.SPRUCE,), plant_count=5, insure_species=frozenset({Species.SPRUCE})
    ),
}


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--samples", type=int, default=2000)
    parser.add_argument("--master-seed", type=int, default=7)
    args = parser.parse_args()

    for deck_name, deck in DECKS.items():
        config = GameConfig(players=1, seed=0, deck_spec=deck)
        print(f"\ndeck {deck_name}")
        for policy_name, policy in POLICIES.items():
            mc = evaluate_mc([policy], config, samples=args.samples, master_seed=args.master_seed)
            line = (
                f"  {policy_name:14s} mean net cash {mc.mean_net_cash:12.2f}"
                f" ± {mc.ci_net_cash:8.2f}   mean npv {mc.mean_npv:10.2f}"
            )
            try:
                exact = enumerate_exact([policy], config)
                line += f"   exact {float(exact.mean_net_cash):12.2f} ({exact.sequences} seqs)"
            except StateSpaceError:
                line += "   exact: deck too large to enumerate"
            print(line)


if __name__ == "__main__":
    main()
