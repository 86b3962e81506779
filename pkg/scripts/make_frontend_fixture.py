#!/usr/bin/env python3
"""Record a scripted 2-player session through the live service into a JSON
fixture for the web client's tests.

The capture holds every request/response the browser client would see:
state views after each accepted action, the full event stream, and the final
score report. Regenerate with:

    python3 scripts/make_frontend_fixture.py
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from fastapi.testclient import TestClient  # noqa: E402

from woodlot.service import create_app  # noqa: E402

FIXTURE = Path(__file__).resolve().parents[1] / "frontend" / "tests" / "fixtures" / "session.json"

CONFIG = {
    "players": 2,
    "seed": 2024,
    "deck": {"mammal": 2, "beetle": 2, "storm": 1, "price_up": 1},
    "player_names": None,
}

# One full game: Aino plants and harvests two parcels (one insured), Björn
# plants one and skips the first thinning.
SCRIPT = [
    (0, {"kind": "plant", "parcel": 0, "species": "pine"}),
    (0, {"kind": "plant", "parcel": 1, "species": "spruce"}),
    (0, {"kind": "buy_insurance", "parcel": 1}),
    (1, {"kind": "plant", "parcel": 10, "species": "birch"}),
    (0, {"kind": "pass"}),
    (1, {"kind": "pass"}),
    (0, {"kind": "harvest", "parcel": 0}),
    (0, {"kind": "harvest", "parcel": 1}),
    (1, {"kind": "skip", "parcel": 10}),
    (0, {"kind": "pass"}),
    (1, {"kind": "pass"}),
    (0, {"kind": "harvest", "parcel": 0}),
    (0, {"kind": "harvest", "parcel": 1}),
    (1, {"kind": "harvest", "parcel": 10}),
    (0, {"kind": "pass"}),
    (1, {"kind": "pass"}),
    (0, {"kind": "harvest", "parcel": 0}),
    (0, {"kind": "harvest", "parcel": 1}),
    (1, {"kind": "harvest", "parcel": 10}),
    (0, {"kind": "pass"}),
    (1, {"kind": "pass"}),
]

# A deliberately illegal submission to capture the rejection shape.
REJECTED = (1, {"kind": "plant", "parcel": 0, "species": "pine"})


def main() -> None:
    import tempfile

    with tempfile.TemporaryDirectory() as tmp:
        client = TestClient(create_app(tmp))
        game_id = client.post("/games", json={"config": {k: v for k, v in CONFIG.items() if v is not None}}).json()["id"]
        tokens = [
            client.post(f"/games/{game_id}/join", json={"name": name}).json()["token"]
            for name in ("Aino", "Björn")
        ]

        steps = []
        for seat, action in SCRIPT:
            response = client.post(
                f"/games/{game_id}/actions", json={"token": tokens[seat], "action": action}
            )
            assert response.status_code == 200, (action, response.text)
            view = client.get(f"/games/{game_id}/state", params={"token": tokens[seat]}).json()
            steps.append({"seat": seat, "action": action, "view": view})

        seat, action = REJECTED
        rejection = client.post(
            f"/games/{game_id}/actions", json={"token": tokens[seat], "action": action}
        )
        assert rejection.status_code == 409

        events = []
        with client.stream("GET", f"/games/{game_id}/events?after=0&wait=0") as stream:
            for line in stream.iter_lines():
                if line.startswith("data: "):
                    events.append(json.loads(line[len("data: ") :]))

        report = client.get(f"/games/{game_id}/report").json()
        cards = client.get("/meta/cards").json()
        final_view = client.get(f"/games/{game_id}/state", params={"token": tokens[0]}).json()

        fixture = {
            "config": CONFIG,
            "steps": steps,
            "rejection": {"seat": seat, "action": action, "detail": rejection.json()["detail"]},
            "events": events,
            "report": report,
            "final_view": final_view,
            "card_texts": cards,
        }
        FIXTURE.parent.mkdir(parents=True, exist_ok=True)
        FIXTURE.write_text(json.dumps(fixture, indent=1, sort_keys=True), encoding="utf-8")
        print(f"wrote {FIXTURE} ({len(steps)} steps, {len(events)} events)")


if __name__ == "__main__":
    main()
