"""Command-line entry point: create/replay/score games, run experiments,
serve multiplayer sessions, export reports.

Exit codes: 0 success, 2 usage, 3 unreadable/unwritable file, 4 validation
or schema failure, 5 rule/policy fault. Errors print one machine-parsable
``error: <category>: <message>`` line on stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Any, Optional, Sequence

from . import engine, logio, outcomes, strategy
from .canon import canonical_dumps
from .config import GameConfig, CoefficientTable, INDICATOR_FIELDS
from .errors import (
    ConfigError,
    LogValidationError,
    PolicyFault,
    RuleViolation,
    SchemaError,
    StateSpaceError,
)
from .models import Action, GamePhase

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_VALIDATION = 4
EXIT_RULE = 5

SCRIPT_FORMAT = "woodlot-script/1"


def _fail(category: str, message: str, code: int) -> int:
    print(f"error: {category}: {message}", file=sys.stderr)
    return code


def _load_json(path: str) -> Any:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise _CliIo(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path} is not valid JSON: {exc}") from exc


class _CliIo(Exception):
    pass


def _write_text(path: Optional[str], text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise _CliIo(f"cannot write {path}: {exc.strerror}") from exc


def _config_from_args(args: argparse.Namespace) -> GameConfig:
    doc: dict[str, Any] = {}
    if getattr(args, "config", None):
        doc = _load_json(args.config)
    if getattr(args, "players", None) is not None:
        doc["players"] = args.players
    if getattr(args, "seed", None) is not None:
        doc["seed"] = args.seed
    return GameConfig.from_doc(doc)


# ---------------------------------------------------------------------------
# Subcommands


def _cmd_new(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    state = engine.new_game(config)
    if args.script:
        _run_script(state, _load_json(args.script))
    else:
        _run_prompts(state)
    logio.write_log(args.out, state.log)
    print(f"log written to {args.out}")
    print(f"digest {state.digest()}")
    return EXIT_OK


def _run_script(state, doc: Any) -> None:
    """Execute a scripted action file: action events in the decision-log
    schema plus ``{"type": "advance"}`` phase boundaries."""
    if not isinstance(doc, dict) or doc.get("format") != SCRIPT_FORMAT:
        raise SchemaError(f"script must be a {SCRIPT_FORMAT} document")
    for i, event in enumerate(doc.get("events", [])):
        etype = event.get("type")
        try:
            if etype == "action":
                engine.apply_action(state, Action.from_doc(event))
            elif etype == "advance":
                engine.advance_to_next_decision(state)
            else:
                raise SchemaError(f"script event {i}: unknown type {etype!r}")
        except RuleViolation as exc:
            raise LogValidationError(f"script rejected: {exc}", event_index=i) from exc
    if doc.get("finish", False):
        # Pass everyone through the remaining phases so the log is complete.
        while not state.finished:
            _pass_all(state)
            engine.advance_to_next_decision(state)


def _pass_all(state) -> None:
    from .models import ActionKind

    for player in state.players:
        if player.id not in state.passed:
            engine.apply_action(state, Action(player.id, ActionKind.PASS))


def _run_prompts(state) -> None:
    """Minimal hotseat loop: list legal actions per player, pick by number."""
    print("hotseat game; choose actions by number, empty input to pass")
    while not state.finished:
        if not state.is_decision_phase or engine.phase_complete(state):
            engine.advance_phase(state)
            continue
        for player in state.players:
            if player.id in state.passed:
                continue
            options = engine.legal_actions(state, player.id)
            print(f"\n[{state.phase.value}] {player.name} (cash {player.cash})")
            for i, action in enumerate(options):
                print(f"  {i}: {canonical_dumps(action.to_doc())}")
            raw = input(f"{player.name}> ").strip()
            choice = options[-1] if raw == "" else options[int(raw)]
            engine.apply_action(state, choice)


def _cmd_replay(args: argparse.Namespace) -> int:
    game_log = logio.read_log(args.log)
    state = engine.replay(game_log)
    print(state.digest())
    return EXIT_OK


def _cmd_score(args: argparse.Namespace) -> int:
    game_log = logio.read_log(args.log)
    coeffs = None
    if args.coeffs:
        coeffs = CoefficientTable.from_doc(_load_json(args.coeffs))
    imported = _load_json(getattr(args, "import_doc")) if getattr(args, "import_doc") else None
    report = outcomes.build_report(game_log, coeffs=coeffs, imported=imported)
    _write_text(args.out, report.canonical() + "\n")
    return EXIT_OK


def _cmd_export(args: argparse.Namespace) -> int:
    game_log = logio.read_log(args.log)
    report = outcomes.build_report(game_log)
    if args.format == "report-json":
        _write_text(args.out, report.canonical() + "\n")
    else:
        _write_text(args.out, _report_csv(report))
    return EXIT_OK


def _report_csv(report: outcomes.ScoreReport) -> str:
    import csv
    import io

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["player", "name", "measure"] + list(INDICATOR_FIELDS))
    for entry in report.players:
        writer.writerow(
            [entry["id"], entry["name"], "raw"]
            + [repr(entry["raw"][name]) for name in INDICATOR_FIELDS]
        )
        writer.writerow(
            [entry["id"], entry["name"], "scaled"]
            + [repr(entry["scaled"][name]) for name in INDICATOR_FIELDS]
        )
    return buffer.getvalue()


def _cmd_bots(args: argparse.Namespace) -> int:
    doc = _load_json(args.experiment)
    results = strategy.run_experiment(doc)
    _write_text(args.out, canonical_dumps(results) + "\n")
    if args.csv:
        _write_text(args.csv, strategy.results_to_csv(results))
    top = results["results"][0]
    print(f"best policy: {top['policy_id']} (mean npv {top['evaluation']['mean_npv']:.2f})")
    return EXIT_OK


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    host = args.host or os.environ.get("WOODLOT_BIND", "127.0.0.1")
    port = args.port or int(os.environ.get("WOODLOT_PORT", "8000"))
    ui_dir = args.ui
    if ui_dir is None and Path("frontend/dist").is_dir():
        ui_dir = "frontend"
    app = create_app(args.data, ui_dir=ui_dir)
    uvicorn.run(app, host=host, port=port, log_level="info")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="woodlot", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_new = sub.add_parser("new", help="create a game from prompts or a scripted action file")
    p_new.add_argument("--players", type=int, default=None)
    p_new.add_argument("--seed", type=int, default=None)
    p_new.add_argument("--config", help="JSON config document")
    p_new.add_argument("--script", help="scripted action file (woodlot-script/1)")
    p_new.add_argument("--out", required=True, help="decision log output path")
    p_new.set_defaults(func=_cmd_new)

    p_serve = sub.add_parser("serve", help="run the multiplayer session service")
    p_serve.add_argument("--host", default=None)
    p_serve.add_argument("--port", type=int, default=None)
    p_serve.add_argument("--data", default="./woodlot-data", help="session/log directory")
    p_serve.add_argument("--ui", default=None, help="built web client directory to mount at /app")
    p_serve.set_defaults(func=_cmd_serve)

    p_bots = sub.add_parser("bots", help="run a policy-evaluation experiment")
    p_bots.add_argument("--experiment", required=True, help="experiment spec document")
    p_bots.add_argument("--out", required=True, help="ranked results JSON path")
    p_bots.add_argument("--csv", help="also write the ranking as CSV")
    p_bots.set_defaults(func=_cmd_bots)

    p_replay = sub.add_parser("replay", help="validate a log and print its final state digest")
    p_replay.add_argument("log")
    p_replay.set_defaults(func=_cmd_replay)

    p_score = sub.add_parser("score", help="emit the score report for a decision log")
    p_score.add_argument("log")
    p_score.add_argument("--coeffs", help="coefficient table JSON overriding the log's config")
    p_score.add_argument("--import", dest="import_doc", help="externally simulated indicators")
    p_score.add_argument("--out", default="-", help="output path (default stdout)")
    p_score.set_defaults(func=_cmd_score)

    p_export = sub.add_parser("export", help="export a log's score report")
    p_export.add_argument("log")
    p_export.add_argument("--format", choices=("report-json", "csv"), default="report-json")
    p_export.add_argument("--out", default="-", help="output path (default stdout)")
    p_export.set_defaults(func=_cmd_export)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except _CliIo as exc:
        return _fail("io", str(exc), EXIT_IO)
    except FileNotFoundError as exc:
        return _fail("io", f"{exc.filename}: not found", EXIT_IO)
    except (ConfigError, SchemaError, LogValidationError, StateSpaceError) as exc:
        return _fail("validation", str(exc), EXIT_VALIDATION)
    except (RuleViolation, PolicyFault) as exc:
        return _fail("rule", str(exc), EXIT_RULE)


if __name__ == "__main__":
    sys.exit(main())
