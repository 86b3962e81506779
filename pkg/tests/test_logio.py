"""Decision-log file format: canonical bytes, round trips, and validation."""

from __future__ import annotations

import pytest

from woodlot import GameConfig
from woodlot.canon import canonical_dumps, sha256_hex
from woodlot.engine import new_game, replay
from woodlot.errors import LogValidationError
from woodlot.logio import dumps_log, loads_log, read_log, write_log
from woodlot.strategy import random_playout


def test_round_trip_preserves_digest(tmp_path, default_config):
    state = random_playout(default_config, decision_seed=9)
    path = tmp_path / "game.log"
    write_log(path, state.log)
    loaded = read_log(path)
    assert loaded.header == state.log.header
    assert loaded.events == state.log.events
    assert loaded.digest() == state.log.digest()
    assert replay(loaded).digest() == state.digest()


def test_bytes_are_canonical_and_stable(default_config):
    state = new_game(default_config)
    text = dumps_log(state.log)
    assert text == dumps_log(replay(state.log).log)
    # Digest is over the exact serialized bytes.
    assert sha256_hex(text) == state.log.digest()
    header_line = text.splitlines()[0]
    assert header_line == canonical_dumps(state.log.header)


def test_empty_file_rejected():
    with pytest.raises(LogValidationError):
        loads_log("")


def test_bad_header_rejected():
    with pytest.raises(LogValidationError):
        loads_log('{"format":"other/1"}\n')
    with pytest.raises(LogValidationError):
        loads_log("not json\n")


def test_malformed_event_names_index(default_config):
    state = new_game(default_config)
    text = dumps_log(state.log) + "{broken\n"
    with pytest.raises(LogValidationError) as err:
        loads_log(text)
    assert err.value.event_index == 0


def test_config_document_round_trip():
    config = GameConfig(players=2, seed=9, storm_severity=0.25, deck_spec={"storm": 5})
    rebuilt = GameConfig.from_doc(config.to_doc())
    assert rebuilt == config
    assert rebuilt.to_doc() == config.to_doc()
