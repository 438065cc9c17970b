from __future__ import annotations

from magic_selftest.games.classical import best_table_value, classical_value, enumeration_cost
from magic_selftest.games.rules import (
    GameSpec,
    MagicGame3xN,
    bob_game_answer_ok,
    enumerate_specs,
    game_round_accept,
    load_spec,
    magic_square,
    parse_spec_text,
    row_cells,
    validate_spec,
)

__all__ = [
    "GameSpec",
    "MagicGame3xN",
    "best_table_value",
    "bob_game_answer_ok",
    "classical_value",
    "enumerate_specs",
    "enumeration_cost",
    "game_round_accept",
    "load_spec",
    "magic_square",
    "parse_spec_text",
    "row_cells",
    "validate_spec",
]
