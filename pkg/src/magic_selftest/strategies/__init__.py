from __future__ import annotations

from magic_selftest.strategies.baselines import (
    MERMIN_PERES,
    greedy_commuting,
    padded_adversary,
    padded_alice,
    standard_square_device,
)
from magic_selftest.strategies.descriptor import device_from_descriptor
from magic_selftest.strategies.devices import (
    ONE_SIDE_LOCAL_KINDS,
    DeviceKind,
    DeviceModel,
    answer_length,
)
from magic_selftest.strategies.factory import build_device
from magic_selftest.strategies.honest import (
    ROW_LETTERS,
    PairCheckSet,
    game_pair_measurements,
    honest_alice,
    honest_bob_game,
    honest_bob_local_check,
    honest_bob_pair_check,
    honest_device,
    supports_selftest,
)

__all__ = [
    "MERMIN_PERES",
    "ONE_SIDE_LOCAL_KINDS",
    "ROW_LETTERS",
    "DeviceKind",
    "DeviceModel",
    "PairCheckSet",
    "answer_length",
    "build_device",
    "device_from_descriptor",
    "game_pair_measurements",
    "greedy_commuting",
    "honest_alice",
    "honest_bob_game",
    "honest_bob_local_check",
    "honest_bob_pair_check",
    "honest_device",
    "padded_adversary",
    "padded_alice",
    "standard_square_device",
    "supports_selftest",
]
