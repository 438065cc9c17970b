from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass
from types import MappingProxyType
from typing import NamedTuple

import numpy as np

from magic_selftest.errors import ContractError

INPUT_STREAM = 0
DEVICE_STREAM = 1

ROUND_NAMES = {0: "game", 1: "local-check", 2: "pair-check"}


def input_rng(seed: int, round_id: int) -> np.random.Generator:
    return np.random.default_rng([seed, round_id, INPUT_STREAM])


def device_rng(seed: int, round_id: int) -> np.random.Generator:
    return np.random.default_rng([seed, round_id, DEVICE_STREAM])


def allowed_round_types(n: int) -> tuple[int, ...]:
    return (0, 1) if n == 3 else (0, 1, 2)


class RoundInputs(NamedTuple):
    c: int
    x: int
    y: int


@dataclass(frozen=True, slots=True)
class RoundMix:
    """Probability of each round type c."""

    weights: Mapping[int, float]

    def __post_init__(self) -> None:
        raw = {int(c): float(w) for c, w in self.weights.items() if w > 0.0}
        if any(c not in ROUND_NAMES for c in raw):
            raise ContractError(f"Unknown round types in mix: {sorted(raw)}")
        total = sum(raw.values())
        if total <= 0.0:
            raise ContractError("Round mix has no positive weight")
        normalized = {c: raw[c] / total for c in sorted(raw)}
        object.__setattr__(self, "weights", MappingProxyType(normalized))

    @classmethod
    def uniform(cls, n: int) -> RoundMix:
        return cls({c: 1.0 for c in allowed_round_types(n)})

    @property
    def types(self) -> tuple[int, ...]:
        return tuple(self.weights)

    def probability(self, c: int) -> float:
        return self.weights.get(c, 0.0)

    def check(self, n: int) -> None:
        allowed = allowed_round_types(n)
        for c in self.types:
            if c not in allowed:
                raise ContractError(f"Round type c={c} is not available for n={n}")


def sample_inputs(n: int, mix: RoundMix, rng: np.random.Generator) -> RoundInputs:
    """Draw (c, x, y): c from the mix, y uniform on 1..n, x uniform on 1..3 or {1, 3}."""
    mix.check(n)
    types = mix.types
    cumulative = np.cumsum([mix.weights[c] for c in types])
    index = int(np.searchsorted(cumulative, rng.random() * cumulative[-1], side="right"))
    c = types[min(index, len(types) - 1)]
    y = int(rng.integers(1, n + 1))
    x = int(rng.integers(1, 4)) if c == 0 else (1, 3)[int(rng.integers(0, 2))]
    return RoundInputs(c, x, y)
