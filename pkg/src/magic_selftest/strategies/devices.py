from __future__ import annotations

import logging
from collections.abc import Mapping
from dataclasses import dataclass, field
from enum import StrEnum
from types import MappingProxyType

from magic_selftest.errors import ContractError, DimensionError
from magic_selftest.pauli import PauliString
from magic_selftest.quantum import (
    NoiseModel,
    Observable,
    SharedState,
    observables_commute,
    prepare_cached,
)

logger = logging.getLogger(__name__)


class DeviceKind(StrEnum):
    HONEST = "honest"
    NOISY_HONEST = "noisy-honest"
    STANDARD_SQUARE = "standard-square-baseline"
    PADDED_ADVERSARY = "padded-adversary"
    CUSTOM = "custom"


ONE_SIDE_LOCAL_KINDS = frozenset({DeviceKind.HONEST, DeviceKind.NOISY_HONEST})


def answer_length(c: int, n: int) -> int:
    """Number of bits Bob returns for round type c."""
    if c == 0:
        return 3
    if c == 1:
        return n
    if c == 2:
        return n - 1
    raise ContractError(f"Unknown round type c={c}")


def commuting_set(label: str, observables: tuple[Observable, ...]) -> None:
    for i, a in enumerate(observables):
        for b in observables[i + 1 :]:
            if not observables_commute(a, b):
                raise ContractError(f"{label}: {a} and {b} do not commute")


@dataclass(frozen=True, eq=False)
class DeviceModel:
    """Prover pair: Alice's set per x, Bob's set per (c, y), on ``pairs`` shared Bell pairs.

    ``n`` is the protocol size (Alice's answer length), which may exceed ``pairs``
    for devices that pad their answers.
    """

    kind: DeviceKind
    n: int
    pairs: int
    alice_sets: Mapping[int, tuple[Observable, ...]]
    bob_sets: Mapping[tuple[int, int], tuple[Observable, ...]]
    noise: NoiseModel = field(default_factory=NoiseModel.none)
    explicit_state: SharedState | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "alice_sets", MappingProxyType(dict(self.alice_sets)))
        object.__setattr__(self, "bob_sets", MappingProxyType(dict(self.bob_sets)))
        if self.explicit_state is not None and self.explicit_state.n != self.pairs:
            raise DimensionError(
                f"Explicit state has {self.explicit_state.n} pairs, device uses {self.pairs}"
            )

        for x, obs in self.alice_sets.items():
            self._check_set(f"alice x={x}", obs, self.n)
            commuting_set(f"alice x={x}", obs)
            if self.kind in ONE_SIDE_LOCAL_KINDS:
                for o in obs:
                    if not isinstance(o, PauliString) or o.weight > 1:
                        raise ContractError(f"{self.kind} Alice observable {o} is not single-qubit")
        for (c, y), obs in self.bob_sets.items():
            label = f"bob c={c} y={y}"
            self._check_set(label, obs, answer_length(c, self.n))
            commuting_set(label, obs)

    def _check_set(self, label: str, obs: tuple[Observable, ...], length: int) -> None:
        if len(obs) != length:
            raise DimensionError(f"{label}: expected {length} observables, got {len(obs)}")
        for o in obs:
            if o.n != self.pairs:
                raise DimensionError(f"{label}: {o} acts on {o.n} qubits, device has {self.pairs}")

    @property
    def round_types(self) -> tuple[int, ...]:
        return tuple(sorted({c for c, _ in self.bob_sets}))

    @property
    def is_pauli(self) -> bool:
        sets = [*self.alice_sets.values(), *self.bob_sets.values()]
        return all(isinstance(o, PauliString) for obs in sets for o in obs)

    def alice_assign(self, x: int) -> tuple[Observable, ...]:
        try:
            return self.alice_sets[x]
        except KeyError:
            raise ContractError(f"{self.kind} device has no Alice set for x={x}") from None

    def bob_assign(self, c: int, y: int) -> tuple[Observable, ...]:
        try:
            return self.bob_sets[(c, y)]
        except KeyError:
            raise ContractError(f"{self.kind} device has no Bob set for c={c}, y={y}") from None

    def shared_state(self) -> SharedState:
        if self.explicit_state is not None:
            return self.explicit_state
        return prepare_cached(self.pairs, self.noise)
