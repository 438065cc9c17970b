from __future__ import annotations

import logging

from magic_selftest.config.schema import DeviceDescriptor, InputSets
from magic_selftest.pauli import PauliString, parse
from magic_selftest.quantum import Observable
from magic_selftest.strategies.devices import DeviceKind, DeviceModel

logger = logging.getLogger(__name__)


def _observables(texts: list[str]) -> tuple[PauliString, ...]:
    return tuple(parse(text) for text in texts)


def _sets(sets: InputSets) -> dict[int, tuple[PauliString, ...]]:
    return {key: _observables(texts) for key, texts in sets.root.items()}


def device_from_descriptor(descriptor: DeviceDescriptor) -> DeviceModel:
    """Build a custom device; arity and commutation are checked by ``DeviceModel``."""
    alice: dict[int, tuple[Observable, ...]] = dict(_sets(descriptor.alice))
    bob: dict[tuple[int, int], tuple[Observable, ...]] = {}
    for c, sets in enumerate((descriptor.bob.game, descriptor.bob.local, descriptor.bob.pair)):
        for y, obs in _sets(sets).items():
            bob[(c, y)] = obs
    logger.debug(
        "Custom device: n=%d pairs=%d, %d Bob sets", descriptor.n, descriptor.pairs, len(bob)
    )
    return DeviceModel(
        kind=DeviceKind.CUSTOM,
        n=descriptor.n,
        pairs=descriptor.pairs,
        alice_sets=alice,
        bob_sets=bob,
        noise=descriptor.noise.to_model(),
    )
