from __future__ import annotations

from magic_selftest.config.schema import DeviceChoice, DeviceDescriptor
from magic_selftest.errors import ContractError
from magic_selftest.quantum import NoiseModel
from magic_selftest.strategies.baselines import padded_adversary, standard_square_device
from magic_selftest.strategies.descriptor import device_from_descriptor
from magic_selftest.strategies.devices import DeviceModel
from magic_selftest.strategies.honest import honest_device


def build_device(
    choice: DeviceChoice | str,
    n: int,
    *,
    noise: NoiseModel | None = None,
    descriptor: DeviceDescriptor | None = None,
) -> DeviceModel:
    """Device for a config/CLI device name."""
    if choice in {"honest", "noisy"}:
        if choice == "noisy" and (noise is None or noise.is_trivial):
            raise ContractError("device noisy needs a non-zero noise angle")
        return honest_device(n, noise if choice == "noisy" else None)
    if choice == "padded":
        return padded_adversary(n)
    if choice == "standard-square":
        if n != 3:
            raise ContractError(f"standard-square baseline runs at n = 3, got {n}")
        return standard_square_device()
    if choice == "custom":
        if descriptor is None:
            raise ContractError("device custom needs a descriptor")
        if descriptor.n != n:
            raise ContractError(f"descriptor is for n={descriptor.n}, run uses n={n}")
        return device_from_descriptor(descriptor)
    raise ContractError(f"Unknown device '{choice}'")
