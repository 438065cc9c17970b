from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import StrEnum
from functools import lru_cache

import numpy as np
import numpy.typing as npt

from magic_selftest.errors import ContractError, DimensionError, ResourceLimitError

logger = logging.getLogger(__name__)

MAX_DENSE_PAIRS = 12
NORM_TOLERANCE = 1e-12

ComplexVector = npt.NDArray[np.complex128]


class NoiseKind(StrEnum):
    NONE = "none"
    Y_ROTATION = "y-rotation"
    PER_PAIR = "per-pair-angles"


@dataclass(frozen=True, slots=True)
class NoiseModel:
    """Pure-state noise: a Y-axis rotation on Bob's half of each Bell pair.

    ``y-rotation`` carries one angle used on every pair; ``per-pair-angles`` carries one
    angle per pair.
    """

    kind: NoiseKind = NoiseKind.NONE
    angles: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        kind = NoiseKind(self.kind)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "angles", tuple(float(a) for a in self.angles))
        if kind is NoiseKind.NONE and any(a != 0.0 for a in self.angles):
            raise ContractError("noise kind 'none' takes no angles")
        if kind is NoiseKind.Y_ROTATION and len(self.angles) != 1:
            raise ContractError("noise kind 'y-rotation' takes exactly one angle")
        if any(not math.isfinite(a) for a in self.angles):
            raise ContractError(f"Non-finite noise angle in {self.angles}")

    @classmethod
    def none(cls) -> NoiseModel:
        return cls()

    @classmethod
    def y_rotation(cls, theta: float) -> NoiseModel:
        return cls(NoiseKind.Y_ROTATION, (theta,))

    @classmethod
    def per_pair(cls, angles: tuple[float, ...] | list[float]) -> NoiseModel:
        return cls(NoiseKind.PER_PAIR, tuple(angles))

    def angles_for(self, n: int) -> tuple[float, ...]:
        if self.kind is NoiseKind.NONE:
            return (0.0,) * n
        if self.kind is NoiseKind.Y_ROTATION:
            return self.angles * n
        if len(self.angles) != n:
            raise DimensionError(f"per-pair noise has {len(self.angles)} angles for {n} pairs")
        return self.angles

    @property
    def is_trivial(self) -> bool:
        return all(a == 0.0 for a in self.angles)


def y_rotation_matrix(theta: float) -> npt.NDArray[np.complex128]:
    c = math.cos(theta / 2.0)
    s = math.sin(theta / 2.0)
    return np.array([[c, -s], [s, c]], dtype=np.complex128)


@dataclass(frozen=True, slots=True)
class SharedState:
    """Pure state of ``n`` Bell pairs.

    Bit k of the basis index (least significant first) is Alice qubit k+1 for k < n
    and Bob qubit k-n+1 for k >= n.
    """

    n: int
    amplitudes: ComplexVector = field(repr=False)

    def __post_init__(self) -> None:
        if self.n < 1:
            raise DimensionError("A shared state needs at least one pair")
        vec = np.asarray(self.amplitudes, dtype=np.complex128)
        if vec.shape != (1 << (2 * self.n),):
            raise DimensionError(f"Expected {1 << (2 * self.n)} amplitudes, got {vec.shape}")
        norm = float(np.linalg.norm(vec))
        if abs(norm - 1.0) > 1e-9:
            raise ContractError(f"State is not normalized (norm={norm:.12g})")
        vec = vec.copy()
        vec.flags.writeable = False
        object.__setattr__(self, "amplitudes", vec)

    @property
    def qubits(self) -> int:
        return 2 * self.n


def check_dense_cap(n: int) -> None:
    if n > MAX_DENSE_PAIRS:
        raise ResourceLimitError(
            f"Dense engine is limited to {MAX_DENSE_PAIRS} pairs (2^{2 * MAX_DENSE_PAIRS} "
            f"amplitudes); {n} pairs requested"
        )


def apply_single_qubit(
    vec: ComplexVector, bit: int, gate: npt.NDArray[np.complex128]
) -> ComplexVector:
    idx = np.arange(vec.size)
    lo = idx[((idx >> bit) & 1) == 0]
    hi = lo | (1 << bit)
    out = vec.copy()
    out[lo] = gate[0, 0] * vec[lo] + gate[0, 1] * vec[hi]
    out[hi] = gate[1, 0] * vec[lo] + gate[1, 1] * vec[hi]
    return out


def prepare(n: int, noise: NoiseModel | None = None) -> SharedState:
    if n < 1:
        raise DimensionError("prepare needs n >= 1")
    check_dense_cap(n)
    noise = noise or NoiseModel.none()
    angles = noise.angles_for(n)

    vec = np.zeros(1 << (2 * n), dtype=np.complex128)
    alice = np.arange(1 << n)
    vec[alice | (alice << n)] = 2.0 ** (-n / 2.0)

    for j, theta in enumerate(angles, start=1):
        if theta != 0.0:
            vec = apply_single_qubit(vec, n + j - 1, y_rotation_matrix(theta))

    logger.debug("Prepared %d Bell pairs with noise %s", n, noise)
    return SharedState(n, vec)


@lru_cache(maxsize=16)
def prepare_cached(n: int, noise: NoiseModel) -> SharedState:
    return prepare(n, noise)


def dump_state(state: SharedState, tol: float = 1e-12) -> list[tuple[int, complex]]:
    """Non-negligible amplitudes as (basis-index, amplitude) pairs."""
    amps = state.amplitudes
    return [(int(i), complex(amps[i])) for i in np.flatnonzero(np.abs(amps) > tol)]
