"""Honest one-side-local strategies for the 3 x n magic rectangle.

Alice measures the same Pauli on every qubit: X for x=1, Y for x=2, Z for x=3.
Bob's game column y measures the products over j != y of X, Y and Z; for odd n these
commute and multiply to i**(n-1) I, which is -I exactly when n = 3 (mod 4). The cell
contents are pinned by the perfect correlations the checks test: every Alice bit a_j
must equal Bob's single-qubit answer on qubit j, and every product a_i a_j must equal
Bob's pair answer.
"""

from __future__ import annotations

from dataclasses import dataclass

from magic_selftest.coloring import edges_of_color
from magic_selftest.errors import ContractError
from magic_selftest.pauli import PauliString, on_sites, single
from magic_selftest.quantum import NoiseModel, Observable
from magic_selftest.strategies.devices import DeviceKind, DeviceModel

ROW_LETTERS = {1: "X", 2: "Y", 3: "Z"}


def supports_selftest(n: int) -> bool:
    return n == 3 or (n > 3 and n % 4 == 3)


def _check_column(y: int, n: int) -> None:
    if not 1 <= y <= n:
        raise ContractError(f"Column y={y} outside 1..{n}")


def honest_alice(x: int, n: int) -> tuple[PauliString, ...]:
    if x not in ROW_LETTERS:
        raise ContractError(f"Row x={x} not in 1..3")
    letter = ROW_LETTERS[x]
    return tuple(single(letter, j, n) for j in range(1, n + 1))


def honest_bob_game(y: int, n: int) -> tuple[PauliString, ...]:
    _check_column(y, n)
    others = [j for j in range(1, n + 1) if j != y]
    return tuple(on_sites(letter, others, n) for letter in "XYZ")


def honest_bob_local_check(y: int, n: int) -> tuple[PauliString, ...]:
    _check_column(y, n)
    return tuple(single("X" if j == y else "Z", j, n) for j in range(1, n + 1))


@dataclass(frozen=True, slots=True)
class PairCheckSet:
    """Bob's pair-check observables: X-pairs first, then Z-pairs, in schedule order."""

    y: int
    pairs: tuple[tuple[int, int], ...]
    observables: tuple[PauliString, ...]

    @property
    def x_part(self) -> tuple[PauliString, ...]:
        return self.observables[: len(self.pairs)]

    @property
    def z_part(self) -> tuple[PauliString, ...]:
        return self.observables[len(self.pairs) :]


def honest_bob_pair_check(y: int, n: int) -> PairCheckSet:
    _check_column(y, n)
    pairs = tuple(edges_of_color(y, n))
    xs = tuple(on_sites("X", pair, n) for pair in pairs)
    zs = tuple(on_sites("Z", pair, n) for pair in pairs)
    return PairCheckSet(y=y, pairs=pairs, observables=xs + zs)


def game_pair_measurements(y: int, n: int) -> dict[str, tuple[PauliString, ...]]:
    """Bob's game column as two-qubit measurements on the pairs of colour y.

    The colour-y pairs partition the qubits other than y, and XX, YY, ZZ on one pair
    commute, so 3(n-1)/2 pair observables determine all three column products.
    """
    _check_column(y, n)
    pairs = edges_of_color(y, n)
    return {letter: tuple(on_sites(letter, pair, n) for pair in pairs) for letter in "XYZ"}


def honest_device(n: int, noise: NoiseModel | None = None) -> DeviceModel:
    if not supports_selftest(n):
        raise ContractError(f"Honest strategy needs n = 3 or n = 3 (mod 4), got {n}")
    noise = noise or NoiseModel.none()
    alice: dict[int, tuple[Observable, ...]] = {x: honest_alice(x, n) for x in (1, 2, 3)}
    bob: dict[tuple[int, int], tuple[Observable, ...]] = {}
    for y in range(1, n + 1):
        bob[(0, y)] = honest_bob_game(y, n)
        bob[(1, y)] = honest_bob_local_check(y, n)
        if n > 3:
            bob[(2, y)] = honest_bob_pair_check(y, n).observables
    kind = DeviceKind.HONEST if noise.is_trivial else DeviceKind.NOISY_HONEST
    return DeviceModel(kind=kind, n=n, pairs=n, alice_sets=alice, bob_sets=bob, noise=noise)
