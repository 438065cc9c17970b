from __future__ import annotations

import logging
from collections.abc import Sequence

from magic_selftest.coloring import edges_of_color
from magic_selftest.errors import ContractError
from magic_selftest.pauli import PauliString, commutes, identity, mul, on_sites, parse
from magic_selftest.quantum import Observable
from magic_selftest.strategies.devices import DeviceKind, DeviceModel
from magic_selftest.strategies.honest import ROW_LETTERS, honest_bob_game

logger = logging.getLogger(__name__)

# Mermin-Peres square on two Bell pairs; rows multiply to +I, columns to -I.
MERMIN_PERES: tuple[tuple[PauliString, ...], ...] = tuple(
    tuple(parse(cell) for cell in row)
    for row in (
        ("+IZ", "+ZI", "+ZZ"),
        ("+XI", "+IX", "+XX"),
        ("-XZ", "-ZX", "+YY"),
    )
)


def standard_square_device() -> DeviceModel:
    """Two-pair Mermin-Peres strategy run inside the 3 x 3 protocol.

    Alice answers the cells of row x and Bob the cells of column y. Every cell is
    transpose-invariant, so both players measure the same table. Bob does not know
    what a check round asks for and replays his column measurement.
    """
    alice: dict[int, tuple[Observable, ...]] = {
        x: MERMIN_PERES[x - 1] for x in (1, 2, 3)
    }
    bob: dict[tuple[int, int], tuple[Observable, ...]] = {}
    for y in (1, 2, 3):
        column = tuple(MERMIN_PERES[x][y - 1] for x in range(3))
        bob[(0, y)] = column
        bob[(1, y)] = column
    return DeviceModel(
        kind=DeviceKind.STANDARD_SQUARE, n=3, pairs=2, alice_sets=alice, bob_sets=bob
    )


def greedy_commuting(candidates: Sequence[PauliString]) -> tuple[PauliString, ...]:
    """Keep each candidate that commutes with all kept so far; answer +1 for the rest."""
    kept: list[PauliString] = []
    out: list[PauliString] = []
    for cand in candidates:
        if all(commutes(cand, k) for k in kept):
            kept.append(cand)
            out.append(cand)
        else:
            out.append(identity(cand.n))
    return tuple(out)


# deterministic answers for padded columns k > 3, per row x; the column product is -1
_PADDED_VALUE = {1: 1, 2: -1, 3: 1}


def _constant(value: int, n: int) -> PauliString:
    return PauliString("I" * n, 0 if value == 1 else 2)


def padded_alice(x: int, n: int) -> tuple[PauliString, ...]:
    """Cells of the 3 x 3 one-side-local strategy, then deterministic padding."""
    if x not in ROW_LETTERS:
        raise ContractError(f"Row x={x} not in 1..3")
    letter = ROW_LETTERS[x]
    cells = tuple(on_sites(letter, [m for m in (1, 2, 3) if m != k], 3) for k in (1, 2, 3))
    return cells + (_constant(_PADDED_VALUE[x], 3),) * (n - 3)


def padded_adversary(n: int) -> DeviceModel:
    """Three-pair device that wins every game round of the 3 x n game.

    Alice reports the 3 x 3 cells on columns 1..3 and constants on columns 4..n; the
    padding values (+1, -1, +1) give each padded column product -1 and leave every row
    product +1 because n - 3 is even. Bob's game answers are the honest 3 x 3 columns
    or the constant column. In check rounds Bob measures the observables that would
    match Alice's cells as far as they commute, and answers +1 where they do not.
    """
    if n <= 3 or n % 4 != 3:
        raise ContractError(f"Padded adversary needs n = 3 (mod 4), n > 3; got {n}")

    alice: dict[int, tuple[Observable, ...]] = {x: padded_alice(x, n) for x in (1, 2, 3)}
    x_cells, z_cells = padded_alice(1, n), padded_alice(3, n)

    bob: dict[tuple[int, int], tuple[Observable, ...]] = {}
    for y in range(1, n + 1):
        if y <= 3:
            bob[(0, y)] = honest_bob_game(y, 3)
        else:
            bob[(0, y)] = tuple(_constant(_PADDED_VALUE[x], 3) for x in (1, 2, 3))

        # local check: slot y first so the x=1 comparison keeps its observable
        order = [y] + [j for j in range(1, n + 1) if j != y]
        chosen = greedy_commuting([x_cells[y - 1] if j == y else z_cells[j - 1] for j in order])
        by_slot = dict(zip(order, chosen, strict=True))
        bob[(1, y)] = tuple(by_slot[j] for j in range(1, n + 1))

        pairs = edges_of_color(y, n)
        candidates = [mul(x_cells[i - 1], x_cells[j - 1]) for i, j in pairs]
        candidates += [mul(z_cells[i - 1], z_cells[j - 1]) for i, j in pairs]
        bob[(2, y)] = greedy_commuting(candidates)

    logger.debug("Built padded adversary for n=%d", n)
    return DeviceModel(
        kind=DeviceKind.PADDED_ADVERSARY, n=n, pairs=3, alice_sets=alice, bob_sets=bob
    )
