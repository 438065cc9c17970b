from __future__ import annotations

import logging
from fractions import Fraction
from itertools import islice, product

import numpy as np
import numpy.typing as npt

from magic_selftest.errors import ResourceLimitError
from magic_selftest.games.rules import GameSpec

logger = logging.getLogger(__name__)

MAX_WIN_CHECKS = 10**9
MAX_TABLE_CELLS = 20
_CHUNK = 4096


def fillings(length: int, parity: int) -> npt.NDArray[np.int8]:
    """All +-1 vectors of ``length`` whose product is ``parity``."""
    rows = np.array(list(product((1, -1), repeat=length)), dtype=np.int8)
    return rows[np.prod(rows, axis=1) == parity]


def enumeration_cost(spec: GameSpec) -> int:
    """Win-checks needed with the cheaper side enumerated and the other best-responding."""
    alice = 2 ** ((spec.n - 1) * spec.m)
    bob = 2 ** ((spec.m - 1) * spec.n)
    if alice <= bob:
        return alice * 2 ** (spec.m - 1) * spec.m * spec.n
    return bob * 2 ** (spec.n - 1) * spec.m * spec.n


def classical_value(spec: GameSpec, *, max_checks: int = MAX_WIN_CHECKS) -> Fraction:
    """Optimal deterministic winning probability under uniform (row, column) inputs."""
    cost = enumeration_cost(spec)
    if cost > max_checks:
        raise ResourceLimitError(
            f"{spec.m}x{spec.n} enumeration needs {cost} win-checks, cap is {max_checks}"
        )
    # enumerate the side with fewer deterministic strategies
    if 2 ** ((spec.n - 1) * spec.m) > 2 ** ((spec.m - 1) * spec.n):
        spec = spec.transposed()

    row_options = [fillings(spec.n, a) for a in spec.alpha]
    col_options = [fillings(spec.m, b) for b in spec.beta]

    best = 0
    choices = product(*(range(len(opts)) for opts in row_options))
    while chunk := list(islice(choices, _CHUNK)):
        idx = np.array(chunk, dtype=np.int64)
        tables = np.stack(
            [row_options[i][idx[:, i]] for i in range(spec.m)], axis=1
        )  # (chunk, m, n)
        totals = np.zeros(len(chunk), dtype=np.int64)
        for j, options in enumerate(col_options):
            column = tables[:, :, j]  # (chunk, m)
            matches = (column[:, None, :] == options[None, :, :]).sum(axis=2)
            totals += matches.max(axis=1)
        best = max(best, int(totals.max()))

    value = Fraction(best, spec.m * spec.n)
    logger.debug("classical value of %dx%d spec: %s", spec.m, spec.n, value)
    return value


def best_table_value(spec: GameSpec) -> Fraction | None:
    """Lower bound: both players read one shared table, each fixing parity on its last cell.

    Returns None when the table space exceeds 2**MAX_TABLE_CELLS.
    """
    cells = spec.m * spec.n
    if cells > MAX_TABLE_CELLS:
        return None
    codes = np.arange(1 << cells, dtype=np.int64)
    bits = (codes[:, None] >> np.arange(cells)) & 1
    tables = (1 - 2 * bits).astype(np.int8).reshape(-1, spec.m, spec.n)

    alice = tables.copy()
    row_bad = np.prod(tables, axis=2) != np.array(spec.alpha, dtype=np.int8)
    alice[:, :, -1] *= np.where(row_bad, -1, 1).astype(np.int8)

    bob = tables.copy()
    col_bad = np.prod(tables, axis=1) != np.array(spec.beta, dtype=np.int8)
    bob[:, -1, :] *= np.where(col_bad, -1, 1).astype(np.int8)

    wins = (alice == bob).sum(axis=(1, 2))
    return Fraction(int(wins.max()), cells)
