"""A device's measurements named by party, input and slot, lifted to the full register."""

from __future__ import annotations

from collections.abc import Iterable

from magic_selftest.coloring import color_of, edges_of_color
from magic_selftest.errors import ContractError
from magic_selftest.pauli import PauliString, product
from magic_selftest.quantum import (
    Observable,
    Operator,
    PauliOperator,
    alice_operator,
    bob_operator,
    compose,
)
from magic_selftest.strategies import DeviceModel

_ROWS = {"X": 1, "Y": 2, "Z": 3}
_GAME_SLOTS = {"X": 0, "Y": 1, "Z": 2}


def word(*ops: Operator) -> Operator:
    """Product in written order; runs of Pauli factors collapse into one string."""
    if not ops:
        raise ContractError("Empty operator word")
    merged: list[Operator] = []
    for op in ops:
        last = merged[-1] if merged else None
        if isinstance(op, PauliOperator) and isinstance(last, PauliOperator):
            merged[-1] = PauliOperator(product((last.string, op.string)))
        else:
            merged.append(op)
    return compose(*merged)


def words(ops: Iterable[Operator]) -> Operator:
    return word(*ops)


class UnknownObservables:
    """Lifted operators for one device.

    Qubit indices are 1-based. Bob's local-check observable for qubit ``i`` under input
    ``y`` is the ``i``-th slot of his (c=1, y) set; pair observables are looked up under
    the input that schedules the pair.
    """

    def __init__(self, device: DeviceModel) -> None:
        self.device = device
        self.n = device.n
        self._cache: dict[tuple[object, ...], Operator] = {}

    def _lift(self, key: tuple[object, ...], obs: Observable, alice: bool) -> Operator:
        op = self._cache.get(key)
        if op is None:
            if isinstance(obs, PauliString) and not obs.is_hermitian:
                raise ContractError(f"{key}: {obs} is not a reflection")
            lift = alice_operator if alice else bob_operator
            op = lift(obs, self.device.pairs)
            self._cache[key] = op
        return op

    def _qubit(self, i: int) -> None:
        if not 1 <= i <= self.n:
            raise ContractError(f"Qubit {i} outside 1..{self.n}")

    def alice(self, letter: str, i: int) -> Operator:
        self._qubit(i)
        x = _ROWS[letter]
        return self._lift(("A", letter, i), self.device.alice_assign(x)[i - 1], True)

    def bob_game(self, letter: str, y: int) -> Operator:
        """Bob's game-round observable in column y (the product over qubits other than y)."""
        self._qubit(y)
        obs = self.device.bob_assign(0, y)[_GAME_SLOTS[letter]]
        return self._lift(("G", letter, y), obs, False)

    def bob_local(self, i: int, y: int) -> Operator:
        """X on qubit y when i == y, otherwise Z on qubit i, both under local-check input y."""
        self._qubit(i)
        self._qubit(y)
        return self._lift(("L", i, y), self.device.bob_assign(1, y)[i - 1], False)

    def bob_pair(self, letter: str, a: int, b: int) -> Operator:
        self._qubit(a)
        self._qubit(b)
        y = color_of(a, b, self.n)
        pairs = [frozenset(p) for p in edges_of_color(y, self.n)]
        slot = pairs.index(frozenset((a, b)))
        if letter == "Z":
            slot += len(pairs)
        elif letter != "X":
            raise ContractError(f"Pair observables are X or Z, got {letter!r}")
        return self._lift(("P", letter, a, b), self.device.bob_assign(2, y)[slot], False)

    def xa(self, i: int) -> Operator:
        return self.alice("X", i)

    def ya(self, i: int) -> Operator:
        return self.alice("Y", i)

    def za(self, i: int) -> Operator:
        return self.alice("Z", i)

    def xb(self, i: int) -> Operator:
        """X_{B,i}^i."""
        return self.bob_local(i, i)

    def zb(self, i: int, y: int) -> Operator:
        """Z_{B,y}^i for i != y."""
        if i == y:
            raise ContractError(f"Local-check Z needs qubit != input, got {i}")
        return self.bob_local(i, y)
