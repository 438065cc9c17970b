from __future__ import annotations

import re
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

from magic_selftest.errors import ContractError, DimensionError

LETTERS = "IXYZ"

# phase exponent k (operator carries i**k) -> text token
_PHASE_TOKENS: dict[int, str] = {0: "+", 1: "+i", 2: "-", 3: "-i"}
_TOKEN_PHASES: dict[str, int] = {
    "": 0,
    "+": 0,
    "+1": 0,
    "1": 0,
    "-": 2,
    "-1": 2,
    "i": 1,
    "+i": 1,
    "-i": 3,
}

# single-site law: a * b = i**k * c
_SITE_PRODUCT: dict[tuple[str, str], tuple[int, str]] = {}
for _a in LETTERS:
    _SITE_PRODUCT[("I", _a)] = (0, _a)
    _SITE_PRODUCT[(_a, "I")] = (0, _a)
    _SITE_PRODUCT[(_a, _a)] = (0, "I")
for _a, _b, _c in (("X", "Y", "Z"), ("Y", "Z", "X"), ("Z", "X", "Y")):
    _SITE_PRODUCT[(_a, _b)] = (1, _c)
    _SITE_PRODUCT[(_b, _a)] = (3, _c)

_TEXT_RE = re.compile(r"^\s*(?P<phase>[+-]?(?:1|i)?)\s*(?P<letters>[IXYZ]+)\s*$")


@dataclass(frozen=True, slots=True)
class PauliString:
    """Phase times a tensor product of single-qubit Paulis.

    ``letters[q-1]`` acts on qubit ``q``; ``phase`` is the exponent k of i**k (mod 4).
    """

    letters: str
    phase: int = 0

    def __post_init__(self) -> None:
        if not self.letters:
            raise DimensionError("Pauli string needs at least one qubit")
        bad = set(self.letters) - set(LETTERS)
        if bad:
            raise ContractError(f"Invalid Pauli letters: {''.join(sorted(bad))}")
        object.__setattr__(self, "phase", self.phase % 4)

    @property
    def n(self) -> int:
        return len(self.letters)

    @property
    def is_hermitian(self) -> bool:
        return self.phase in (0, 2)

    @property
    def sign(self) -> int:
        if not self.is_hermitian:
            raise ContractError(f"{self} has an imaginary phase")
        return 1 if self.phase == 0 else -1

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(q for q, letter in enumerate(self.letters, start=1) if letter != "I")

    @property
    def weight(self) -> int:
        return len(self.support)

    @property
    def x_mask(self) -> int:
        return sum(1 << k for k, letter in enumerate(self.letters) if letter in "XY")

    @property
    def z_mask(self) -> int:
        return sum(1 << k for k, letter in enumerate(self.letters) if letter in "ZY")

    @property
    def y_count(self) -> int:
        return self.letters.count("Y")

    def __mul__(self, other: PauliString) -> PauliString:
        return mul(self, other)

    def __neg__(self) -> PauliString:
        return PauliString(self.letters, self.phase + 2)

    def __str__(self) -> str:
        return f"{_PHASE_TOKENS[self.phase]} {self.letters}"


def mul(p: PauliString, q: PauliString) -> PauliString:
    if p.n != q.n:
        raise DimensionError(f"Cannot multiply {p.n}-qubit and {q.n}-qubit strings")
    phase = p.phase + q.phase
    out: list[str] = []
    for a, b in zip(p.letters, q.letters, strict=True):
        k, c = _SITE_PRODUCT[(a, b)]
        phase += k
        out.append(c)
    return PauliString("".join(out), phase)


def product(strings: Iterable[PauliString], n: int | None = None) -> PauliString:
    """Left-to-right product; the empty product needs ``n``."""
    result: PauliString | None = None
    for item in strings:
        result = item if result is None else mul(result, item)
    if result is None:
        if n is None:
            raise DimensionError("Empty product needs an explicit qubit count")
        return identity(n)
    return result


def commutes(p: PauliString, q: PauliString) -> bool:
    if p.n != q.n:
        raise DimensionError(f"Cannot compare {p.n}-qubit and {q.n}-qubit strings")
    clashes = sum(
        1 for a, b in zip(p.letters, q.letters, strict=True) if a != "I" and b != "I" and a != b
    )
    return clashes % 2 == 0


def embed(p: PauliString, positions: Sequence[int], total: int) -> PauliString:
    if len(positions) != p.n:
        raise DimensionError(f"Need {p.n} positions, got {len(positions)}")
    if len(set(positions)) != len(positions):
        raise ContractError(f"Duplicate positions: {list(positions)}")
    if any(pos < 1 or pos > total for pos in positions):
        raise ContractError(f"Positions {list(positions)} outside 1..{total}")
    out = ["I"] * total
    for letter, pos in zip(p.letters, positions, strict=True):
        out[pos - 1] = letter
    return PauliString("".join(out), p.phase)


def identity(n: int) -> PauliString:
    return PauliString("I" * n)


def single(letter: str, qubit: int, n: int) -> PauliString:
    return on_sites(letter, (qubit,), n)


def on_sites(letter: str, qubits: Iterable[int], n: int) -> PauliString:
    """``letter`` on every listed qubit, identity elsewhere."""
    out = ["I"] * n
    for q in qubits:
        if q < 1 or q > n:
            raise ContractError(f"Qubit {q} outside 1..{n}")
        out[q - 1] = letter
    return PauliString("".join(out))


def parse(text: str) -> PauliString:
    match = _TEXT_RE.match(text)
    if match is None:
        raise ContractError(f"Cannot parse Pauli string: {text!r}")
    token = match.group("phase")
    if token not in _TOKEN_PHASES:
        raise ContractError(f"Unknown phase token {token!r} in {text!r}")
    return PauliString(match.group("letters"), _TOKEN_PHASES[token])
