from __future__ import annotations

from magic_selftest.pauli.strings import (
    LETTERS,
    PauliString,
    commutes,
    embed,
    identity,
    mul,
    on_sites,
    parse,
    product,
    single,
)

__all__ = [
    "LETTERS",
    "PauliString",
    "commutes",
    "embed",
    "identity",
    "mul",
    "on_sites",
    "parse",
    "product",
    "single",
]
