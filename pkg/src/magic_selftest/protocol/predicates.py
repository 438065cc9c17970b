"""Referee acceptance rules, split into per-correlation members.

Every round checks one or more members. A member compares the product of some of
Alice's bits with one of Bob's bits; the round accepts when all members accept.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field

from magic_selftest.coloring import edges_of_color
from magic_selftest.errors import ContractError
from magic_selftest.games import game_round_accept
from magic_selftest.games.rules import bob_game_answer_ok, is_pm1_list
from magic_selftest.protocol.inputs import allowed_round_types
from magic_selftest.strategies.devices import answer_length


@dataclass(frozen=True, slots=True)
class Member:
    label: str
    family: int
    x: int
    y: int
    alice: tuple[int, ...]
    bob: int


@dataclass(frozen=True, slots=True)
class RoundVerdict:
    accept: bool
    sub: dict[str, bool] = field(default_factory=dict)
    malformed: bool = False


def check_inputs(n: int, c: int, x: int, y: int) -> None:
    if c not in allowed_round_types(n):
        raise ContractError(f"Round type c={c} is not available for n={n}")
    allowed_x = (1, 2, 3) if c == 0 else (1, 3)
    if x not in allowed_x:
        raise ContractError(f"x={x} not allowed for round type c={c}")
    if not 1 <= y <= n:
        raise ContractError(f"y={y} outside 1..{n}")


def round_members(n: int, c: int, x: int, y: int) -> tuple[Member, ...]:
    check_inputs(n, c, x, y)
    if c == 0:
        others = tuple(k for k in range(1, n + 1) if k != y)
        return (Member(f"G{x}.{y}", 0, x, y, others, x),)
    if c == 1:
        if x == 1:
            return (Member(f"X{y}", 1, x, y, (y,), y),)
        return tuple(Member(f"Z{j}.{y}", 1, x, y, (j,), j) for j in range(1, n + 1) if j != y)

    pairs = edges_of_color(y, n)
    offset, letters = (0, "XX") if x == 1 else (len(pairs), "ZZ")
    members = []
    for k, (i, j) in enumerate(pairs):
        lo, hi = sorted((i, j))
        members.append(Member(f"{letters}{lo}.{hi}", 2, x, y, (i, j), offset + k + 1))
    return tuple(members)


def family_members(n: int, c: int) -> tuple[Member, ...]:
    """All members of the correlation family checked by round type c."""
    xs = (1, 2, 3) if c == 0 else (1, 3)
    return tuple(
        member for x in xs for y in range(1, n + 1) for member in round_members(n, c, x, y)
    )


def member_accepts(member: Member, a: Sequence[int], b: Sequence[int]) -> bool:
    return math.prod(a[k - 1] for k in member.alice) == b[member.bob - 1]


def answers_well_formed(n: int, c: int, a: Sequence[int], b: Sequence[int]) -> bool:
    if not is_pm1_list(a, n):
        return False
    if c == 0:
        return bob_game_answer_ok(b)
    return is_pm1_list(b, answer_length(c, n))


def evaluate_round(
    n: int, c: int, x: int, y: int, a: Sequence[int], b: Sequence[int]
) -> RoundVerdict:
    members = round_members(n, c, x, y)
    if not answers_well_formed(n, c, a, b):
        return RoundVerdict(False, {m.label: False for m in members}, malformed=True)
    if c == 0:
        won = game_round_accept(n, x, y, a, b)
        return RoundVerdict(won, {members[0].label: won})
    sub = {m.label: member_accepts(m, a, b) for m in members}
    return RoundVerdict(all(sub.values()), sub)
