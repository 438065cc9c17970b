from __future__ import annotations

import math
from collections.abc import Sequence
from itertools import combinations

import numpy as np
import pytest

from magic_selftest.coloring import color_of
from magic_selftest.errors import ContractError
from magic_selftest.protocol import (
    RoundMix,
    allowed_round_types,
    device_rng,
    evaluate_round,
    family_members,
    input_rng,
    round_members,
    sample_inputs,
)
from magic_selftest.strategies import answer_length


def test_game_round_has_one_member() -> None:
    (member,) = round_members(3, 0, 2, 1)
    assert member.label == "G2.1"
    assert member.alice == (2, 3)
    assert member.bob == 2


def test_local_check_members() -> None:
    assert [m.label for m in round_members(3, 1, 1, 2)] == ["X2"]
    z_members = round_members(3, 1, 3, 2)
    assert [m.label for m in z_members] == ["Z1.2", "Z3.2"]
    assert [(m.alice, m.bob) for m in z_members] == [((1,), 1), ((3,), 3)]


def test_pair_check_members_use_the_colour_schedule() -> None:
    xx = round_members(7, 2, 1, 1)
    assert [m.label for m in xx] == ["XX2.7", "XX3.6", "XX4.5"]
    assert [m.bob for m in xx] == [1, 2, 3]
    zz = round_members(7, 2, 3, 1)
    assert [m.label for m in zz] == ["ZZ2.7", "ZZ3.6", "ZZ4.5"]
    assert [m.bob for m in zz] == [4, 5, 6]


def test_family_sizes() -> None:
    assert len(family_members(3, 0)) == 9
    assert len(family_members(3, 1)) == 3 + 3 * 2
    assert len(family_members(7, 2)) == 2 * 7 * 3


@pytest.mark.parametrize(
    ("n", "c", "x", "y", "fragment"),
    [
        (3, 2, 1, 1, "not available for n=3"),
        (7, 1, 2, 1, "x=2 not allowed"),
        (7, 2, 2, 1, "x=2 not allowed"),
        (3, 0, 1, 4, "y=4 outside"),
        (3, 3, 1, 1, "c=3"),
    ],
)
def test_invalid_round_inputs(n: int, c: int, x: int, y: int, fragment: str) -> None:
    with pytest.raises(ContractError) as exc:
        round_members(n, c, x, y)
    assert fragment in str(exc.value)


def test_evaluate_local_check() -> None:
    verdict = evaluate_round(3, 1, 3, 1, (1, -1, 1), (1, -1, 1))
    assert verdict.accept
    assert verdict.sub == {"Z2.1": True, "Z3.1": True}

    verdict = evaluate_round(3, 1, 3, 1, (1, -1, 1), (1, -1, -1))
    assert not verdict.accept
    assert verdict.sub == {"Z2.1": True, "Z3.1": False}


def test_evaluate_pair_check() -> None:
    a = (1, -1, 1, 1, -1, 1, -1)
    # XX2.7 compares a2*a7 = 1, XX3.6 a3*a6 = 1, XX4.5 a4*a5 = -1
    verdict = evaluate_round(7, 2, 1, 1, a, (1, 1, -1, 1, 1, 1))
    assert verdict.accept
    verdict = evaluate_round(7, 2, 1, 1, a, (1, 1, 1, 1, 1, 1))
    assert verdict.sub["XX4.5"] is False


def test_evaluate_game_round() -> None:
    verdict = evaluate_round(3, 0, 1, 1, (1, -1, 1), (-1, 1, 1))
    assert verdict.accept
    assert verdict.sub == {"G1.1": True}


@pytest.mark.parametrize(
    ("c", "x", "a", "b"),
    [
        (0, 1, (1, 1, 1), (1, 1, 1)),
        (0, 1, (1, 1), (-1, 1, 1)),
        (1, 3, (1, 1, 1), (1, 1)),
        (1, 1, (1, 2, 1), (1, 1, 1)),
    ],
)
def test_malformed_answers_fail_every_member(
    c: int, x: int, a: tuple[int, ...], b: tuple[int, ...]
) -> None:
    verdict = evaluate_round(3, c, x, 2, a, b)
    assert verdict.malformed
    assert not verdict.accept
    assert verdict.sub
    assert not any(verdict.sub.values())


def test_round_mix_normalizes() -> None:
    mix = RoundMix({0: 2.0, 1: 1.0, 2: 1.0})
    assert mix.types == (0, 1, 2)
    assert mix.probability(0) == pytest.approx(0.5)
    assert RoundMix({0: 1.0, 2: 0.0}).types == (0,)
    assert RoundMix.uniform(3).types == (0, 1)


def test_round_mix_validation() -> None:
    with pytest.raises(ContractError):
        RoundMix({5: 1.0})
    with pytest.raises(ContractError) as exc:
        RoundMix({0: 0.0})
    assert "no positive weight" in str(exc.value)
    with pytest.raises(ContractError):
        RoundMix({2: 1.0}).check(3)


def test_sample_inputs_is_reproducible_and_in_range() -> None:
    mix = RoundMix.uniform(7)
    draws = [sample_inputs(7, mix, input_rng(4, r)) for r in range(300)]
    assert draws == [sample_inputs(7, mix, input_rng(4, r)) for r in range(300)]
    assert {d.c for d in draws} == {0, 1, 2}
    assert {d.y for d in draws} == set(range(1, 8))
    assert {d.x for d in draws if d.c == 0} == {1, 2, 3}
    assert {d.x for d in draws if d.c != 0} == {1, 3}


def test_input_and_device_streams_differ() -> None:
    assert input_rng(1, 0).random() != device_rng(1, 0).random()
    assert input_rng(1, 0).random() == np.random.default_rng([1, 0, 0]).random()


def _written_out_members(
    n: int, c: int, x: int, y: int, a: Sequence[int], b: Sequence[int]
) -> dict[str, bool]:
    """Acceptance per member, written directly from the round rules."""
    if c == 0:
        row = math.prod(a[k - 1] for k in range(1, n + 1) if k != y)
        return {f"G{x}.{y}": math.prod(b) == -1 and row == b[x - 1]}
    if c == 1 and x == 1:
        return {f"X{y}": a[y - 1] == b[y - 1]}
    if c == 1:
        return {f"Z{j}.{y}": a[j - 1] == b[j - 1] for j in range(1, n + 1) if j != y}

    half = (n - 1) // 2
    letters, offset = ("XX", 0) if x == 1 else ("ZZ", half)
    members: dict[str, bool] = {}
    for p, q in combinations(range(1, n + 1), 2):
        if color_of(p, q, n) != y:
            continue
        # the pair is {y - i, y + i}; its bit sits at slot i of the block
        i = (q - y) % n
        if i > half:
            i = (p - y) % n
        members[f"{letters}{p}.{q}"] = a[p - 1] * a[q - 1] == b[offset + i - 1]
    return members


@pytest.mark.parametrize("n", [3, 7])
def test_predicates_agree_with_the_written_out_rules(n: int) -> None:
    rng = np.random.default_rng(1234 + n)
    types = allowed_round_types(n)
    for _ in range(10_000):
        c = int(rng.choice(types))
        x = int(rng.choice([1, 2, 3] if c == 0 else [1, 3]))
        y = int(rng.integers(1, n + 1))
        a = rng.choice([1, -1], size=n).tolist()
        b = rng.choice([1, -1], size=answer_length(c, n)).tolist()

        expected = _written_out_members(n, c, x, y, a, b)
        verdict = evaluate_round(n, c, x, y, a, b)
        assert verdict.sub == expected, (c, x, y, a, b)
        assert verdict.accept == all(expected.values())
