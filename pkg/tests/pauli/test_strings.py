from __future__ import annotations

import pytest

from magic_selftest.errors import ContractError, DimensionError
from magic_selftest.pauli import (
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


@pytest.mark.parametrize(
    ("text", "letters", "phase"),
    [
        ("+XIZ", "XIZ", 0),
        ("- XIZ", "XIZ", 2),
        ("-i XIZ", "XIZ", 3),
        ("i Y", "Y", 1),
        ("XIZ", "XIZ", 0),
        ("  -1 ZZ ", "ZZ", 2),
    ],
)
def test_parse_accepts_phase_tokens(text: str, letters: str, phase: int) -> None:
    p = parse(text)
    assert p.letters == letters
    assert p.phase == phase


def test_str_renders_phase_token_and_parses_back() -> None:
    p = PauliString("XYZ", 2)
    assert str(p) == "- XYZ"
    assert parse(str(p)) == p
    assert str(PauliString("I", 3)) == "-i I"


def test_invalid_letters_are_rejected() -> None:
    with pytest.raises(ContractError) as exc:
        PauliString("XAZ")
    assert "A" in str(exc.value)

    with pytest.raises(ContractError) as exc:
        parse("+ XQ")
    assert "Cannot parse" in str(exc.value)


def test_empty_string_is_a_dimension_error() -> None:
    with pytest.raises(DimensionError):
        PauliString("")


def test_phase_is_reduced_mod_four() -> None:
    assert PauliString("X", 4) == PauliString("X", 0)
    assert PauliString("X", -1).phase == 3


def test_single_site_products_carry_phases() -> None:
    x, y, z = PauliString("X"), PauliString("Y"), PauliString("Z")
    assert mul(x, y) == PauliString("Z", 1)
    assert mul(y, x) == PauliString("Z", 3)
    assert mul(y, z) == PauliString("X", 1)
    assert mul(z, x) == PauliString("Y", 1)
    assert x * x == PauliString("I")


def test_product_is_left_to_right() -> None:
    strings = [PauliString("X"), PauliString("Y"), PauliString("Z")]
    # XY = iZ, then iZ Z = i I
    assert product(strings) == PauliString("I", 1)
    assert product(reversed(strings)) == PauliString("I", 3)


def test_empty_product_needs_qubit_count() -> None:
    assert product([], n=3) == identity(3)
    with pytest.raises(DimensionError) as exc:
        product([])
    assert "explicit qubit count" in str(exc.value)


def test_mul_rejects_mismatched_lengths() -> None:
    with pytest.raises(DimensionError):
        mul(PauliString("XX"), PauliString("X"))


def test_commutation_counts_clashing_sites() -> None:
    assert commutes(PauliString("XX"), PauliString("ZZ"))
    assert not commutes(PauliString("XI"), PauliString("ZI"))
    assert commutes(PauliString("XIZ"), PauliString("IYI"))
    assert not commutes(PauliString("XYZ"), PauliString("YYI"))


def test_support_weight_and_masks() -> None:
    p = PauliString("IXIZ")
    assert p.support == (2, 4)
    assert p.weight == 2

    q = PauliString("XYZI")
    assert q.x_mask == 0b0011
    assert q.z_mask == 0b0110
    assert q.y_count == 1


def test_sign_needs_a_real_phase() -> None:
    assert PauliString("Z").sign == 1
    assert (-PauliString("Z")).sign == -1
    with pytest.raises(ContractError) as exc:
        _ = PauliString("Z", 1).sign
    assert "imaginary" in str(exc.value)


def test_embed_places_letters_on_positions() -> None:
    assert embed(PauliString("XZ", 2), (3, 1), 3) == PauliString("ZIX", 2)
    with pytest.raises(ContractError):
        embed(PauliString("XZ"), (1, 1), 3)
    with pytest.raises(ContractError):
        embed(PauliString("XZ"), (1, 4), 3)


def test_site_helpers() -> None:
    assert single("Y", 2, 3) == PauliString("IYI")
    assert on_sites("X", (1, 3), 4) == PauliString("XIXI")
    with pytest.raises(ContractError):
        on_sites("X", (0,), 2)
