from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass
from itertools import product
from pathlib import Path

from magic_selftest.errors import ContractError

Signs = tuple[int, ...]

_SIGN_TOKENS: dict[str, int] = {"+1": 1, "1": 1, "+": 1, "-1": -1, "-": -1}


def _check_signs(name: str, values: Sequence[int]) -> Signs:
    out = tuple(int(v) for v in values)
    if any(v not in (1, -1) for v in out):
        raise ContractError(f"{name} must contain only +1/-1, got {list(values)}")
    return out


@dataclass(frozen=True, slots=True)
class GameSpec:
    """Magic rectangle specification: row parities ``alpha``, column parities ``beta``."""

    m: int
    n: int
    alpha: Signs
    beta: Signs

    def __post_init__(self) -> None:
        if self.m < 1 or self.n < 1:
            raise ContractError(f"Table must be at least 1x1, got {self.m}x{self.n}")
        object.__setattr__(self, "alpha", _check_signs("alpha", self.alpha))
        object.__setattr__(self, "beta", _check_signs("beta", self.beta))
        if len(self.alpha) != self.m or len(self.beta) != self.n:
            raise ContractError(
                f"{self.m}x{self.n} spec needs {self.m} alpha and {self.n} beta signs, "
                f"got {len(self.alpha)} and {len(self.beta)}"
            )

    def transposed(self) -> GameSpec:
        return GameSpec(self.n, self.m, self.beta, self.alpha)

    def render(self) -> str:
        def signs(values: Signs) -> str:
            return " ".join(f"{v:+d}" for v in values)

        return f"{self.m} {self.n}\n{signs(self.alpha)}\n{signs(self.beta)}\n"


def validate_spec(spec: GameSpec) -> bool:
    return math.prod(spec.alpha) * math.prod(spec.beta) == -1


def enumerate_specs(m: int, n: int) -> list[GameSpec]:
    specs: list[GameSpec] = []
    for alpha in product((1, -1), repeat=m):
        for beta in product((1, -1), repeat=n):
            spec = GameSpec(m, n, alpha, beta)
            if validate_spec(spec):
                specs.append(spec)
    return specs


def magic_square() -> GameSpec:
    return GameSpec(3, 3, (1, 1, 1), (-1, -1, -1))


def parse_spec_text(text: str, *, source: str = "<memory>") -> GameSpec:
    lines = [line.split("#", 1)[0].strip() for line in text.splitlines()]
    lines = [line for line in lines if line]
    if len(lines) != 3:
        raise ContractError(f"{source}: expected 3 records (m n / alpha / beta), got {len(lines)}")
    try:
        m, n = (int(tok) for tok in lines[0].split())
    except ValueError as exc:
        raise ContractError(f"{source}: first record must be 'm n', got {lines[0]!r}") from exc

    def signs(record: str) -> list[int]:
        try:
            return [_SIGN_TOKENS[tok] for tok in record.split()]
        except KeyError as exc:
            raise ContractError(f"{source}: bad sign token {exc.args[0]!r}") from exc

    return GameSpec(m, n, tuple(signs(lines[1])), tuple(signs(lines[2])))


def load_spec(path: str | Path) -> GameSpec:
    spec_path = Path(path)
    if not spec_path.exists():
        raise ContractError(f"Spec file not found: {spec_path}")
    return parse_spec_text(spec_path.read_text(encoding="utf-8"), source=str(spec_path))


# ---------------------------------------------------------------------------
# 3 x n game in the "Alice outputs a_1..a_n" form
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class MagicGame3xN:
    n: int

    def __post_init__(self) -> None:
        if self.n < 3 or self.n % 2 == 0:
            raise ContractError(f"The 3 x n game needs odd n >= 3, got {self.n}")

    @property
    def supports_selftest(self) -> bool:
        return self.n == 3 or self.n % 4 == 3

    @property
    def allowed_round_types(self) -> tuple[int, ...]:
        return (0, 1) if self.n == 3 else (0, 1, 2)

    def to_spec(self) -> GameSpec:
        return GameSpec(3, self.n, (1, 1, 1), (-1,) * self.n)


def is_pm1_list(values: Sequence[int], length: int) -> bool:
    return len(values) == length and all(v in (1, -1) for v in values)


def bob_game_answer_ok(b: Sequence[int]) -> bool:
    return is_pm1_list(b, 3) and math.prod(b) == -1


def row_cells(a: Sequence[int]) -> tuple[int, ...]:
    """Cell values p_y = prod_{k != y} a_k of Alice's row."""
    total = math.prod(a)
    return tuple(total * v for v in a)


def game_round_accept(n: int, x: int, y: int, a: Sequence[int], b: Sequence[int]) -> bool:
    """Win iff prod_{k != y} a_k == b_x; a malformed answer is a loss."""
    if x not in (1, 2, 3) or not 1 <= y <= n:
        raise ContractError(f"Invalid game inputs x={x}, y={y} for n={n}")
    if not is_pm1_list(a, n) or not bob_game_answer_ok(b):
        return False
    return row_cells(a)[y - 1] == b[x - 1]
