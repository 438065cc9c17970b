from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from magic_selftest.errors import ContractError

Pair = tuple[int, int]


def _require_odd(n: int) -> None:
    if n < 1 or n % 2 == 0:
        raise ContractError(f"Edge coloring needs an odd vertex count, got {n}")


def wrap(k: int, n: int) -> int:
    """Reduce k into 1..n (residue 0 maps to n)."""
    return (k - 1) % n + 1


def color_of(a: int, b: int, n: int) -> int:
    _require_odd(n)
    if a == b:
        raise ContractError(f"Edge needs two distinct vertices, got {{{a}, {b}}}")
    if not (1 <= a <= n and 1 <= b <= n):
        raise ContractError(f"Vertices {a}, {b} outside 1..{n}")
    return wrap((a + b) * pow(2, -1, n), n)


def edges_of_color(v: int, n: int) -> list[Pair]:
    """The pairs (v-i, v+i), i = 1..(n-1)/2, in that order."""
    _require_odd(n)
    if not 1 <= v <= n:
        raise ContractError(f"Color {v} outside 1..{n}")
    return [(wrap(v - i, n), wrap(v + i, n)) for i in range(1, (n - 1) // 2 + 1)]


@dataclass(frozen=True, slots=True)
class PairSchedule:
    n: int
    color_of_edge: dict[frozenset[int], int]
    edges_by_color: dict[int, tuple[Pair, ...]]

    @classmethod
    def build(cls, n: int) -> PairSchedule:
        _require_odd(n)
        by_color = {v: tuple(edges_of_color(v, n)) for v in range(1, n + 1)}
        edge_colors = {frozenset(p): v for v, pairs in by_color.items() for p in pairs}
        return cls(n=n, color_of_edge=edge_colors, edges_by_color=by_color)

    def verify(self) -> list[str]:
        """Empty when the coloring is proper and partitions every edge of K_n."""
        problems: list[str] = []
        n = self.n
        if sorted(self.edges_by_color) != list(range(1, n + 1)):
            problems.append(f"colors are not exactly 1..{n}")

        seen: set[frozenset[int]] = set()
        for v, pairs in self.edges_by_color.items():
            if len(pairs) != (n - 1) // 2:
                problems.append(f"color {v} has {len(pairs)} edges")
            touched = [x for p in pairs for x in p]
            if len(set(touched)) != len(touched):
                problems.append(f"color {v} has adjacent edges")
            if v in touched:
                problems.append(f"color {v} touches its own vertex")
            for p in pairs:
                edge = frozenset(p)
                if edge in seen:
                    problems.append(f"edge {sorted(edge)} colored twice")
                seen.add(edge)
                if color_of(p[0], p[1], n) != v:
                    problems.append(f"edge {sorted(edge)} listed under {v}")

        missing = {frozenset(e) for e in combinations(range(1, n + 1), 2)} - seen
        problems.extend(f"edge {sorted(e)} uncolored" for e in sorted(missing, key=sorted))
        return problems

    def render(self) -> list[str]:
        return [
            f"{v}: " + " ".join(f"{a}-{b}" for a, b in self.edges_by_color[v])
            for v in range(1, self.n + 1)
        ]
