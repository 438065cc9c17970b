"""Closed-form robustness bounds.

Every bound is a non-negative combination of sqrt(2 eps_c) over the three correlation
families: game rounds (eps0), local checks (eps1) and pair checks (eps2). The headline
entries are the (anti)commutation relations handed to the isometry step; the others are
intermediate estimates that the headline ones are derived from.
"""

from __future__ import annotations

import math
from collections.abc import Iterable
from dataclasses import dataclass

import numpy as np

from magic_selftest.errors import ContractError
from magic_selftest.ledger.report import (
    PAIR_WORDING_NOTE,
    SCALING_NOTE,
    BoundEntry,
    BoundReport,
    Coefficients,
)
from magic_selftest.strategies import supports_selftest

MAX_EPSILON = 2.0


@dataclass(frozen=True, slots=True)
class CatalogItem:
    name: str
    coefficients: Coefficients
    headline: bool = False


def state_estimate_bound(eps: float) -> float:
    """||phi - chi|| for unit vectors with Re<phi|chi> >= 1 - eps."""
    if eps < 0 or math.isnan(eps):
        raise ContractError(f"eps must be >= 0, got {eps}")
    return math.sqrt(2.0 * eps)


def _check_n(n: int) -> None:
    if not supports_selftest(n):
        raise ContractError(f"No bound catalog for n={n}; need n = 3 or n = 3 (mod 4), n > 3")


def _check_eps(**values: float) -> None:
    for name, value in values.items():
        if math.isnan(value) or not 0.0 <= value <= MAX_EPSILON:
            raise ContractError(f"{name} must be in [0, {MAX_EPSILON}], got {value}")


def _square_items() -> list[CatalogItem]:
    c = Coefficients
    return [
        CatalogItem("game_correlation", c(s0=1)),
        CatalogItem("correlation_x", c(s1=1), True),
        CatalogItem("correlation_z", c(s1=1), True),
        CatalogItem("bob_commutation_xx", c(s1=4), True),
        CatalogItem("bob_commutation_zz", c(s1=4), True),
        CatalogItem("bob_commutation_xz", c(s1=8), True),
        CatalogItem("alice_commutation", c(s1=4), True),
        CatalogItem("alice_pair_anticommutation", c(s0=9)),
        CatalogItem("alice_anticommutation", c(s0=9, s1=16), True),
        CatalogItem("bob_anticommutation", c(s0=9, s1=20), True),
    ]


def _rectangle_items(n: int) -> list[CatalogItem]:
    c = Coefficients
    tail = 13 * (n - 1) / 2
    return [
        CatalogItem("game_correlation", c(s0=1)),
        CatalogItem("correlation_x", c(s1=1), True),
        CatalogItem("correlation_z", c(s1=1), True),
        CatalogItem("pair_correlation_x", c(s2=1)),
        CatalogItem("pair_correlation_z", c(s2=1)),
        CatalogItem("bob_commutation_xx", c(s1=4), True),
        CatalogItem("bob_commutation_zz", c(s1=4), True),
        CatalogItem("bob_commutation_xz", c(s1=8), True),
        CatalogItem("alice_commutation", c(s1=4), True),
        CatalogItem("pair_product_estimate", c(s1=18, s2=4)),
        CatalogItem("alice_pair_chain", c(s1=2 * n, s2=n - 1)),
        CatalogItem("chain_y_start", c(s0=1)),
        CatalogItem("chain_bob_product", c(s0=n)),
        CatalogItem("chain_x_swap", c(s0=n + 2)),
        CatalogItem("chain_alice_swap", c(s0=3 * n)),
        CatalogItem("chain_swap_estimate", c(s1=3, s2=2)),
        CatalogItem("chain_pair_estimate", c(s0=3 * n, s1=7, s2=2)),
        CatalogItem("chain_paired", c(s0=3 * n, s1=9 * (n - 3) / 2 + 7, s2=n - 1)),
        CatalogItem("chain_cancelled", c(s0=3 * n, s1=tail, s2=2 * (n - 1))),
        CatalogItem("alice_pair_anticommutation", c(s0=3 * n, s1=tail + 1, s2=2 * (n - 1))),
        CatalogItem("alice_anticommutation", c(s0=3 * n, s1=tail + 17, s2=2 * (n - 1)), True),
        CatalogItem("bob_anticommutation", c(s0=3 * n, s1=tail + 21, s2=2 * (n - 1)), True),
    ]


def catalog_items(n: int) -> list[CatalogItem]:
    """Entries in report order: the 3x3 catalog for n=3, the 3xn chain catalog otherwise."""
    _check_n(n)
    return _square_items() if n == 3 else _rectangle_items(n)


def evaluate(coefficients: Coefficients, eps0: float, eps1: float, eps2: float) -> float:
    return (
        coefficients.s0 * state_estimate_bound(eps0)
        + coefficients.s1 * state_estimate_bound(eps1)
        + coefficients.s2 * state_estimate_bound(eps2)
    )


def bound_catalog(
    n: int,
    eps0: float,
    eps1: float,
    eps2: float = 0.0,
    *,
    inject_fault: str | None = None,
    theta: float | None = None,
) -> BoundReport:
    """Every right-hand side at the given deficits; no left-hand sides are measured.

    ``inject_fault`` negates one entry's coefficients, which makes that entry fail as
    soon as anything is measured against it.
    """
    _check_eps(eps0=eps0, eps1=eps1, eps2=eps2)
    items = catalog_items(n)
    if inject_fault is not None and inject_fault not in {i.name for i in items}:
        raise ContractError(f"Unknown ledger entry {inject_fault!r} for n={n}")

    entries = []
    for item in items:
        coefficients = item.coefficients
        if item.name == inject_fault:
            coefficients = coefficients.negated()
        rhs = evaluate(coefficients, eps0, eps1, eps2)
        entries.append(BoundEntry(item.name, coefficients, rhs, item.headline))

    notes = (SCALING_NOTE, PAIR_WORDING_NOTE) if n == 3 else (SCALING_NOTE,)
    return BoundReport(n, eps0, eps1, eps2, tuple(entries), theta=theta, notes=notes)


@dataclass(frozen=True, slots=True)
class Robustness:
    n: int
    eps: float
    delta: float
    note: str = SCALING_NOTE

    def to_dict(self) -> dict[str, object]:
        return {
            "kind": "robustness",
            "n": self.n,
            "eps": self.eps,
            "delta": self.delta,
            "note": self.note,
        }


def final_robustness(n: int, eps: float) -> Robustness:
    """delta at eps0 = eps1 = eps2 = eps, with the caveat on the isometry constant."""
    report = bound_catalog(n, eps, eps, eps)
    return Robustness(n, eps, report.delta)


def delta_coefficient(n: int) -> float:
    """delta(n, eps) / sqrt(2 eps): sum of coefficients of the largest headline entry."""
    best = 0.0
    for item in catalog_items(n):
        if item.headline:
            best = max(best, sum(item.coefficients.as_tuple()))
    return best


def scaling_ratio(n: int, eps: float) -> float:
    """delta / (n sqrt(2 eps)); tends to 3 + 13/2 + 2 from above as n grows."""
    if eps <= 0:
        raise ContractError(f"scaling ratio needs eps > 0, got {eps}")
    return final_robustness(n, eps).delta / (n * state_estimate_bound(eps))


def loglog_slope(n: int, eps_values: Iterable[float]) -> float:
    """Least-squares slope of log delta against log eps."""
    eps = np.asarray(list(eps_values), dtype=float)
    if eps.size < 2 or np.any(eps <= 0):
        raise ContractError("slope needs at least two positive eps values")
    delta = np.array([final_robustness(n, float(e)).delta for e in eps])
    slope, _intercept = np.polyfit(np.log(eps), np.log(delta), 1)
    return float(slope)


def ratio_table(ns: Iterable[int], eps: float) -> list[tuple[int, float]]:
    return [(n, scaling_ratio(n, eps)) for n in ns]
