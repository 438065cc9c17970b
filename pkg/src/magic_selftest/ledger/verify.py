"""Numerical check of every catalog inequality on a concrete honest-like device.

Left-hand sides are norms of operator expressions applied to the device's shared state.
Right-hand sides come from the catalog at the device's exact correlation deficits, so
a failing entry points at an implementation error, not at the device.
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Iterable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import combinations, permutations

import numpy as np

from magic_selftest.coloring import edges_of_color
from magic_selftest.errors import ContractError, ResourceLimitError
from magic_selftest.ledger.formulas import bound_catalog
from magic_selftest.ledger.observables import UnknownObservables, word, words
from magic_selftest.ledger.report import BoundEntry, BoundReport
from magic_selftest.protocol import exact_epsilons, product_rule_correlations
from magic_selftest.quantum import NoiseKind, NoiseModel, Operator, SharedState, norm_of
from magic_selftest.strategies import (
    ONE_SIDE_LOCAL_KINDS,
    DeviceModel,
    honest_device,
    supports_selftest,
)

logger = logging.getLogger(__name__)

MAX_LEDGER_N = 11
# applied when the caller gives no limit and n is at least this large
LARGE_N = 11
LARGE_N_INSTANCES = 6

Instance = tuple[int, ...]
Builder = Callable[[UnknownObservables, Instance], Operator]
_LETTER = {1: "X", 2: "Y", 3: "Z"}


def _comm(a: Operator, b: Operator) -> Operator:
    return word(a, b) - word(b, a)


def _anti(a: Operator, b: Operator) -> Operator:
    return word(a, b) + word(b, a)


def chain_order(i: int, v: int, n: int) -> tuple[int, ...]:
    """Qubit order (sigma_1..sigma_n) for the anticommutation chain at qubit i, colour v.

    sigma_1 = i, sigma_n = v and sigma_2 is i's partner in colour v; the remaining colour-v
    pairs fill (sigma_{4k-1}, sigma_{4k+1}) and (sigma_{4k}, sigma_{4k+2}), so every pair
    observable in the chain is measured under the same pair-check input v.
    """
    if n <= 3 or n % 4 != 3:
        raise ContractError(f"Chain order needs n = 3 (mod 4), n > 3, got {n}")
    if i == v or not (1 <= i <= n and 1 <= v <= n):
        raise ContractError(f"Chain order needs distinct qubits in 1..{n}, got i={i}, v={v}")
    pairs = edges_of_color(v, n)
    first = next(p for p in pairs if i in p)
    rest = [p for p in pairs if p != first]
    sigma = [0] * (n + 1)
    sigma[1], sigma[2], sigma[n] = i, first[1] if first[0] == i else first[0], v
    for k in range(1, (n - 3) // 4 + 1):
        (a, b), (c, d) = rest[2 * k - 2], rest[2 * k - 1]
        sigma[4 * k - 1], sigma[4 * k + 1] = a, b
        sigma[4 * k], sigma[4 * k + 2] = c, d
    return tuple(sigma[1:])


class _Chain:
    """Operator pieces shared by the chain entries for one sigma."""

    def __init__(self, o: UnknownObservables, instance: Instance) -> None:
        self.o = o
        self.n = o.n
        self.sigma = chain_order(instance[0], instance[1], o.n)

    def s(self, k: int) -> int:
        return self.sigma[k - 1]

    def z_then_x(self) -> list[Operator]:
        """(prod_{k != n} Z_A) (prod_k X_A)."""
        o, n = self.o, self.n
        return [o.za(self.s(k)) for k in range(1, n)] + [o.xa(self.s(k)) for k in range(1, n + 1)]

    def alice_blocks(self) -> list[Operator]:
        o, n, s = self.o, self.n, self.s
        ops: list[Operator] = []
        for k in range(1, (n - 3) // 2 + 1):
            hi, lo = s(n - 2 * k + 1), s(n - 2 * k)
            ops += [o.xa(hi), o.za(hi), o.za(lo), o.xa(lo)]
        return ops

    def target(self) -> Operator:
        o, s = self.o, self.s
        return word(o.xa(s(self.n)), o.xa(s(1)), o.za(s(1)), o.za(s(2)))

    def target_squared(self) -> Operator:
        target = self.target()
        return word(target, target)

    def head(self) -> list[Operator]:
        """X_{B,sn}^{sn} Z_B^{s1,s2} X_B^{s1,s2}."""
        o, s = self.o, self.s
        return [o.xb(s(self.n)), o.bob_pair("Z", s(1), s(2)), o.bob_pair("X", s(1), s(2))]

    def quads(self) -> list[tuple[int, int, int, int]]:
        s = self.s
        return [
            (s(4 * k - 1), s(4 * k), s(4 * k + 1), s(4 * k + 2))
            for k in range(1, (self.n - 3) // 4 + 1)
        ]

    def game_zx(self, k: int) -> list[Operator]:
        return [self.o.bob_game("Z", self.s(k)), self.o.bob_game("X", self.s(k))]


# -- entries shared by both catalogs ------------------------------------------------------


def _game_correlation(o: UnknownObservables, inst: Instance) -> Operator:
    x, y = inst
    letter = _LETTER[x]
    others = (o.alice(letter, k) for k in range(1, o.n + 1) if k != y)
    return words(others) - o.bob_game(letter, y)


def _correlation_x(o: UnknownObservables, inst: Instance) -> Operator:
    return o.xa(inst[0]) - o.xb(inst[0])


def _correlation_z(o: UnknownObservables, inst: Instance) -> Operator:
    i, j = inst
    return o.za(i) - o.zb(i, j)


def _pair_correlation(letter: str) -> Builder:
    def build(o: UnknownObservables, inst: Instance) -> Operator:
        a, b = inst
        return word(o.alice(letter, a), o.alice(letter, b)) - o.bob_pair(letter, a, b)

    return build


def _bob_commutation_xx(o: UnknownObservables, inst: Instance) -> Operator:
    i, j = inst
    return _comm(o.xb(i), o.xb(j))


def _bob_commutation_zz(o: UnknownObservables, inst: Instance) -> Operator:
    i, k, j, l = inst
    return _comm(o.zb(i, k), o.zb(j, l))


def _bob_commutation_xz(o: UnknownObservables, inst: Instance) -> Operator:
    i, j, l = inst
    return _comm(o.xb(i), o.zb(j, l))


def _alice_commutation(o: UnknownObservables, inst: Instance) -> Operator:
    m, i, nn, j = inst
    return _comm(o.alice(_LETTER[m], i), o.alice(_LETTER[nn], j))


def _alice_anticommutation(o: UnknownObservables, inst: Instance) -> Operator:
    return _anti(o.xa(inst[0]), o.za(inst[0]))


def _bob_anticommutation(o: UnknownObservables, inst: Instance) -> Operator:
    i, j = inst
    return _anti(o.xb(i), o.zb(i, j))


def _square_pair_anticommutation(o: UnknownObservables, inst: Instance) -> Operator:
    i, j, k = inst
    return _anti(word(o.xa(i), o.xa(j)), word(o.za(i), o.za(k)))


# -- 3 x n entries -------------------------------------------------------------------------


def _pair_product_estimate(o: UnknownObservables, inst: Instance) -> Operator:
    i, j, k, l = inst
    alice = word(o.xa(l), o.za(l), o.za(k), o.xa(k), o.xa(j), o.za(j), o.za(i), o.xa(i))
    bob = word(
        o.bob_pair("X", i, k), o.bob_pair("Z", i, k), o.bob_pair("Z", j, l), o.bob_pair("X", j, l)
    )
    return alice - bob


def _alice_pair_chain(o: UnknownObservables, inst: Instance) -> Operator:
    ch = _Chain(o, inst)
    s = ch.s
    xs = [o.bob_pair("X", s(1), s(2))]
    zs = [o.bob_pair("Z", s(1), s(2))]
    for a, c, b, d in ch.quads():
        xs += [o.bob_pair("X", a, b), o.bob_pair("X", c, d)]
        zs += [o.bob_pair("Z", a, b), o.bob_pair("Z", c, d)]
    return words(ch.z_then_x()) - word(o.xa(s(ch.n)), *xs, *zs)


def _chain_y_start(o: UnknownObservables, inst: Instance) -> Operator:
    ch = _Chain(o, inst)
    return words(o.ya(ch.s(k)) for k in range(2, ch.n + 1)) + word(*ch.game_zx(1))


def _chain_bob_product(o: UnknownObservables, inst: Instance) -> Operator:
    ch = _Chain(o, inst)
    left = [op for k in range(2, ch.n + 1) for op in ch.game_zx(k)]
    return words(left) + word(*ch.game_zx(1))


def _chain_x_swap(o: UnknownObservables, inst: Instance) -> Operator:
    ch = _Chain(o, inst)
    n, s = ch.n, ch.s
    left = [op for k in range(2, n) for op in ch.game_zx(k)]
    left.append(o.bob_game("Z", s(n)))
    left += [o.xa(s(k)) for k in range(1, n)]
    right = [o.bob_game("Z", s(1))] + [o.xa(s(k)) for k in range(2, n + 1)]
    return words(left) + words(right)


def _chain_alice_swap(o: UnknownObservables, inst: Instance) -> Operator:
    ch = _Chain(o, inst)
    left = [*ch.z_then_x(), *ch.alice_blocks(), o.xa(ch.s(2))]
    return words(left) + ch.target()


def _chain_swap_estimate(o: UnknownObservables, inst: Instance) -> Operator:
    ch = _Chain(o, inst)
    s1, s2, sn = ch.s(1), ch.s(2), ch.s(ch.n)
    left = word(o.xa(s2), o.zb(s1, sn), o.zb(s2, sn), o.xb(sn), o.xb(s1))
    return left - words(ch.head())


def _chain_pair_estimate(o: UnknownObservables, inst: Instance) -> Operator:
    ch = _Chain(o, inst)
    return words([*ch.head(), *ch.z_then_x(), *ch.alice_blocks()]) + ch.target_squared()


def _chain_paired(o: UnknownObservables, inst: Instance) -> Operator:
    ch = _Chain(o, inst)
    pairs: list[Operator] = []
    for a, c, b, d in ch.quads():
        pairs += [
            o.bob_pair("X", a, b),
            o.bob_pair("Z", a, b),
            o.bob_pair("Z", c, d),
            o.bob_pair("X", c, d),
        ]
    return words([*ch.head(), *pairs, *ch.z_then_x()]) + ch.target_squared()


def _chain_cancelled(o: UnknownObservables, inst: Instance) -> Operator:
    ch = _Chain(o, inst)
    sn = ch.s(ch.n)
    return word(o.xa(sn), o.xb(sn)) + ch.target_squared()


def _chain_pair_anticommutation(o: UnknownObservables, inst: Instance) -> Operator:
    ch = _Chain(o, inst)
    s1, s2, sn = ch.s(1), ch.s(2), ch.s(ch.n)
    return _anti(word(o.xa(s1), o.xa(sn)), word(o.za(s1), o.za(s2)))


# -- instance sets -------------------------------------------------------------------------


def _qubits(n: int) -> range:
    return range(1, n + 1)


def _game_instances(n: int) -> list[Instance]:
    return [(x, y) for x in (1, 2, 3) for y in _qubits(n)]


def _singles(n: int) -> list[Instance]:
    return [(i,) for i in _qubits(n)]


def _ordered_pairs(n: int) -> list[Instance]:
    return list(permutations(_qubits(n), 2))


def _unordered_pairs(n: int) -> list[Instance]:
    return list(combinations(_qubits(n), 2))


def _zz_instances(n: int) -> list[Instance]:
    slots = _ordered_pairs(n)
    return [(i, k, j, l) for (i, k), (j, l) in combinations(slots, 2)]


def _xz_instances(n: int) -> list[Instance]:
    return [(i, j, l) for i in _qubits(n) for j, l in _ordered_pairs(n) if i != j]


def _alice_comm_instances(n: int) -> list[Instance]:
    return [(m, i, nn, j) for m in (1, 3) for nn in (1, 3) for i, j in _ordered_pairs(n)]


def _triples(n: int) -> list[Instance]:
    return list(permutations(_qubits(n), 3))


def _quadruples(n: int) -> list[Instance]:
    return list(permutations(_qubits(n), 4))


@dataclass(frozen=True, slots=True)
class LedgerCheck:
    name: str
    instances: Callable[[int], list[Instance]]
    build: Builder


def _checks(n: int) -> dict[str, LedgerCheck]:
    common = [
        LedgerCheck("game_correlation", _game_instances, _game_correlation),
        LedgerCheck("correlation_x", _singles, _correlation_x),
        LedgerCheck("correlation_z", _ordered_pairs, _correlation_z),
        LedgerCheck("bob_commutation_xx", _unordered_pairs, _bob_commutation_xx),
        LedgerCheck("bob_commutation_zz", _zz_instances, _bob_commutation_zz),
        LedgerCheck("bob_commutation_xz", _xz_instances, _bob_commutation_xz),
        LedgerCheck("alice_commutation", _alice_comm_instances, _alice_commutation),
        LedgerCheck("alice_anticommutation", _singles, _alice_anticommutation),
        LedgerCheck("bob_anticommutation", _ordered_pairs, _bob_anticommutation),
    ]
    if n == 3:
        extra = [
            LedgerCheck("alice_pair_anticommutation", _triples, _square_pair_anticommutation),
        ]
    else:
        extra = [
            LedgerCheck("pair_correlation_x", _unordered_pairs, _pair_correlation("X")),
            LedgerCheck("pair_correlation_z", _unordered_pairs, _pair_correlation("Z")),
            LedgerCheck("pair_product_estimate", _quadruples, _pair_product_estimate),
            LedgerCheck("alice_pair_chain", _ordered_pairs, _alice_pair_chain),
            LedgerCheck("chain_y_start", _ordered_pairs, _chain_y_start),
            LedgerCheck("chain_bob_product", _ordered_pairs, _chain_bob_product),
            LedgerCheck("chain_x_swap", _ordered_pairs, _chain_x_swap),
            LedgerCheck("chain_alice_swap", _ordered_pairs, _chain_alice_swap),
            LedgerCheck("chain_swap_estimate", _ordered_pairs, _chain_swap_estimate),
            LedgerCheck("chain_pair_estimate", _ordered_pairs, _chain_pair_estimate),
            LedgerCheck("chain_paired", _ordered_pairs, _chain_paired),
            LedgerCheck("chain_cancelled", _ordered_pairs, _chain_cancelled),
            LedgerCheck("alice_pair_anticommutation", _ordered_pairs, _chain_pair_anticommutation),
        ]
    return {check.name: check for check in (*common, *extra)}


def select_instances(items: Sequence[Instance], limit: int | None) -> list[Instance]:
    """At most ``limit`` items, evenly spread over the full list and always including the first."""
    if limit is None or len(items) <= limit:
        return list(items)
    if limit < 1:
        raise ContractError(f"max_instances must be >= 1, got {limit}")
    picks = np.unique(np.linspace(0, len(items) - 1, limit).round().astype(int))
    return [items[int(p)] for p in picks]


def _check_device(device: DeviceModel) -> None:
    n = device.n
    if device.kind not in ONE_SIDE_LOCAL_KINDS:
        raise ContractError(f"Ledger verification needs an honest-like device, got {device.kind}")
    if not supports_selftest(n):
        raise ContractError(f"Ledger verification needs n = 3 or n = 3 (mod 4), got {n}")
    if n > MAX_LEDGER_N:
        raise ResourceLimitError(
            f"Ledger verification is limited to n <= {MAX_LEDGER_N} (dense state on 2n qubits)"
        )
    needed = (0, 1) if n == 3 else (0, 1, 2)
    missing = [c for c in needed if c not in device.round_types]
    if missing:
        raise ContractError(f"Device has no Bob sets for round types {missing}")


def _clamp(value: float) -> float:
    return min(2.0, max(0.0, value))


def device_epsilons(device: DeviceModel) -> tuple[float, float, float]:
    """Exact deficits; eps0 also covers the product-rule form of the Y-row correlations."""
    exact = exact_epsilons(device)
    product_rule = product_rule_correlations(device)
    eps0 = max([exact.eps0, *(1.0 - c for c in product_rule.values())])
    return _clamp(eps0), _clamp(exact.eps1), _clamp(exact.eps2)


def _noise_angle(noise: NoiseModel) -> float | None:
    if noise.kind is NoiseKind.Y_ROTATION:
        return noise.angles[0]
    if noise.kind is NoiseKind.NONE:
        return 0.0
    return None


def _measure(
    check: LedgerCheck,
    observables: UnknownObservables,
    state: SharedState,
    limit: int | None,
) -> tuple[float, Instance | None, int]:
    chosen = select_instances(check.instances(observables.n), limit)
    worst, where = 0.0, None
    for inst in chosen:
        value = norm_of(check.build(observables, inst), state)
        if where is None or value > worst:
            worst, where = value, inst
    return worst, where, len(chosen)


def ledger_verify(
    device: DeviceModel,
    *,
    max_instances: int | None = None,
    inject_fault: str | None = None,
    workers: int = 1,
) -> BoundReport:
    """Measure every catalog left-hand side on ``device`` and compare with its bound.

    Each entry reports the worst instance over the index tuples evaluated; for n >= 11
    and no explicit limit a deterministic spread of instances is used per entry.
    """
    _check_device(device)
    n = device.n
    eps0, eps1, eps2 = device_epsilons(device)
    catalog = bound_catalog(
        n, eps0, eps1, eps2, inject_fault=inject_fault, theta=_noise_angle(device.noise)
    )
    checks = _checks(n)
    if set(checks) != set(catalog.names()):
        raise ContractError(f"Ledger checks and catalog disagree for n={n}")

    limit = max_instances
    if limit is None and n >= LARGE_N:
        limit = LARGE_N_INSTANCES
    observables = UnknownObservables(device)
    state = device.shared_state()
    logger.info(
        "Verifying %d ledger entries for %s device (n=%d, eps=%.3g/%.3g/%.3g, limit=%s)",
        len(checks),
        device.kind,
        n,
        eps0,
        eps1,
        eps2,
        limit,
    )

    def run(entry: BoundEntry) -> BoundEntry:
        lhs, where, count = _measure(checks[entry.name], observables, state, limit)
        measured = entry.with_measurement(lhs, where, count)
        logger.debug("%s: lhs=%.6g rhs=%.6g at %s", entry.name, lhs, entry.rhs, where)
        return measured

    if workers <= 1:
        entries = [run(e) for e in catalog.entries]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            entries = list(pool.map(run, catalog.entries))

    report = BoundReport(
        n, eps0, eps1, eps2, tuple(entries), theta=catalog.theta, notes=catalog.notes
    )
    for failed in report.failures:
        logger.warning(
            "Ledger entry %s fails: lhs=%.12g > rhs=%.12g at %s",
            failed.name,
            failed.lhs,
            failed.rhs,
            failed.instance,
        )
    return report


def noisy_honest_device(n: int, theta: float) -> DeviceModel:
    noise = NoiseModel.y_rotation(theta) if theta else NoiseModel.none()
    return honest_device(n, noise)


def verify_grid(
    n: int,
    thetas: Iterable[float],
    *,
    max_instances: int | None = None,
    inject_fault: str | None = None,
    workers: int = 1,
) -> list[BoundReport]:
    """One report per rotation angle, in the order given."""
    reports = []
    for theta in thetas:
        device = noisy_honest_device(n, theta)
        report = ledger_verify(
            device, max_instances=max_instances, inject_fault=inject_fault, workers=workers
        )
        reports.append(report)
        logger.info("theta=%g: delta=%.6g pass=%s", theta, report.delta, report.passed)
    return reports
