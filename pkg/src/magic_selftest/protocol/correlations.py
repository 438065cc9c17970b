from __future__ import annotations

import logging
from dataclasses import dataclass

from magic_selftest.pauli import PauliString, identity, product
from magic_selftest.protocol.predicates import Member, evaluate_round, family_members
from magic_selftest.quantum import JointSampler, bell_expectation
from magic_selftest.strategies import DeviceModel

logger = logging.getLogger(__name__)

FAMILY_NAMES = {0: "eps0", 1: "eps1", 2: "eps2"}


@dataclass(frozen=True, slots=True)
class ExactEpsilons:
    """Largest correlation deficit per family, with the member that attains it."""

    values: dict[int, float]
    worst: dict[int, str]

    def get(self, c: int) -> float:
        return self.values.get(c, 0.0)

    @property
    def eps0(self) -> float:
        return self.get(0)

    @property
    def eps1(self) -> float:
        return self.get(1)

    @property
    def eps2(self) -> float:
        return self.get(2)


def _game_sets_well_formed(device: DeviceModel) -> bool:
    minus_i = -identity(device.pairs)
    for (c, _y), obs in device.bob_sets.items():
        if c != 0:
            continue
        if not all(isinstance(o, PauliString) for o in obs):
            return False
        if product(obs, device.pairs) != minus_i:  # type: ignore[arg-type]
            return False
    return True


def _analytic(device: DeviceModel) -> bool:
    return device.is_pauli and device.explicit_state is None and _game_sets_well_formed(device)


def _member_operators(device: DeviceModel, member: Member) -> tuple[PauliString, PauliString]:
    alice = device.alice_assign(member.x)
    bob = device.bob_assign(member.family, member.y)
    p = product((alice[k - 1] for k in member.alice), device.pairs)  # type: ignore[arg-type]
    q = bob[member.bob - 1]
    assert isinstance(q, PauliString)
    return p, q


def exact_correlations(device: DeviceModel) -> dict[str, float]:
    """Exact <a-product * b> for every member the device's round types check.

    Pauli devices on (noisy) Bell pairs use the analytic engine; other devices sum
    acceptance over the dense joint outcome law, where malformed answers lose.
    """
    members = [m for c in device.round_types for m in family_members(device.n, c)]
    out: dict[str, float] = {}
    if _analytic(device):
        for m in members:
            p, q = _member_operators(device, m)
            out[m.label] = bell_expectation(device.pairs, p, q, device.noise)
        return out

    sampler = JointSampler(device.shared_state())
    laws: dict[tuple[int, int, int], dict[tuple[int, ...], float]] = {}
    for m in members:
        key = (m.family, m.x, m.y)
        if key not in laws:
            laws[key] = sampler.distribution(
                device.alice_assign(m.x), device.bob_assign(m.family, m.y)
            )
        split = device.n
        accept = 0.0
        for bits, prob in laws[key].items():
            verdict = evaluate_round(device.n, m.family, m.x, m.y, bits[:split], bits[split:])
            if verdict.sub[m.label]:
                accept += prob
        out[m.label] = 2.0 * accept - 1.0
    return out


def exact_epsilons(device: DeviceModel) -> ExactEpsilons:
    correlations = exact_correlations(device)
    values: dict[int, float] = {}
    worst: dict[int, str] = {}
    for c in device.round_types:
        for m in family_members(device.n, c):
            deficit = min(2.0, max(0.0, 1.0 - correlations[m.label]))
            if c not in values or deficit > values[c]:
                values[c] = deficit
                worst[c] = m.label
    logger.debug("Exact epsilons for %s device: %s", device.kind, values)
    return ExactEpsilons(values, worst)


def product_rule_correlations(device: DeviceModel) -> dict[str, float]:
    """Y-row game correlations with Bob's Y answer replaced by -(X answer)(Z answer).

    Coincides with the measured form whenever Bob's column triple multiplies to -I.
    Requires an analytic (Pauli, Bell-pair) device.
    """
    out: dict[str, float] = {}
    alice = device.alice_assign(2)
    for y in range(1, device.n + 1):
        bob_x, _bob_y, bob_z = device.bob_assign(0, y)
        assert isinstance(bob_x, PauliString) and isinstance(bob_z, PauliString)
        others = [alice[k - 1] for k in range(1, device.n + 1) if k != y]
        p = product(others, device.pairs)  # type: ignore[arg-type]
        out[f"GY.{y}"] = -bell_expectation(device.pairs, p, bob_x * bob_z, device.noise)
    return out
