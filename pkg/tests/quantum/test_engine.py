from __future__ import annotations

import math
from collections import Counter
from itertools import permutations

import numpy as np
import pytest

from magic_selftest.errors import ContractError, DimensionError, ResourceLimitError
from magic_selftest.pauli import PauliString, parse
from magic_selftest.quantum import (
    MAX_DENSE_PAIRS,
    DenseReflection,
    JointSampler,
    NoiseKind,
    NoiseModel,
    PauliOperator,
    alice_operator,
    apply,
    bell_expectation,
    bob_operator,
    commutator,
    dump_state,
    expectation,
    joint_distribution,
    measure_joint,
    norm_of,
    pauli_matrix,
    prepare,
)


def _joint(alice: str, bob: str) -> PauliOperator:
    return PauliOperator(PauliString(alice + bob))


def test_prepare_single_pair_is_phi_plus() -> None:
    state = prepare(1)
    amps = dump_state(state)
    assert [i for i, _ in amps] == [0, 3]
    for _, amp in amps:
        assert amp == pytest.approx(1 / math.sqrt(2))


def test_prepare_rejects_empty_and_oversized_registers() -> None:
    with pytest.raises(DimensionError):
        prepare(0)
    with pytest.raises(ResourceLimitError) as exc:
        prepare(MAX_DENSE_PAIRS + 1)
    assert str(MAX_DENSE_PAIRS) in str(exc.value)


def test_bell_pairs_are_stabilized_by_xx_and_zz() -> None:
    state = prepare(2)
    # Alice qubits are the low half of the register
    for letters in ("XIXI", "IZIZ", "ZZZZ"):
        out = apply(state, PauliString(letters))
        assert np.allclose(out.amplitudes, state.amplitudes)
    flipped = apply(state, PauliString("YIYI"))
    assert np.allclose(flipped.amplitudes, -state.amplitudes)


def test_apply_checks_register_size() -> None:
    with pytest.raises(DimensionError):
        apply(prepare(2), PauliString("XX"))


def test_noiseless_correlations() -> None:
    state = prepare(1)
    assert expectation(_joint("X", "X"), state).real == pytest.approx(1.0)
    assert expectation(_joint("Y", "Y"), state).real == pytest.approx(-1.0)
    assert expectation(_joint("Z", "Z"), state).real == pytest.approx(1.0)
    assert expectation(_joint("X", "Z"), state).real == pytest.approx(0.0)


@pytest.mark.parametrize("theta", [0.0, 0.1, 0.7])
def test_y_rotation_scales_xx_and_zz_by_cosine(theta: float) -> None:
    noise = NoiseModel.y_rotation(theta)
    state = prepare(1, noise)
    for letter in "XZ":
        dense = expectation(_joint(letter, letter), state).real
        assert dense == pytest.approx(math.cos(theta))
        assert bell_expectation(1, PauliString(letter), PauliString(letter), noise) == (
            pytest.approx(math.cos(theta))
        )
    assert bell_expectation(1, PauliString("Y"), PauliString("Y"), noise) == pytest.approx(-1.0)


def test_analytic_expectation_matches_dense_engine() -> None:
    noise = NoiseModel.per_pair((0.2, 0.0, 0.45))
    state = prepare(3, noise)
    rng = np.random.default_rng(11)
    for _ in range(40):
        a = "".join(rng.choice(list("IXYZ"), size=3))
        b = "".join(rng.choice(list("IXYZ"), size=3))
        sign = rng.choice([0, 2])
        p_a = PauliString(a, int(sign))
        q_b = PauliString(b)
        dense = expectation(
            alice_operator(p_a, 3) @ bob_operator(q_b, 3), state
        ).real
        assert bell_expectation(3, p_a, q_b, noise) == pytest.approx(dense, abs=1e-12)


def test_analytic_expectation_rejects_bad_inputs() -> None:
    with pytest.raises(DimensionError):
        bell_expectation(2, PauliString("X"), PauliString("XX"))
    with pytest.raises(ContractError):
        bell_expectation(1, PauliString("X", 1), PauliString("X"))


def test_noise_model_validation() -> None:
    with pytest.raises(ContractError) as exc:
        NoiseModel(NoiseKind.Y_ROTATION, ())
    assert "exactly one angle" in str(exc.value)
    with pytest.raises(ContractError):
        NoiseModel(NoiseKind.NONE, (0.3,))
    with pytest.raises(ContractError):
        NoiseModel.y_rotation(math.nan)
    with pytest.raises(DimensionError):
        NoiseModel.per_pair([0.1, 0.2]).angles_for(3)

    assert NoiseModel(NoiseKind.Y_ROTATION, (0.0,)).is_trivial
    assert NoiseModel.y_rotation(0.2).angles_for(3) == (0.2, 0.2, 0.2)


def test_commutator_norm_of_anticommuting_paulis() -> None:
    state = prepare(1)
    x_a = alice_operator(PauliString("X"), 1)
    z_a = alice_operator(PauliString("Z"), 1)
    assert norm_of(commutator(x_a, z_a), state) == pytest.approx(2.0)
    assert norm_of(commutator(x_a, x_a), state) == pytest.approx(0.0)


def test_dense_reflection_validation() -> None:
    with pytest.raises(ContractError) as exc:
        DenseReflection(np.array([[0, 1], [0, 0]], dtype=np.complex128), "bad")
    assert "Hermitian" in str(exc.value)
    with pytest.raises(ContractError) as exc:
        DenseReflection(2.0 * np.eye(2, dtype=np.complex128), "twice")
    assert "identity" in str(exc.value)
    with pytest.raises(DimensionError):
        DenseReflection(np.eye(3, dtype=np.complex128))


def test_dense_reflection_lifts_like_the_pauli_it_encodes() -> None:
    state = prepare(2, NoiseModel.y_rotation(0.3))
    for text in ("+ XZ", "- YI", "+ ZZ"):
        p = parse(text)
        dense = DenseReflection(pauli_matrix(p), text)
        for lift in (alice_operator, bob_operator):
            got = lift(dense, 2).act(state.amplitudes)
            want = lift(p, 2).act(state.amplitudes)
            assert np.allclose(got, want)


def test_lift_checks_pair_count() -> None:
    with pytest.raises(DimensionError):
        alice_operator(PauliString("XX"), 3)


def test_joint_distribution_of_matching_bases() -> None:
    state = prepare(1)
    dist = joint_distribution(state, [_joint("X", "I"), _joint("I", "X")])
    assert dist.keys() == {(1, 1), (-1, -1)}
    assert sum(dist.values()) == pytest.approx(1.0)
    assert dist[(1, 1)] == pytest.approx(0.5)


def test_joint_distribution_needs_commuting_sets() -> None:
    state = prepare(1)
    with pytest.raises(ContractError) as exc:
        joint_distribution(state, [PauliString("XI"), PauliString("ZI")])
    assert "do not commute" in str(exc.value)


def test_measure_joint_collapses_the_state() -> None:
    state = prepare(1)
    outcomes, post = measure_joint(state, [PauliString("ZI")], np.random.default_rng(3))
    # after Z_A the pair is a product state, so Z_B agrees with certainty
    assert expectation(_joint("I", "Z"), post).real == pytest.approx(outcomes[0])


def test_sampler_is_deterministic_per_generator() -> None:
    sampler = JointSampler(prepare(2))
    alice = [PauliString("ZI"), PauliString("IZ")]
    bob = [PauliString("ZI"), PauliString("IZ")]
    first = [sampler.sample(alice, bob, np.random.default_rng([5, r])) for r in range(20)]
    again = [sampler.sample(alice, bob, np.random.default_rng([5, r])) for r in range(20)]
    assert first == again
    for a, b in first:
        assert a == b


def test_sampler_outcomes_follow_the_exact_law() -> None:
    sampler = JointSampler(prepare(1))
    alice = [PauliString("Y")]
    bob = [PauliString("Y")]
    rng = np.random.default_rng(19)
    for _ in range(50):
        a, b = sampler.sample(alice, bob, rng)
        assert a[0] * b[0] == -1
    dist = sampler.distribution(alice, bob)
    assert dist.keys() == {(1, -1), (-1, 1)}


def test_sampler_rejects_non_commuting_party_sets() -> None:
    sampler = JointSampler(prepare(1))
    with pytest.raises(ContractError):
        sampler.sample([PauliString("X"), PauliString("Z")], [], np.random.default_rng(0))


def test_sampler_falls_back_to_sequential_projection() -> None:
    sampler = JointSampler(prepare(2), max_leaves=2)
    alice = [PauliString("ZI"), PauliString("IZ")]
    assert sampler.table(alice, []) is None
    bits, none = sampler.sample(alice, [], np.random.default_rng(1))
    assert len(bits) == 2
    assert none == []


def _reindexed(
    dist: dict[tuple[int, ...], float], order: tuple[int, ...]
) -> dict[tuple[int, ...], float]:
    """Outcomes listed in ``order`` mapped back to the original observable positions."""
    out: dict[tuple[int, ...], float] = {}
    for outcome, p in dist.items():
        key = [0] * len(order)
        for pos, original in enumerate(order):
            key[original] = outcome[pos]
        out[tuple(key)] = out.get(tuple(key), 0.0) + p
    return out


@pytest.mark.parametrize(
    ("n", "letters"),
    [
        (2, ("ZIII", "IIZI", "IZIZ", "IXIX")),
        (3, ("ZIIZII", "IXIIXI", "IZIIZI", "IIYIIY")),
    ],
)
def test_joint_distribution_does_not_depend_on_measurement_order(
    n: int, letters: tuple[str, ...]
) -> None:
    state = prepare(n, NoiseModel.y_rotation(0.4))
    observables = [PauliString(text) for text in letters]
    base = joint_distribution(state, observables)
    # rotated pairs give a law with more than one outcome
    assert len(base) > 2
    for order in permutations(range(len(observables))):
        dist = _reindexed(joint_distribution(state, [observables[i] for i in order]), order)
        assert dist.keys() == base.keys()
        for outcome, p in base.items():
            assert dist[outcome] == pytest.approx(p, abs=1e-12)


def test_sampler_frequencies_do_not_depend_on_measurement_order() -> None:
    sampler = JointSampler(prepare(2, NoiseModel.y_rotation(0.5)))
    alice = [PauliString("ZI"), PauliString("IX")]
    bob = [PauliString("ZI"), PauliString("IX")]
    rounds = 4000

    forward: Counter[tuple[int, ...]] = Counter()
    backward: Counter[tuple[int, ...]] = Counter()
    for r in range(rounds):
        a, b = sampler.sample(alice, bob, np.random.default_rng([21, r]))
        forward[(*a, *b)] += 1
        a, b = sampler.sample(alice[::-1], bob[::-1], np.random.default_rng([22, r]))
        backward[(a[1], a[0], b[1], b[0])] += 1

    exact = sampler.distribution(alice, bob)
    for outcome in forward.keys() | backward.keys() | exact.keys():
        assert forward[outcome] / rounds == pytest.approx(backward[outcome] / rounds, abs=0.05)
        assert forward[outcome] / rounds == pytest.approx(exact.get(outcome, 0.0), abs=0.04)
