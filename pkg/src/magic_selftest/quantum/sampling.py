from __future__ import annotations

import logging
import threading
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from magic_selftest.errors import ContractError, ResourceLimitError
from magic_selftest.pauli import PauliString, commutes
from magic_selftest.quantum.operators import (
    COMMUTATION_TOLERANCE,
    MatrixOperator,
    Observable,
    Operator,
    PauliOperator,
    alice_operator,
    bob_operator,
    pauli_matrix,
)
from magic_selftest.quantum.state import ComplexVector, SharedState

logger = logging.getLogger(__name__)

PRUNE_PROBABILITY = 1e-15
DEFAULT_MAX_LEAVES = 4096

Reflection = PauliOperator | MatrixOperator


def _as_reflection(obs: Reflection | PauliString) -> Reflection:
    if isinstance(obs, PauliString):
        return PauliOperator(obs)
    return obs


def _dense(op: Reflection) -> npt.NDArray[np.complex128]:
    if isinstance(op, PauliOperator):
        return pauli_matrix(op.string)
    return op.matrix


def check_commuting(observables: Sequence[Reflection]) -> None:
    for i, a in enumerate(observables):
        for b in observables[i + 1 :]:
            if isinstance(a, PauliOperator) and isinstance(b, PauliOperator):
                ok = commutes(a.string, b.string)
            else:
                ma, mb = _dense(a), _dense(b)
                ok = bool(np.linalg.norm(ma @ mb - mb @ ma) <= COMMUTATION_TOLERANCE)
            if not ok:
                raise ContractError(f"Observables {a} and {b} do not commute")


def measure_joint(
    state: SharedState,
    observables: Sequence[Reflection | PauliString],
    rng: np.random.Generator,
) -> tuple[list[int], SharedState]:
    """Sample a joint outcome by sequential projection onto (I +- M)/2."""
    ops = [_as_reflection(o) for o in observables]
    check_commuting(ops)
    outcomes, vec = _measure_sequential(state.amplitudes, ops, rng)
    return outcomes, SharedState(state.n, vec)


def _measure_sequential(
    vec: ComplexVector,
    ops: Sequence[Operator],
    rng: np.random.Generator,
) -> tuple[list[int], ComplexVector]:
    outcomes: list[int] = []
    for op in ops:
        image = op.act(vec)
        p_plus = min(1.0, max(0.0, (1.0 + float(np.vdot(vec, image).real)) / 2.0))
        outcome = 1 if rng.random() < p_plus else -1
        prob = p_plus if outcome == 1 else 1.0 - p_plus
        vec = (vec + outcome * image) / (2.0 * np.sqrt(prob))
        outcomes.append(outcome)
    return outcomes, vec


def joint_distribution(
    state: SharedState,
    observables: Sequence[Reflection | PauliString],
    *,
    max_leaves: int = DEFAULT_MAX_LEAVES,
) -> dict[tuple[int, ...], float]:
    """Exact joint outcome law, enumerated depth-first with +1 before -1."""
    ops = [_as_reflection(o) for o in observables]
    check_commuting(ops)
    return _enumerate(state.amplitudes, ops, max_leaves)


def _enumerate(
    psi: ComplexVector,
    ops: Sequence[Operator],
    max_leaves: int,
) -> dict[tuple[int, ...], float]:
    leaves: dict[tuple[int, ...], float] = {}

    def visit(prefix: tuple[int, ...], vec: ComplexVector) -> None:
        depth = len(prefix)
        if depth == len(ops):
            if len(leaves) >= max_leaves:
                raise ResourceLimitError(f"Joint distribution exceeds {max_leaves} outcomes")
            leaves[prefix] = float(np.vdot(vec, vec).real)
            return
        image = ops[depth].act(vec)
        for outcome in (1, -1):
            branch = (vec + outcome * image) / 2.0
            if float(np.vdot(branch, branch).real) >= PRUNE_PROBABILITY:
                visit((*prefix, outcome), branch)

    visit((), psi)
    return leaves


@dataclass(frozen=True, slots=True)
class OutcomeTable:
    outcomes: npt.NDArray[np.int8]
    cumulative: npt.NDArray[np.float64]

    @classmethod
    def from_distribution(cls, dist: dict[tuple[int, ...], float]) -> OutcomeTable:
        outcomes = np.array(list(dist.keys()), dtype=np.int8)
        cumulative = np.cumsum(np.fromiter(dist.values(), dtype=np.float64))
        return cls(outcomes, cumulative)

    def draw(self, rng: np.random.Generator) -> list[int]:
        u = rng.random() * self.cumulative[-1]
        row = min(int(np.searchsorted(self.cumulative, u, side="right")), len(self.cumulative) - 1)
        return [int(v) for v in self.outcomes[row]]


class JointSampler:
    """Samples Alice's and Bob's outcomes for one round on a shared state.

    Outcome tables are cached per (Alice set, Bob set). Sets whose table would exceed
    ``max_leaves`` fall back to sequential projection; which path a key takes depends
    only on the observables, so runs stay deterministic under a seed.
    """

    def __init__(
        self,
        state: SharedState,
        *,
        max_leaves: int = DEFAULT_MAX_LEAVES,
        max_observables: int = 16,
    ) -> None:
        self._state = state
        self._max_leaves = max_leaves
        self._max_observables = max_observables
        self._tables: dict[object, OutcomeTable | None] = {}
        self._lock = threading.Lock()

    @property
    def state(self) -> SharedState:
        return self._state

    def lift(
        self, alice: Sequence[Observable], bob: Sequence[Observable]
    ) -> list[Reflection]:
        pairs = self._state.n
        ops: list[Reflection] = []
        for obs in alice:
            ops.append(alice_operator(obs, pairs))
        for obs in bob:
            ops.append(bob_operator(obs, pairs))
        return ops

    def table(self, alice: Sequence[Observable], bob: Sequence[Observable]) -> OutcomeTable | None:
        key = (tuple(alice), tuple(bob))
        with self._lock:
            if key in self._tables:
                return self._tables[key]
        ops = self.lift(alice, bob)
        check_commuting(ops[: len(alice)])
        check_commuting(ops[len(alice) :])
        table: OutcomeTable | None = None
        if len(ops) <= self._max_observables:
            try:
                table = OutcomeTable.from_distribution(
                    _enumerate(self._state.amplitudes, ops, self._max_leaves)
                )
            except ResourceLimitError:
                logger.warning(
                    "Outcome table for %d observables exceeds %d rows; sampling sequentially",
                    len(ops),
                    self._max_leaves,
                )
        with self._lock:
            self._tables[key] = table
        return table

    def distribution(
        self, alice: Sequence[Observable], bob: Sequence[Observable]
    ) -> dict[tuple[int, ...], float]:
        ops = self.lift(alice, bob)
        check_commuting(ops[: len(alice)])
        check_commuting(ops[len(alice) :])
        return _enumerate(self._state.amplitudes, ops, 1 << len(ops))

    def sample(
        self,
        alice: Sequence[Observable],
        bob: Sequence[Observable],
        rng: np.random.Generator,
    ) -> tuple[list[int], list[int]]:
        table = self.table(alice, bob)
        if table is not None:
            bits = table.draw(rng)
        else:
            bits, _ = _measure_sequential(self._state.amplitudes, self.lift(alice, bob), rng)
        return bits[: len(alice)], bits[len(alice) :]
