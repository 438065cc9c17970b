from __future__ import annotations

from abc import ABC, abstractmethod
from collections.abc import Sequence
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import numpy.typing as npt

from magic_selftest.errors import ContractError, DimensionError
from magic_selftest.pauli import PauliString, commutes, embed
from magic_selftest.quantum.state import ComplexVector, SharedState

ComplexMatrix = npt.NDArray[np.complex128]

# per-string index/coefficient tables are cached up to this register size
_CACHED_QUBITS = 16
COMMUTATION_TOLERANCE = 1e-9


def _compute_action(p: PauliString) -> tuple[npt.NDArray[np.int64], ComplexVector]:
    idx = np.arange(1 << p.n, dtype=np.int64)
    src = idx ^ p.x_mask
    parity = np.zeros(idx.size, dtype=np.int64)
    zmask, bit = p.z_mask, 0
    while zmask:
        if zmask & 1:
            parity ^= (src >> bit) & 1
        zmask >>= 1
        bit += 1
    coeff = (1j) ** ((p.phase + p.y_count) % 4) * (1 - 2 * parity)
    return src, coeff.astype(np.complex128)


@lru_cache(maxsize=2048)
def _cached_action(p: PauliString) -> tuple[npt.NDArray[np.int64], ComplexVector]:
    return _compute_action(p)


def pauli_action(p: PauliString) -> tuple[npt.NDArray[np.int64], ComplexVector]:
    """(src, coeff) such that (p @ v)[k] == coeff[k] * v[src[k]]."""
    if p.n <= _CACHED_QUBITS:
        return _cached_action(p)
    return _compute_action(p)


def apply_pauli(p: PauliString, vec: ComplexVector) -> ComplexVector:
    if vec.size != 1 << p.n:
        raise DimensionError(f"{p.n}-qubit string applied to a vector of size {vec.size}")
    src, coeff = pauli_action(p)
    return coeff * vec[src]


def pauli_matrix(p: PauliString) -> ComplexMatrix:
    src, coeff = pauli_action(p)
    dim = 1 << p.n
    out = np.zeros((dim, dim), dtype=np.complex128)
    out[np.arange(dim), src] = coeff
    return out


def apply(state: SharedState, op: PauliString) -> SharedState:
    if op.n != state.qubits:
        raise DimensionError(f"Operator on {op.n} qubits, state has {state.qubits}")
    return SharedState(state.n, apply_pauli(op, state.amplitudes))


# ---------------------------------------------------------------------------
# Operator expressions
# ---------------------------------------------------------------------------


class Operator(ABC):
    """Formal expression over full-register operators, evaluated against a vector."""

    @property
    @abstractmethod
    def qubits(self) -> int: ...

    @abstractmethod
    def act(self, vec: ComplexVector) -> ComplexVector: ...

    def __matmul__(self, other: Operator) -> Operator:
        return Compose((self, other))

    def __add__(self, other: Operator) -> Operator:
        return LinearCombination(((1.0, self), (1.0, other)))

    def __sub__(self, other: Operator) -> Operator:
        return LinearCombination(((1.0, self), (-1.0, other)))

    def __neg__(self) -> Operator:
        return LinearCombination(((-1.0, self),))

    def __rmul__(self, scalar: complex) -> Operator:
        return LinearCombination(((scalar, self),))


@dataclass(frozen=True, eq=False)
class PauliOperator(Operator):
    string: PauliString

    @property
    def qubits(self) -> int:
        return self.string.n

    def act(self, vec: ComplexVector) -> ComplexVector:
        return apply_pauli(self.string, vec)

    def __str__(self) -> str:
        return str(self.string)


@dataclass(frozen=True, eq=False)
class MatrixOperator(Operator):
    matrix: ComplexMatrix = field(repr=False)
    label: str = "M"

    @property
    def qubits(self) -> int:
        return int(self.matrix.shape[0]).bit_length() - 1

    def act(self, vec: ComplexVector) -> ComplexVector:
        if vec.size != self.matrix.shape[1]:
            raise DimensionError(f"{self.label}: matrix {self.matrix.shape} vs vector {vec.size}")
        return np.asarray(self.matrix @ vec, dtype=np.complex128)

    def __str__(self) -> str:
        return self.label


@dataclass(frozen=True, eq=False)
class Compose(Operator):
    """Product in written order: the rightmost factor acts first."""

    factors: tuple[Operator, ...]

    def __post_init__(self) -> None:
        _same_register(self.factors)

    @property
    def qubits(self) -> int:
        return self.factors[0].qubits

    def act(self, vec: ComplexVector) -> ComplexVector:
        for factor in reversed(self.factors):
            vec = factor.act(vec)
        return vec

    def __matmul__(self, other: Operator) -> Operator:
        return Compose((*self.factors, other))


@dataclass(frozen=True, eq=False)
class LinearCombination(Operator):
    terms: tuple[tuple[complex, Operator], ...]

    def __post_init__(self) -> None:
        _same_register([op for _, op in self.terms])

    @property
    def qubits(self) -> int:
        return self.terms[0][1].qubits

    def act(self, vec: ComplexVector) -> ComplexVector:
        out = np.zeros_like(vec)
        for scalar, op in self.terms:
            out += scalar * op.act(vec)
        return out


def _same_register(ops: Sequence[Operator]) -> None:
    if not ops:
        raise DimensionError("Empty operator expression")
    sizes = {op.qubits for op in ops}
    if len(sizes) != 1:
        raise DimensionError(f"Mixed register sizes in one expression: {sorted(sizes)}")


def compose(*ops: Operator) -> Operator:
    if len(ops) == 1:
        return ops[0]
    return Compose(tuple(ops))


def commutator(a: Operator, b: Operator) -> Operator:
    return a @ b - b @ a


def anticommutator(a: Operator, b: Operator) -> Operator:
    return a @ b + b @ a


def norm_of(expr: Operator, state: SharedState) -> float:
    if expr.qubits != state.qubits:
        raise DimensionError(f"Expression on {expr.qubits} qubits, state has {state.qubits}")
    return float(np.linalg.norm(expr.act(state.amplitudes)))


def expectation(op: Operator, state: SharedState) -> complex:
    if op.qubits != state.qubits:
        raise DimensionError(f"Operator on {op.qubits} qubits, state has {state.qubits}")
    psi = state.amplitudes
    return complex(np.vdot(psi, op.act(psi)))


# ---------------------------------------------------------------------------
# Local observables and their lift onto the full register
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DenseReflection:
    """Hermitian unitary on one party's register, given as a dense matrix."""

    matrix: ComplexMatrix = field(repr=False)
    label: str = "R"

    def __post_init__(self) -> None:
        mat = np.asarray(self.matrix, dtype=np.complex128)
        dim = mat.shape[0]
        if mat.ndim != 2 or mat.shape != (dim, dim) or dim & (dim - 1) or dim < 2:
            raise DimensionError(f"{self.label}: reflection must be 2^k x 2^k, got {mat.shape}")
        if not np.allclose(mat, mat.conj().T, atol=COMMUTATION_TOLERANCE):
            raise ContractError(f"{self.label} is not Hermitian")
        if not np.allclose(mat @ mat, np.eye(dim), atol=COMMUTATION_TOLERANCE):
            raise ContractError(f"{self.label} does not square to the identity")
        mat = mat.copy()
        mat.flags.writeable = False
        object.__setattr__(self, "matrix", mat)

    @property
    def n(self) -> int:
        return int(self.matrix.shape[0]).bit_length() - 1

    def __str__(self) -> str:
        return self.label


Observable = PauliString | DenseReflection


def local_matrix(obs: Observable) -> ComplexMatrix:
    if isinstance(obs, PauliString):
        return pauli_matrix(obs)
    return obs.matrix


def observables_commute(a: Observable, b: Observable) -> bool:
    if isinstance(a, PauliString) and isinstance(b, PauliString):
        return commutes(a, b)
    ma, mb = local_matrix(a), local_matrix(b)
    if ma.shape != mb.shape:
        raise DimensionError(f"Cannot compare {a} and {b}: shapes {ma.shape} vs {mb.shape}")
    return bool(np.linalg.norm(ma @ mb - mb @ ma) <= COMMUTATION_TOLERANCE)


def alice_operator(obs: Observable, pairs: int) -> PauliOperator | MatrixOperator:
    if obs.n != pairs:
        raise DimensionError(f"Alice observable on {obs.n} qubits, device has {pairs} pairs")
    if isinstance(obs, PauliString):
        return PauliOperator(embed(obs, range(1, pairs + 1), 2 * pairs))
    full = np.kron(np.eye(1 << pairs, dtype=np.complex128), obs.matrix)
    return MatrixOperator(full, f"A:{obs.label}")


def bob_operator(obs: Observable, pairs: int) -> PauliOperator | MatrixOperator:
    if obs.n != pairs:
        raise DimensionError(f"Bob observable on {obs.n} qubits, device has {pairs} pairs")
    if isinstance(obs, PauliString):
        return PauliOperator(embed(obs, range(pairs + 1, 2 * pairs + 1), 2 * pairs))
    full = np.kron(obs.matrix, np.eye(1 << pairs, dtype=np.complex128))
    return MatrixOperator(full, f"B:{obs.label}")
