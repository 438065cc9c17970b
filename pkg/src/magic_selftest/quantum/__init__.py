from __future__ import annotations

from magic_selftest.quantum.analytic import bell_expectation
from magic_selftest.quantum.operators import (
    DenseReflection,
    MatrixOperator,
    Observable,
    Operator,
    PauliOperator,
    alice_operator,
    anticommutator,
    apply,
    bob_operator,
    commutator,
    compose,
    expectation,
    norm_of,
    observables_commute,
    pauli_matrix,
)
from magic_selftest.quantum.sampling import JointSampler, joint_distribution, measure_joint
from magic_selftest.quantum.state import (
    MAX_DENSE_PAIRS,
    NoiseKind,
    NoiseModel,
    SharedState,
    dump_state,
    prepare,
    prepare_cached,
)

__all__ = [
    "MAX_DENSE_PAIRS",
    "DenseReflection",
    "JointSampler",
    "MatrixOperator",
    "NoiseKind",
    "NoiseModel",
    "Observable",
    "Operator",
    "PauliOperator",
    "SharedState",
    "alice_operator",
    "anticommutator",
    "apply",
    "bell_expectation",
    "bob_operator",
    "commutator",
    "compose",
    "dump_state",
    "expectation",
    "joint_distribution",
    "measure_joint",
    "norm_of",
    "observables_commute",
    "pauli_matrix",
    "prepare",
    "prepare_cached",
]
