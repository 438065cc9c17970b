from __future__ import annotations

import numpy as np
import numpy.typing as npt

from magic_selftest.errors import ContractError, DimensionError
from magic_selftest.pauli import PauliString
from magic_selftest.quantum.state import NoiseModel, y_rotation_matrix

_SINGLE: dict[str, npt.NDArray[np.complex128]] = {
    "I": np.eye(2, dtype=np.complex128),
    "X": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "Z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}


def bell_expectation(
    n: int,
    p_a: PauliString,
    q_b: PauliString,
    noise: NoiseModel | None = None,
) -> float:
    """Exact <Psi| P_A (x) Q_B |Psi> on n (noisy) Bell pairs, as a product over pairs.

    For |Phi+> the per-pair factor is tr(S T^T)/2; a rotation R on Bob's qubit turns
    T into R^dagger T R first.
    """
    if p_a.n != n or q_b.n != n:
        raise DimensionError(f"Expected {n}-qubit strings, got {p_a.n} and {q_b.n}")
    if not (p_a.is_hermitian and q_b.is_hermitian):
        raise ContractError(f"Non-Hermitian phase in ({p_a}, {q_b})")

    angles = (noise or NoiseModel.none()).angles_for(n)
    value: complex = p_a.sign * q_b.sign
    for s_letter, t_letter, theta in zip(p_a.letters, q_b.letters, angles, strict=True):
        if s_letter == "I" and t_letter == "I":
            continue
        t = _SINGLE[t_letter]
        if theta != 0.0:
            r = y_rotation_matrix(theta)
            t = r.conj().T @ t @ r
        value *= np.trace(_SINGLE[s_letter] @ t.T) / 2.0
        if value == 0:
            return 0.0
    return float(np.real(value))
