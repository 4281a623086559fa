"""Pure-numpy statevector kernels (fallback backend).

Index convention: basis label n = sum_i 2**i * sigma_i with qubit 0 least
significant. A two-qubit operator on bond (i, j) acts on the local basis
n4 = sigma_i + 2*sigma_j, i.e. the first member of the bond is the low bit
of the 4x4 block.

Summation order inside the matmul contractions is whatever BLAS uses, so
bit-level reproducibility holds per backend, not across backends.
"""
from __future__ import annotations

import numpy as np


def _as_front_pair(amps: np.ndarray, i: int, j: int, n_qubits: int) -> np.ndarray:
    """View the state as a (4, 2**(L-2)) array with bond index n4 first."""
    t = amps.reshape([2] * n_qubits)
    # Axis for qubit q in the reshaped tensor is L-1-q (row-major).
    t = np.moveaxis(t, (n_qubits - 1 - j, n_qubits - 1 - i), (0, 1))
    return t.reshape(4, -1)


def _from_front_pair(block: np.ndarray, i: int, j: int, n_qubits: int) -> np.ndarray:
    t = block.reshape([2, 2] + [2] * (n_qubits - 2))
    t = np.moveaxis(t, (0, 1), (n_qubits - 1 - j, n_qubits - 1 - i))
    return np.ascontiguousarray(t).reshape(-1)


def apply_matrix4(amps: np.ndarray, m4: np.ndarray, i: int, j: int, n_qubits: int) -> np.ndarray:
    """Apply an arbitrary 4x4 matrix to qubits (i, j). Returns a new array."""
    block = _as_front_pair(amps, i, j, n_qubits)
    return _from_front_pair(m4 @ block, i, j, n_qubits)


def fidelity_tensor4(ket: np.ndarray, bra: np.ndarray, i: int, j: int, n_qubits: int) -> np.ndarray:
    """4x4 matrix F[n, n'] = sum_env ket[n, env] * conj(bra[n', env])."""
    kb = _as_front_pair(ket, i, j, n_qubits)
    bb = _as_front_pair(bra, i, j, n_qubits)
    return kb @ bb.conj().T
