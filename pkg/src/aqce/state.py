"""Dense L-qubit statevectors: gate application, overlaps, fidelity tensors.

Basis labels follow n = sum_i 2**i * sigma_i with qubit 0 least significant.
On a bond (i, j) the local 4x4 basis is n4 = sigma_i + 2*sigma_j; (i, j) and
(j, i) therefore give related but distinct 4x4 matrices, and the
user-specified order is kept.

All read operations treat states as immutable; gate application returns a
new state. Callers that mutate amplitude buffers directly must guarantee
single-writer access.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .linalg import unitarity_deviation

PAULIS = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


class StateVector:
    """Dense state of 2**L complex amplitudes."""

    __slots__ = ("amps",)

    def __init__(self, amps: np.ndarray, copy: bool = True):
        amps = np.array(amps, dtype=complex, copy=copy).reshape(-1)
        n = amps.size
        if n < 2 or n & (n - 1):
            raise ValueError(f"amplitude count must be a power of two >= 2, got {n}")
        self.amps = amps

    @property
    def n_qubits(self) -> int:
        return self.amps.size.bit_length() - 1

    @classmethod
    def zero(cls, n_qubits: int) -> "StateVector":
        return cls.basis(n_qubits, 0)

    @classmethod
    def basis(cls, n_qubits: int, index: int) -> "StateVector":
        amps = np.zeros(2**n_qubits, dtype=complex)
        amps[index] = 1.0
        return cls(amps, copy=False)

    def copy(self) -> "StateVector":
        return StateVector(self.amps, copy=True)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def normalized(self) -> "StateVector":
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return StateVector(self.amps / n, copy=False)


def _check_bond(bond: tuple[int, int], n_qubits: int) -> tuple[int, int]:
    i, j = bond
    if i == j:
        raise ValueError(f"bond qubits must differ, got {bond}")
    if not (0 <= i < n_qubits and 0 <= j < n_qubits):
        raise ValueError(f"bond {bond} out of range for {n_qubits} qubits")
    return i, j


def _check_same_size(a: StateVector, b: StateVector) -> None:
    if a.n_qubits != b.n_qubits:
        raise ValueError(f"qubit counts differ: {a.n_qubits} vs {b.n_qubits}")


def apply_two_qubit(
    state: StateVector,
    u: np.ndarray,
    bond: tuple[int, int],
    adjoint: bool = False,
) -> StateVector:
    """Apply a 4x4 unitary (or its adjoint) to the given bond."""
    i, j = _check_bond(bond, state.n_qubits)
    u = np.asarray(u, dtype=complex)
    if u.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got shape {u.shape}")
    if unitarity_deviation(u) > 1e-10:
        raise ValueError("apply_two_qubit: matrix is not unitary within 1e-10")
    m = u.conj().T if adjoint else u
    return StateVector(kernels.apply_matrix4(state.amps, m, i, j, state.n_qubits), copy=False)


def overlap(bra: StateVector, ket: StateVector) -> complex:
    """<bra|ket> with conjugation on the first argument."""
    _check_same_size(bra, ket)
    return complex(np.vdot(bra.amps, ket.amps))


@dataclass(frozen=True)
class FidelityTensor:
    """4x4 bond matrix F with tr(F @ U.conj().T) = <bra| U-adjoint |ket>."""

    bond: tuple[int, int]
    matrix: np.ndarray

    def trace_with(self, u: np.ndarray) -> complex:
        return complex(np.sum(self.matrix * np.conj(u)))


def fidelity_tensor(ket: StateVector, bra: StateVector, bond: tuple[int, int]) -> FidelityTensor:
    """Trace |ket><bra| over everything but the bond, as a 4x4 matrix."""
    _check_same_size(ket, bra)
    i, j = _check_bond(bond, ket.n_qubits)
    m = kernels.fidelity_tensor4(ket.amps, bra.amps, i, j, ket.n_qubits)
    return FidelityTensor(bond=(i, j), matrix=m)


def pauli_pair_matrix(alpha: int, alpha_p: int) -> np.ndarray:
    """4x4 matrix of P^alpha on the bond's low qubit and P^alpha' on its high qubit."""
    if not (0 <= alpha <= 3 and 0 <= alpha_p <= 3):
        raise ValueError("Pauli labels must be in 0..3 (I, X, Y, Z)")
    return np.kron(PAULIS[alpha_p], PAULIS[alpha])


def pauli_overlap(
    bra: StateVector,
    ket: StateVector,
    bond: tuple[int, int],
    alpha: int,
    alpha_p: int,
) -> complex:
    """<bra| P_i^alpha P_j^alpha' |ket> for bond (i, j)."""
    _check_same_size(bra, ket)
    i, j = _check_bond(bond, ket.n_qubits)
    p = pauli_pair_matrix(alpha, alpha_p)
    moved = kernels.apply_matrix4(ket.amps, p, i, j, ket.n_qubits)
    return complex(np.vdot(bra.amps, moved))


def fidelity_tensor_via_pauli(
    ket: StateVector, bra: StateVector, bond: tuple[int, int]
) -> FidelityTensor:
    """Fidelity tensor rebuilt from the 16 Pauli-pair overlaps.

    This is the measurement-based evaluation path realized classically:
    F = sum_{a,a'} f[a,a'] P_i^a P_j^a' with f[a,a'] a quarter of the
    corresponding Pauli overlap. Agrees with the direct contraction to
    machine precision.
    """
    _check_same_size(ket, bra)
    i, j = _check_bond(bond, ket.n_qubits)
    m = np.zeros((4, 4), dtype=complex)
    for alpha in range(4):
        for alpha_p in range(4):
            coeff = pauli_overlap(bra, ket, (i, j), alpha, alpha_p) / 4.0
            m += coeff * pauli_pair_matrix(alpha, alpha_p)
    return FidelityTensor(bond=(i, j), matrix=m)


class LinearCombinationTarget:
    """Target given as sum_g chi_g |psi_g>, each term a basis index or a state."""

    def __init__(self, n_qubits: int, terms: list[tuple[complex, "int | StateVector"]]):
        if not terms:
            raise ValueError("need at least one term")
        self.n_qubits = n_qubits
        self.terms = [(complex(chi), comp) for chi, comp in terms]
        for _, comp in self.terms:
            if isinstance(comp, StateVector):
                if comp.n_qubits != n_qubits:
                    raise ValueError("component state has wrong qubit count")
            elif not 0 <= int(comp) < 2**n_qubits:
                raise ValueError(f"basis index {comp} out of range")

    def component_state(self, k: int) -> StateVector:
        chi, comp = self.terms[k]
        if isinstance(comp, StateVector):
            return comp
        return StateVector.basis(self.n_qubits, int(comp))

    def to_statevector(self) -> StateVector:
        amps = np.zeros(2**self.n_qubits, dtype=complex)
        for chi, comp in self.terms:
            if isinstance(comp, StateVector):
                amps += chi * comp.amps
            else:
                amps[int(comp)] += chi
        dense = StateVector(amps, copy=False)
        if abs(dense.norm() - 1.0) > 1e-10:
            raise ValueError("linear combination is not normalized")
        return dense


def reduced_density_matrix(state: StateVector, qubits: tuple[int, int]) -> np.ndarray:
    """4x4 reduced density matrix on the given qubit pair."""
    i, j = _check_bond(qubits, state.n_qubits)
    rho = kernels.fidelity_tensor4(state.amps, state.amps, i, j, state.n_qubits)
    return (rho + rho.conj().T) / 2


def q_fidelity(rho_a: np.ndarray, rho_b: np.ndarray) -> float:
    """sqrt(Tr[rho_a rho_b]); equals |<a|b>| when both states are pure."""
    rho_a = np.asarray(rho_a, dtype=complex)
    rho_b = np.asarray(rho_b, dtype=complex)
    if rho_a.shape != rho_b.shape or rho_a.ndim != 2 or rho_a.shape[0] != rho_a.shape[1]:
        raise ValueError(f"density matrices must share a square shape, got {rho_a.shape} vs {rho_b.shape}")
    t = float(np.real(np.trace(rho_a @ rho_b)))
    return float(np.sqrt(max(t, 0.0)))


# --- statevector file formats -------------------------------------------

_QSV_MAGIC = b"QSV v1 L="


def save_qsv(state: StateVector, path: str) -> None:
    """Binary format: one ASCII header line, then little-endian f64 re/im pairs."""
    with open(path, "wb") as fh:
        fh.write(_QSV_MAGIC + str(state.n_qubits).encode() + b"\n")
        inter = np.empty(2 * state.amps.size, dtype="<f8")
        inter[0::2] = state.amps.real
        inter[1::2] = state.amps.imag
        fh.write(inter.tobytes())


def load_qsv(path: str) -> StateVector:
    with open(path, "rb") as fh:
        header = fh.readline()
        if not header.startswith(_QSV_MAGIC):
            raise ValueError(f"{path}: not a QSV v1 file")
        n_qubits = int(header[len(_QSV_MAGIC):].strip())
        raw = fh.read()
    expected = 2 ** n_qubits * 2 * 8
    if len(raw) != expected:
        raise ValueError(f"{path}: expected {expected} payload bytes, got {len(raw)}")
    inter = np.frombuffer(raw, dtype="<f8")
    return StateVector(inter[0::2] + 1j * inter[1::2], copy=False)


def save_txt(state: StateVector, path: str) -> None:
    """Plain-text interoperability format: 'index re im' per line."""
    with open(path, "w") as fh:
        for n, a in enumerate(state.amps):
            fh.write(f"{n} {float(a.real)!r} {float(a.imag)!r}\n")


def load_txt(path: str) -> StateVector:
    entries: dict[int, complex] = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            idx_s, re_s, im_s = line.split()
            entries[int(idx_s)] = float(re_s) + 1j * float(im_s)
    size = max(entries) + 1
    n_qubits = max(1, (size - 1).bit_length())
    amps = np.zeros(2**n_qubits, dtype=complex)
    for n, a in entries.items():
        amps[n] = a
    return StateVector(amps, copy=False)
