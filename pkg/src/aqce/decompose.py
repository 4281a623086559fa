"""Two-qubit gate decomposition into the canonical local/entangling form.

Any 4x4 unitary U on a bond (i, j) factors as

    U = exp(-i*alpha0) * (R'_i R'_j) * D(a1, a2, a3) * (R_i R_j)

with single-qubit Euler rotations R, R' and the entangling core
D = exp(-i*(a1 XX + a2 YY + a3 ZZ)). The factorization works in the magic
(Bell) basis, where D is diagonal and maximally entangled states are exactly
the real vectors: U is conjugated into that basis, W = U^T U is
diagonalized over a real orthonormal eigenbasis, and the local rotations are
read off the product-state factors of combinations of those eigenvectors.
The remaining phases are fixed by a small integer search.

Everything here uses the bond-local basis n4 = sigma_i + 2*sigma_j (first
bond member = low bit), matching `aqce.state`.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass

import numpy as np

from .linalg import max_abs, unitary_symmetric_eig, unitarity_deviation

SQRT2 = math.sqrt(2.0)

I2 = np.eye(2, dtype=complex)
H_GATE = np.array([[1, 1], [1, -1]], dtype=complex) / SQRT2
S_GATE = np.array([[1, 0], [0, 1j]], dtype=complex)

# Columns are the magic (Bell) states expressed in the bond basis.
MAGIC = np.array(
    [
        [1, -1j, 0, 0],
        [0, 0, -1, -1j],
        [0, 0, 1, -1j],
        [1, 1j, 0, 0],
    ],
    dtype=complex,
) / SQRT2

# CNOT with the bond's low qubit (i) as control, high qubit (j) as target.
CNOT = np.array(
    [[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0]], dtype=complex
)
SWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
)


class DecompositionError(RuntimeError):
    """Internal consistency failure in the canonical-form construction."""


def wrap_angle(x: float) -> float:
    """Wrap to (-pi, pi], ties at +/-pi resolved to +pi."""
    y = math.remainder(x, 2 * math.pi)
    return math.pi if y == -math.pi else y


def rx(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def ry(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def rz(theta: float) -> np.ndarray:
    return np.array([[np.exp(-0.5j * theta), 0], [0, np.exp(0.5j * theta)]], dtype=complex)


@dataclass(frozen=True)
class EulerAngles:
    """V = exp(-i*theta0/2) Rz(theta3) Ry(theta2) Rz(theta1)."""

    theta0: float
    theta1: float
    theta2: float
    theta3: float

    def matrix(self) -> np.ndarray:
        return np.exp(-0.5j * self.theta0) * (rz(self.theta3) @ ry(self.theta2) @ rz(self.theta1))

    def zyz(self) -> tuple[float, float, float]:
        return (self.theta1, self.theta2, self.theta3)


def euler_decompose(v: np.ndarray) -> EulerAngles:
    """Z-Y-Z angles plus explicit global phase for a 2x2 unitary.

    theta1, theta3 in (-pi, pi], theta2 in [0, pi]; theta0 is a half-angle
    phase and is normalized to (-2*pi, 2*pi].

    Three branches: generic, diagonal (off-diagonal entries zero, theta2=0)
    and antidiagonal (diagonal entries zero, theta2=pi).
    """
    v = np.asarray(v, dtype=complex)
    if v.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {v.shape}")
    if unitarity_deviation(v) > 1e-10:
        raise ValueError("euler_decompose: matrix is not unitary within 1e-10")

    c = abs(v[0, 0])
    s = abs(v[1, 0])
    if s < 1e-13:
        theta2 = 0.0
        theta3 = 0.0
        theta1 = wrap_angle(np.angle(v[1, 1] / v[0, 0]))
    elif c < 1e-13:
        theta2 = math.pi
        theta3 = 0.0
        theta1 = wrap_angle(np.angle(-v[0, 1] / v[1, 0]))
    else:
        theta2 = 2.0 * math.atan2(s, c)
        theta3 = wrap_angle(np.angle(v[1, 0] / v[0, 0]))
        theta1 = wrap_angle(np.angle(v[1, 1] / v[1, 0]))

    theta0 = -np.angle(v[0, 0] * v[1, 1] - v[0, 1] * v[1, 0])
    candidate = EulerAngles(theta0, theta1, theta2, theta3)
    r = candidate.matrix()
    if max_abs(r - v) > max_abs(r + v):
        # exp(-i*theta0/2) only reaches half the phase circle; the other
        # half lives at theta0 + 2*pi.
        theta0 = theta0 + 2 * math.pi if theta0 <= 0 else theta0 - 2 * math.pi
        candidate = EulerAngles(theta0, theta1, theta2, theta3)
    return candidate


def magic_transform(u: np.ndarray, direction: str) -> np.ndarray:
    """Change of basis for a 4x4 operator: 'to' or 'from' the magic basis."""
    u = np.asarray(u, dtype=complex)
    if u.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got shape {u.shape}")
    if direction == "to":
        return MAGIC.conj().T @ u @ MAGIC
    if direction == "from":
        return MAGIC @ u @ MAGIC.conj().T
    raise ValueError("direction must be 'to' or 'from'")


@dataclass(frozen=True)
class CanonicalForm:
    """Angles of U = e^{-i alpha0} (R'_i R'_j) D(alphas) (R_i R_j)."""

    alpha0: float
    alphas: tuple[float, float, float]
    r_i: EulerAngles
    r_j: EulerAngles
    rp_i: EulerAngles
    rp_j: EulerAngles

    def matrix(self) -> np.ndarray:
        locals_in = np.kron(self.r_j.matrix(), self.r_i.matrix())
        locals_out = np.kron(self.rp_j.matrix(), self.rp_i.matrix())
        return np.exp(-1j * self.alpha0) * locals_out @ entangling_core(*self.alphas) @ locals_in


def entangling_core(a1: float, a2: float, a3: float) -> np.ndarray:
    """D = exp(-i*(a1 XX + a2 YY + a3 ZZ)), built from its magic-basis phases."""
    lam = np.array(
        [a1 - a2 + a3, -a1 + a2 + a3, -a1 - a2 - a3, a1 + a2 - a3]
    )
    return (MAGIC * np.exp(-1j * lam)) @ MAGIC.conj().T


def _perp(x: np.ndarray) -> np.ndarray:
    """Single-qubit state orthogonal to x with the fixed spin-flip gauge."""
    return np.array([-np.conj(x[1]), np.conj(x[0])])


def _pair_vec(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Product state |x>_i |y>_j in the bond basis."""
    return np.kron(y, x)


def _factor_product_state(mu: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Split a product state into single-qubit factors mu = a_i (x) b_j."""
    m = mu.reshape(2, 2)  # rows sigma_j, cols sigma_i
    u_f, sv, vh = np.linalg.svd(m)
    if sv[1] > 1e-7:
        raise DecompositionError(
            f"expected a product state, second Schmidt value {sv[1]:.3e}"
        )
    b = sv[0] * u_f[:, 0]
    a = vh[0, :]
    return a, b / np.linalg.norm(b)


def _entangled_basis_locals(
    psi: np.ndarray,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, bool]:
    """Local rotations mapping a real-in-magic-basis orthonormal basis onto
    the magic states.

    Returns (R_i, R_j, xi, psi_out, flipped3) with
    R_i R_j exp(i*xi_k) psi_out[:, k] = magic_k; psi_out differs from psi at
    most by the sign of column 3 (flipped3 reports that).
    """
    psi = psi.copy()
    mu = (psi[:, 0] + 1j * psi[:, 1]) / SQRT2
    nu = (psi[:, 0] - 1j * psi[:, 1]) / SQRT2
    a, b = _factor_product_state(mu)
    a_bar = _perp(a)
    b_bar = _perp(b)
    if max_abs(nu - _pair_vec(a_bar, b_bar)) > 1e-7:
        raise DecompositionError("conjugate product state does not match spin-flip gauge")

    p = np.vdot(_pair_vec(a, b_bar), psi[:, 2])
    if abs(abs(p) - 1 / SQRT2) > 1e-7:
        raise DecompositionError(f"unexpected weight {abs(p):.6f} in third basis state")
    delta = float(np.angle(p))

    s3 = np.vdot(_pair_vec(a_bar, b), psi[:, 3])
    target = -1j * np.exp(-1j * delta) / SQRT2
    flipped3 = bool(abs(s3 - target) > abs(s3 + target))
    if flipped3:
        psi[:, 3] = -psi[:, 3]

    e_id = np.exp(1j * delta)
    r_i = np.array([[np.conj(a[0]), np.conj(a[1])], [e_id * np.conj(a_bar[0]), e_id * np.conj(a_bar[1])]])
    e_mid = np.exp(-1j * delta)
    r_j = np.array([[np.conj(b[0]), np.conj(b[1])], [e_mid * np.conj(b_bar[0]), e_mid * np.conj(b_bar[1])]])

    locals4 = np.kron(r_j, r_i)
    xi = np.empty(4)
    for k in range(4):
        c = np.vdot(MAGIC[:, k], locals4 @ psi[:, k])
        if abs(abs(c) - 1.0) > 1e-7:
            raise DecompositionError(
                f"basis state {k} is not mapped onto a magic state (|c|={abs(c):.6f})"
            )
        xi[k] = -float(np.angle(c))
    return r_i, r_j, xi, psi, flipped3


# Coefficient matrix of the phase system alpha0 + lambda_k(alphas) = g_k.
_PHASE_SYSTEM = np.array(
    [
        [1.0, 1.0, -1.0, 1.0],
        [1.0, -1.0, 1.0, 1.0],
        [1.0, -1.0, -1.0, -1.0],
        [1.0, 1.0, 1.0, -1.0],
    ]
)
_PHASE_SYSTEM_INV = np.linalg.inv(_PHASE_SYSTEM)
_N_RANGE = range(-2, 3)
_PHASE_SHIFTS = np.array(
    [_PHASE_SYSTEM_INV @ (2 * math.pi * np.array(n)) for n in itertools.product(_N_RANGE, repeat=4)]
)


def _solve_phases(g: np.ndarray) -> np.ndarray:
    """Solve alpha0 + lambda_k = g_k + 2*pi*n_k for (alpha0, a1, a2, a3).

    n ranges over {-2..2}^4; among exact solutions the one with the smallest
    entangling angles (then smallest |alpha0|, then lexicographic n) wins.
    """
    base = _PHASE_SYSTEM_INV @ g
    candidates = base[None, :] + _PHASE_SHIFTS
    ok = np.all(np.abs(candidates[:, 1:]) <= math.pi + 1e-9, axis=1)
    ok &= np.abs(candidates[:, 0]) <= 2 * math.pi + 1e-9
    if not np.any(ok):
        raise DecompositionError("no phase branch found in the bounded integer search")
    idx = np.flatnonzero(ok)
    score = np.sum(np.abs(candidates[idx, 1:]), axis=1) + 1e-6 * np.abs(candidates[idx, 0])
    alpha = candidates[idx[np.argmin(score)]]
    residual = (_PHASE_SYSTEM @ alpha - g + math.pi) % (2 * math.pi) - math.pi
    if np.max(np.abs(residual)) > 1e-9:
        raise DecompositionError("phase equations violated after integer search")
    return alpha


def kak_decompose(u: np.ndarray) -> CanonicalForm:
    """Canonical-form decomposition of a 4x4 unitary."""
    u = np.asarray(u, dtype=complex)
    if u.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got shape {u.shape}")
    if unitarity_deviation(u) > 1e-10:
        raise ValueError("kak_decompose: matrix is not unitary within 1e-10")

    u_mb = magic_transform(u, "to")
    w = u_mb.T @ u_mb
    eig = unitary_symmetric_eig(w)
    eps = np.angle(eig.values) / 2.0
    psi = MAGIC @ eig.vectors.real

    r_i, r_j, xi, psi, _ = _entangled_basis_locals(psi)
    psi_p = (u @ psi) * np.exp(-1j * eps)[None, :]
    rp_i, rp_j, xi_p, psi_p, flipped3 = _entangled_basis_locals(psi_p)
    if flipped3:
        eps = eps.copy()
        eps[3] += math.pi

    alpha = _solve_phases(xi_p - xi - eps)
    # The extracted rotations map each basis onto the magic states; the
    # outgoing locals of the canonical form are the inverse of that map.
    form = CanonicalForm(
        alpha0=float(alpha[0]),
        alphas=(float(alpha[1]), float(alpha[2]), float(alpha[3])),
        r_i=euler_decompose(r_i),
        r_j=euler_decompose(r_j),
        rp_i=euler_decompose(rp_i.conj().T),
        rp_j=euler_decompose(rp_j.conj().T),
    )
    err = max_abs(form.matrix() - u)
    if err > 1e-9:
        raise DecompositionError(f"canonical form reconstruction error {err:.3e}")
    return form


@dataclass(frozen=True)
class GateParams:
    """The 15 rotation angles of the standard-gate realization of a block.

    Serializes as a plain JSON array of 15 doubles (radians) in sequence
    order theta_0..theta_14.
    """

    theta: tuple[float, ...]

    def __post_init__(self):
        if len(self.theta) != 15:
            raise ValueError(f"expected 15 angles, got {len(self.theta)}")
        if not all(math.isfinite(t) for t in self.theta):
            raise ValueError("angles must be finite")

    def to_json(self) -> str:
        return json.dumps([float(t) for t in self.theta])

    @classmethod
    def from_json(cls, text: str) -> "GateParams":
        return cls(theta=tuple(float(t) for t in json.loads(text)))


def to_gate_params(cf: CanonicalForm) -> GateParams:
    """Angles for the fixed elementary-gate sequence realizing the form.

    Global phases (alpha0 and the Euler theta0's) are dropped; the sequence
    reproduces the unitary up to one overall phase.
    """
    t = (
        cf.r_i.zyz()
        + cf.r_j.zyz()
        # The fixed sequence applies exp(+i*theta6 X), exp(-i*theta7 Z),
        # exp(+i*theta8 Z) inside the CNOT sandwich, realizing D(-theta6..8).
        + (-cf.alphas[0], -cf.alphas[1], -cf.alphas[2])
        + cf.rp_i.zyz()
        + cf.rp_j.zyz()
    )
    return GateParams(theta=tuple(float(x) for x in t))


def _on_i(m: np.ndarray) -> np.ndarray:
    return np.kron(I2, m)


def _on_j(m: np.ndarray) -> np.ndarray:
    return np.kron(m, I2)


def reconstruct_gate(params: GateParams) -> np.ndarray:
    """4x4 unitary of the standard 15-angle sequence (3 CNOTs, 8 rotations)."""
    t = params.theta
    u = _on_i(rz(t[2]) @ ry(t[1]) @ rz(t[0])) @ _on_j(rz(t[5]) @ ry(t[4]) @ rz(t[3]))
    u = CNOT @ u
    u = (_on_i(H_GATE @ rx(-2 * t[6])) @ _on_j(rz(-2 * t[8]))) @ u
    u = CNOT @ u
    u = (_on_i(H_GATE @ S_GATE) @ _on_j(rz(2 * t[7]))) @ u
    u = CNOT @ u
    u = (_on_i(rx(-math.pi / 2)) @ _on_j(rx(math.pi / 2))) @ u
    u = (_on_i(rz(t[11]) @ ry(t[10]) @ rz(t[9])) @ _on_j(rz(t[14]) @ ry(t[13]) @ rz(t[12]))) @ u
    return u


def gate_params_for(u: np.ndarray) -> GateParams:
    return to_gate_params(kak_decompose(u))


def phase_aligned_error(a: np.ndarray, b: np.ndarray) -> float:
    """max-abs distance between a and b after solving the best global phase."""
    t = np.trace(a.conj().T @ b)
    phase = t / abs(t) if abs(t) > 1e-300 else 1.0
    return max_abs(a * phase - b)


def _fold_quarter(x: float) -> float:
    """Fold an entangling angle to (-pi/4, pi/4] (pi/2 shifts are local)."""
    y = x % (math.pi / 2)
    return y - math.pi / 2 if y > math.pi / 4 + 1e-15 else y


_EVEN_FLIPS = ((1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1))


def canonical_interaction_angles(alphas: tuple[float, float, float]) -> tuple[float, float, float]:
    """Local-equivalence-class representative of the entangling angles.

    Orbit operations are axis permutations, paired sign flips, and pi/2
    shifts; the lexicographically largest folded triple is returned, which
    lands in the fundamental domain pi/4 >= a1 >= a2 >= |a3|. Use only for
    comparisons: reconstruction must go through the emitted CanonicalForm.
    """
    best: tuple[float, float, float] | None = None
    for perm in itertools.permutations(range(3)):
        for signs in _EVEN_FLIPS:
            cand = tuple(_fold_quarter(signs[k] * alphas[perm[k]]) for k in range(3))
            if best is None or cand > best:
                best = cand
    return best
