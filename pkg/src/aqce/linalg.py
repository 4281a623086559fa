"""Dense complex linear algebra with fixed conventions.

SVD convention: a square matrix F factors as F = X @ diag(d) @ Y where both
X and Y are unitary and d is sorted descending. Y is the *plain* right
factor, i.e. Y equals V-dagger of the textbook F = X D V-dagger form. All
downstream code relies on F ~ X @ Y being the trace-maximizing unitary, so
the right factor is never conjugated here.

Eigendecompositions return eigenvalues in descending order with orthonormal
column eigenvectors.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Centralized tolerances.
RECONSTRUCTION_TOL = 1e-12
UNITARITY_TOL = 1e-12
HERMITICITY_TOL = 1e-10
# Eigenvalue clusters closer than this are treated as degenerate.
DEGENERACY_TOL = 1e-9


def max_abs(a: np.ndarray) -> float:
    """Largest absolute entry of an array (0.0 for empty input)."""
    return float(np.max(np.abs(a))) if a.size else 0.0


def _require_square(m: np.ndarray, what: str) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{what} requires a square matrix, got shape {m.shape}")
    return m


def _require_finite(m: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(m.view(float))):
        raise ValueError(f"{what} requires finite entries (found NaN/Inf)")


def unitarity_deviation(m: np.ndarray) -> float:
    """max-abs of (m-dagger m - I); 0 for a perfectly unitary matrix."""
    m = _require_square(m, "unitarity_deviation")
    return max_abs(m.conj().T @ m - np.eye(m.shape[0]))


def is_unitary(m: np.ndarray, tol: float = 1e-10) -> bool:
    return unitarity_deviation(m) <= tol


@dataclass(frozen=True)
class SVDResult:
    """F = left @ diag(singular) @ right with unitary left/right factors."""

    left: np.ndarray
    singular: np.ndarray
    right: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.left * self.singular) @ self.right


@dataclass(frozen=True)
class EigResult:
    """values[k] descending; vectors[:, k] the matching orthonormal eigenvector."""

    values: np.ndarray
    vectors: np.ndarray


def svd(m: np.ndarray) -> SVDResult:
    """Singular value decomposition in the F = X D Y convention.

    Deterministic for identical input (LAPACK is deterministic per build);
    degenerate singular subspaces may be rotated arbitrarily, which callers
    must not rely on beyond the X @ Y product contract.
    """
    m = _require_square(m, "svd")
    _require_finite(m, "svd")
    x, d, y = np.linalg.svd(m)
    return SVDResult(left=x, singular=d, right=y)


def hermitian_eig(m: np.ndarray) -> EigResult:
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending.

    The input is symmetrized internally; a deviation from Hermiticity beyond
    the module tolerance is rejected.
    """
    m = _require_square(m, "hermitian_eig")
    _require_finite(m, "hermitian_eig")
    if max_abs(m - m.conj().T) > HERMITICITY_TOL:
        raise ValueError("hermitian_eig: input is not Hermitian within tolerance")
    w, v = np.linalg.eigh((m + m.conj().T) / 2)
    return EigResult(values=w[::-1].copy(), vectors=v[:, ::-1].copy())


def unitary_symmetric_eig(m: np.ndarray) -> EigResult:
    """Eigendecomposition of a unitary complex-symmetric matrix with *real*
    orthonormal eigenvectors.

    For W unitary with W == W^T, the real and imaginary parts are commuting
    real symmetric matrices, so W admits a real orthonormal eigenbasis with
    unit-modulus eigenvalues. That basis is found by diagonalizing Re(W) and
    then splitting each near-degenerate block by Im(W); degenerate blocks of
    W itself keep an arbitrary (but orthonormal, real) basis.

    Eigenvalues are ordered by ascending phase angle in (-pi, pi].
    """
    m = _require_square(m, "unitary_symmetric_eig")
    _require_finite(m, "unitary_symmetric_eig")
    if unitarity_deviation(m) > 1e-10:
        raise ValueError("unitary_symmetric_eig: input is not unitary within 1e-10")
    if max_abs(m - m.T) > 1e-10:
        raise ValueError("unitary_symmetric_eig: input is not complex-symmetric")

    a = (m.real + m.real.T) / 2
    b = (m.imag + m.imag.T) / 2
    wa, va = np.linalg.eigh(a)

    vectors = np.empty_like(va)
    start = 0
    n = m.shape[0]
    while start < n:
        stop = start + 1
        while stop < n and abs(wa[stop] - wa[start]) <= DEGENERACY_TOL:
            stop += 1
        block = va[:, start:stop]
        if stop - start == 1:
            vectors[:, start:stop] = block
        else:
            _, u = np.linalg.eigh(block.T @ b @ block)
            vectors[:, start:stop] = block @ u
        start = stop

    values = np.einsum("ik,ij,jk->k", vectors, m, vectors)
    values /= np.abs(values)
    order = np.argsort(np.angle(values), kind="stable")
    return EigResult(values=values[order], vectors=vectors[:, order].astype(complex))
