"""Periodic XXZ spin chains and Lanczos ground states.

H = sum_{i=0}^{L-1} (X_i X_{i+1} + Y_i Y_{i+1} + delta * Z_i Z_{i+1}) with
site L identified with site 0. Note that for L = 2 the single physical bond
is summed twice, matching the periodic sum as written.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .state import PAULIS, StateVector


class ConvergenceError(RuntimeError):
    """Lanczos failed to converge; `.best` carries the last iterate."""

    def __init__(self, message: str, best: "GroundStateResult"):
        super().__init__(message)
        self.best = best


@dataclass(frozen=True)
class XXZModel:
    n_sites: int
    delta: float

    def __post_init__(self):
        if self.n_sites < 2:
            raise ValueError("XXZ chain needs at least 2 sites")

    def bonds(self) -> list[tuple[int, int]]:
        return [(i, (i + 1) % self.n_sites) for i in range(self.n_sites)]

    def bond_operator(self) -> np.ndarray:
        xx = np.kron(PAULIS[1], PAULIS[1])
        yy = np.kron(PAULIS[2], PAULIS[2])
        zz = np.kron(PAULIS[3], PAULIS[3])
        return xx + yy + self.delta * zz


@dataclass(frozen=True)
class GroundStateResult:
    energy: float
    state: StateVector
    iterations: int
    residual: float


def apply_hamiltonian(model: XXZModel, state: StateVector) -> StateVector:
    """H|state>, unnormalized."""
    if state.n_qubits != model.n_sites:
        raise ValueError(f"state has {state.n_qubits} qubits, model has {model.n_sites} sites")
    hb = model.bond_operator()
    out = np.zeros_like(state.amps)
    for i, j in model.bonds():
        out += kernels.apply_matrix4(state.amps, hb, i, j, model.n_sites)
    return StateVector(out, copy=False)


def _matvec(model: XXZModel, amps: np.ndarray) -> np.ndarray:
    hb = model.bond_operator()
    out = np.zeros_like(amps)
    for i, j in model.bonds():
        out += kernels.apply_matrix4(amps, hb, i, j, model.n_sites)
    return out


def lanczos_ground_state(
    model: XXZModel,
    tol: float = 1e-12,
    seed: int = 1,
    max_iter: int = 5000,
    krylov_dim: int = 40,
) -> GroundStateResult:
    """Ground state by restarted Lanczos with full reorthogonalization.

    Each restart grows a Krylov basis (reorthogonalized against every stored
    vector), takes the lowest Ritz pair, and restarts from it; convergence is
    declared when the energy moves by less than `tol` between restarts. The
    starting vector is seeded, so different seeds realize independent runs
    landing on (possibly different members of) the ground space.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    dim = 2**model.n_sites
    rng = np.random.default_rng(seed)
    v = rng.uniform(-1, 1, dim) + 1j * rng.uniform(-1, 1, dim)
    v /= np.linalg.norm(v)

    k_max = min(krylov_dim, dim)
    energy_prev = np.inf
    matvecs = 0
    best: GroundStateResult | None = None

    while matvecs < max_iter:
        basis = [v]
        alphas: list[float] = []
        betas: list[float] = []
        w = _matvec(model, v)
        matvecs += 1
        for k in range(k_max):
            alpha = float(np.real(np.vdot(basis[k], w)))
            alphas.append(alpha)
            w = w - alpha * basis[k]
            if k > 0:
                w = w - betas[-1] * basis[k - 1]
            # Full reorthogonalization; cheap at these dimensions.
            for b in basis:
                w = w - np.vdot(b, w) * b
            beta = float(np.linalg.norm(w))
            if beta < 1e-14 or k == k_max - 1 or matvecs >= max_iter:
                break
            betas.append(beta)
            v_next = w / beta
            basis.append(v_next)
            w = _matvec(model, v_next)
            matvecs += 1

        t = np.diag(alphas) + np.diag(betas[: len(alphas) - 1], 1) + np.diag(betas[: len(alphas) - 1], -1)
        evals, evecs = np.linalg.eigh(t)
        theta = float(evals[0])
        y = evecs[:, 0]
        v = np.zeros(dim, dtype=complex)
        for c, b in zip(y, basis):
            v += c * b
        v /= np.linalg.norm(v)

        hv = _matvec(model, v)
        matvecs += 1
        energy = float(np.real(np.vdot(v, hv)))
        residual = float(np.linalg.norm(hv - energy * v))
        best = GroundStateResult(
            energy=energy, state=StateVector(v, copy=True), iterations=matvecs, residual=residual
        )
        if abs(energy - energy_prev) < tol:
            return best
        energy_prev = energy

    raise ConvergenceError(
        f"Lanczos did not converge to {tol} within {max_iter} matvecs", best=best
    )
