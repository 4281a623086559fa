import math

import numpy as np
import pytest

from aqce import golden
from aqce.decompose import (
    CNOT,
    DecompositionError,
    GateParams,
    H_GATE,
    MAGIC,
    SWAP,
    canonical_interaction_angles,
    entangling_core,
    euler_decompose,
    gate_params_for,
    kak_decompose,
    magic_transform,
    phase_aligned_error,
    reconstruct_gate,
    ry,
    rz,
    to_gate_params,
    wrap_angle,
)
from aqce.linalg import max_abs, unitarity_deviation
from aqce.state import StateVector, apply_two_qubit, overlap, reduced_density_matrix

from conftest import haar_unitary


# --- Euler angles -------------------------------------------------------------

def test_euler_identity():
    e = euler_decompose(np.eye(2, dtype=complex))
    assert (e.theta0, e.theta1, e.theta2, e.theta3) == (0.0, 0.0, 0.0, 0.0)


def test_euler_pure_y_rotation():
    e = euler_decompose(ry(math.pi / 3))
    assert abs(e.theta2 - math.pi / 3) < 1e-14
    assert abs(e.theta0) < 1e-14 and abs(e.theta1) < 1e-14 and abs(e.theta3) < 1e-14


def test_euler_rejects_nonunitary():
    with pytest.raises(ValueError):
        euler_decompose(np.array([[1, 1], [0, 1]], dtype=complex))


def test_euler_roundtrip_haar_and_branches(rng):
    cases = []
    for _ in range(1000):
        cases.append(haar_unitary(2, rng))
    # exercise the diagonal and antidiagonal branches explicitly
    for phase in (0.3, -1.2, math.pi):
        cases.append(np.diag([np.exp(1j * phase), np.exp(-0.7j)]))
        cases.append(np.array([[0, np.exp(1j * phase)], [np.exp(0.4j), 0]], dtype=complex))
    cases.append(-np.eye(2, dtype=complex))
    for v in cases:
        e = euler_decompose(v)
        assert max_abs(e.matrix() - v) < 1e-12
        assert -math.pi < e.theta1 <= math.pi
        assert -math.pi < e.theta3 <= math.pi
        assert 0 <= e.theta2 <= math.pi
        assert -2 * math.pi < e.theta0 <= 2 * math.pi


def test_wrap_angle_ties_to_positive_pi():
    assert wrap_angle(math.pi) == math.pi
    assert wrap_angle(-math.pi) == math.pi
    assert abs(wrap_angle(3 * math.pi / 2) + math.pi / 2) < 1e-15


# --- magic basis ---------------------------------------------------------------

def test_magic_matrix_is_unitary():
    assert unitarity_deviation(MAGIC) < 1e-15


def test_magic_first_column_is_plus_bell():
    bell = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
    assert max_abs(MAGIC[:, 0] - bell) < 1e-15


def test_magic_to_from_inverse(rng):
    u = haar_unitary(4, rng)
    assert max_abs(magic_transform(magic_transform(u, "to"), "from") - u) < 1e-14
    with pytest.raises(ValueError):
        magic_transform(u, "sideways")


def test_real_magic_columns_are_maximally_entangled(rng):
    """M @ O for real orthogonal O has columns with maximally mixed marginals."""
    o = np.linalg.qr(rng.standard_normal((4, 4)))[0]
    cols = MAGIC @ o
    for k in range(4):
        rho4 = reduced_density_matrix(StateVector(cols[:, k].copy()), (0, 1))
        # single-qubit marginals; indices [sj', si', sj, si]
        r = rho4.reshape(2, 2, 2, 2)
        rho_i = np.einsum("abad->bd", r)
        rho_j = np.einsum("abcb->ac", r)
        assert max_abs(rho_i - np.eye(2) / 2) < 1e-10
        assert max_abs(rho_j - np.eye(2) / 2) < 1e-10


def test_product_state_magic_coefficient_identity(rng):
    """sum mu_k^2 = 0 exactly for product states, nonzero for Bell states."""
    a = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    b = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    a, b = a / np.linalg.norm(a), b / np.linalg.norm(b)
    product = np.kron(b, a)
    mu = MAGIC.conj().T @ product
    assert abs(np.sum(mu**2)) < 1e-10
    bell = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
    mu_bell = MAGIC.conj().T @ bell
    assert abs(np.sum(mu_bell**2)) > 0.9


# --- canonical form -------------------------------------------------------------

def test_kak_identity():
    cf = kak_decompose(np.eye(4, dtype=complex))
    assert max_abs(cf.matrix() - np.eye(4)) < 1e-12
    assert np.allclose(canonical_interaction_angles(cf.alphas), (0, 0, 0), atol=1e-12)


def _w_spectrum_invariant(u: np.ndarray) -> np.ndarray:
    """Phase-free local invariant: sorted pairwise products l_k conj(l_l) of
    the eigenvalues of W = U^T U in the magic frame."""
    umb = magic_transform(u, "to")
    lam = np.linalg.eigvals(umb.T @ umb)
    prods = np.array([a * np.conj(b) for a in lam for b in lam])
    order = np.lexsort((prods.real, np.round(np.angle(prods), 9)))
    return prods[order]


def test_kak_cnot_class():
    cf = kak_decompose(CNOT)
    assert max_abs(cf.matrix() - CNOT) < 1e-10
    assert np.allclose(canonical_interaction_angles(cf.alphas), (math.pi / 4, 0, 0), atol=1e-10)
    # the W spectrum (up to a global phase) matches the bare entangler's
    ref = _w_spectrum_invariant(entangling_core(math.pi / 4, 0, 0))
    assert np.allclose(_w_spectrum_invariant(CNOT), ref, atol=1e-9)


def test_kak_swap_class():
    cf = kak_decompose(SWAP)
    assert max_abs(cf.matrix() - SWAP) < 1e-10
    assert np.allclose(
        canonical_interaction_angles(cf.alphas), (math.pi / 4, math.pi / 4, math.pi / 4), atol=1e-10
    )


def test_kak_rejects_nonunitary():
    with pytest.raises(ValueError):
        kak_decompose(np.ones((4, 4), dtype=complex))


def test_kak_haar_roundtrip(rng):
    worst = 0.0
    for _ in range(300):
        u = haar_unitary(4, rng)
        cf = kak_decompose(u)
        worst = max(worst, max_abs(cf.matrix() - u))
    assert worst < 1e-10


def test_kak_local_invariance(rng):
    for _ in range(25):
        u = haar_unitary(4, rng)
        base = canonical_interaction_angles(kak_decompose(u).alphas)
        dressed = (
            np.kron(haar_unitary(2, rng), haar_unitary(2, rng))
            @ u
            @ np.kron(haar_unitary(2, rng), haar_unitary(2, rng))
        )
        other = canonical_interaction_angles(kak_decompose(dressed).alphas)
        assert np.max(np.abs(np.array(base) - np.array(other))) < 1e-8


def test_kak_entangler_special_points(rng):
    """Direct entangler matrices (degenerate W spectra) still decompose."""
    for alphas in [(0.3, 0.3, 0.3), (math.pi / 4, math.pi / 4, 0), (0.5, 0, 0), (0, 0, 0.9)]:
        d = entangling_core(*alphas)
        cf = kak_decompose(d)
        assert max_abs(cf.matrix() - d) < 1e-9


# --- gate sequence ---------------------------------------------------------------

def test_gate_params_all_zero_is_fixed_unitary():
    params = GateParams(theta=(0.0,) * 15)
    u = reconstruct_gate(params)
    assert unitarity_deviation(u) < 1e-12
    again = reconstruct_gate(to_gate_params(kak_decompose(u)))
    assert phase_aligned_error(again, u) < 1e-9


def test_gate_params_validation():
    with pytest.raises(ValueError):
        GateParams(theta=(0.0,) * 14)
    with pytest.raises(ValueError):
        GateParams(theta=(0.0,) * 14 + (math.nan,))


def test_gate_sequence_roundtrip_haar(rng):
    worst = 0.0
    for _ in range(300):
        u = haar_unitary(4, rng)
        rebuilt = reconstruct_gate(gate_params_for(u))
        worst = max(worst, phase_aligned_error(rebuilt, u))
    assert worst < 1e-9


def test_random_params_unitary_and_roundtrip(rng):
    for _ in range(30):
        params = GateParams(theta=tuple(rng.uniform(-math.pi, math.pi, 15)))
        u = reconstruct_gate(params)
        assert unitarity_deviation(u) < 1e-12
        rebuilt = reconstruct_gate(to_gate_params(kak_decompose(u)))
        assert phase_aligned_error(rebuilt, u) < 1e-9


# --- published golden parameter sets ----------------------------------------------

def _state_from_blocks(blocks, n_qubits: int) -> StateVector:
    state = StateVector.zero(n_qubits)
    for bond, theta in blocks:
        u = reconstruct_gate(GateParams(theta=theta))
        state = apply_two_qubit(state, u, bond)
    return state


def test_golden_singlet_params():
    out = _state_from_blocks((((0, 1), golden.SINGLET_PARAMS),), 2)
    ov = abs(overlap(StateVector(golden.SINGLET_STATE), out))
    assert ov > 1 - golden.GOLDEN_OVERLAP_TOL


def test_golden_random2q_params():
    target = StateVector(golden.RANDOM2Q_STATE / np.linalg.norm(golden.RANDOM2Q_STATE))
    out = _state_from_blocks((((0, 1), golden.RANDOM2Q_PARAMS),), 2)
    assert abs(overlap(target, out)) > 1 - golden.GOLDEN_OVERLAP_TOL


def test_golden_ghz_params():
    out = _state_from_blocks(golden.GHZ_BLOCKS, 3)
    assert abs(overlap(StateVector(golden.GHZ_STATE), out)) > 1 - golden.GOLDEN_OVERLAP_TOL


def test_golden_random3q_params():
    target = StateVector(golden.RANDOM3Q_STATE / np.linalg.norm(golden.RANDOM3Q_STATE))
    out = _state_from_blocks(golden.RANDOM3Q_BLOCKS, 3)
    assert abs(overlap(target, out)) > 1 - golden.GOLDEN_OVERLAP_TOL


def test_golden_detects_perturbation():
    wrong = tuple(t + 1e-2 for t in golden.SINGLET_PARAMS)
    out = _state_from_blocks((((0, 1), wrong),), 2)
    assert abs(overlap(StateVector(golden.SINGLET_STATE), out)) < 1 - golden.GOLDEN_OVERLAP_TOL


def test_gate_params_json_roundtrip(rng):
    params = gate_params_for(haar_unitary(4, rng))
    text = params.to_json()
    back = GateParams.from_json(text)
    assert back.theta == params.theta
    import json as _json

    assert len(_json.loads(text)) == 15
