"""Named control-parameter presets, written as formulas of the qubit count.

heis: (M0, N, dM, Mmax) = (L, 20, L/2, L^2/2) - dense encoding budget.
xy:   (L, 20, L/2, L*(L-5)/2) - budget matched to the known minimal depth.
image:(L, 100, L/2, Mmax from caller) - amplitude-encoding runs.
"""
from __future__ import annotations


def _half(n_qubits: int) -> int:
    return max(1, n_qubits // 2)


def preset_quadruple(name: str, n_qubits: int) -> dict:
    """Returns m0/sweeps_n/delta_m and (where defined) m_max."""
    key = {"paper-heis": "heis", "paper-xy": "xy"}.get(name, name)
    if key == "heis":
        return {
            "m0": n_qubits,
            "sweeps_n": 20,
            "delta_m": _half(n_qubits),
            "m_max": n_qubits * n_qubits // 2,
        }
    if key == "xy":
        # the quadratic budget, floored at the L^2/4 representability point
        # so desk-scale sizes (L < 11) can reach it
        return {
            "m0": n_qubits,
            "sweeps_n": 20,
            "delta_m": _half(n_qubits),
            "m_max": max(n_qubits * n_qubits // 4, n_qubits * (n_qubits - 5) // 2),
        }
    if key == "image":
        return {"m0": n_qubits, "sweeps_n": 100, "delta_m": _half(n_qubits)}
    raise KeyError(f"unknown preset {name!r} (have: heis, xy, image)")
