"""Circuit data model: ordered two-qubit blocks, bond sets, fixed layouts,
evaluation, and JSON/OpenQASM export.

A circuit applies its blocks to |0...0> in ascending position, so blocks[0]
acts first. Enlargement inserts at the front (next to |0>), which is why
positions are reported 1-based in traces.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import decompose
from .linalg import unitarity_deviation
from .state import StateVector, apply_two_qubit, overlap


@dataclass
class UnitaryBlock:
    bond: tuple[int, int]
    matrix: np.ndarray

    def __post_init__(self):
        self.bond = (int(self.bond[0]), int(self.bond[1]))
        self.matrix = np.asarray(self.matrix, dtype=complex)
        if self.bond[0] == self.bond[1]:
            raise ValueError(f"block bond must join two distinct qubits, got {self.bond}")
        if self.matrix.shape != (4, 4):
            raise ValueError(f"block matrix must be 4x4, got {self.matrix.shape}")
        if unitarity_deviation(self.matrix) > 1e-10:
            raise ValueError("block matrix is not unitary within 1e-10")


@dataclass
class Circuit:
    n_qubits: int
    blocks: list[UnitaryBlock] = field(default_factory=list)

    def __post_init__(self):
        for b in self.blocks:
            self._check_block(b)

    def _check_block(self, block: UnitaryBlock) -> None:
        i, j = block.bond
        if not (0 <= i < self.n_qubits and 0 <= j < self.n_qubits):
            raise ValueError(f"block bond {block.bond} out of range for {self.n_qubits} qubits")

    @property
    def n_blocks(self) -> int:
        return len(self.blocks)

    def copy(self) -> "Circuit":
        return Circuit(
            self.n_qubits,
            [UnitaryBlock(b.bond, b.matrix.copy()) for b in self.blocks],
        )


def evaluate(circuit: Circuit) -> StateVector:
    """Apply the circuit to |0...0>."""
    state = StateVector.zero(circuit.n_qubits)
    for block in circuit.blocks:
        state = apply_two_qubit(state, block.matrix, block.bond)
    return state


def circuit_fidelity(circuit: Circuit, target: StateVector) -> complex:
    """<0| C-adjoint |target>, i.e. the overlap of C|0> with the target."""
    if target.n_qubits != circuit.n_qubits:
        raise ValueError("circuit and target qubit counts differ")
    return overlap(evaluate(circuit), target)


# --- bond sets ------------------------------------------------------------

BondSet = tuple[tuple[int, int], ...]


def _validate_bonds(bonds: list[tuple[int, int]], n_qubits: int | None) -> BondSet:
    seen = set()
    out = []
    for bond in bonds:
        i, j = int(bond[0]), int(bond[1])
        if i == j:
            raise ValueError(f"bond {bond} joins a qubit to itself")
        if i < 0 or j < 0 or (n_qubits is not None and max(i, j) >= n_qubits):
            raise ValueError(f"bond {bond} out of range")
        key = (min(i, j), max(i, j))
        if key in seen:
            raise ValueError(f"duplicate bond {key}")
        seen.add(key)
        out.append(key)
    if not out:
        raise ValueError("bond set is empty")
    return tuple(out)


def all_pairs_bonds(n_qubits: int) -> BondSet:
    if n_qubits < 2:
        raise ValueError("need at least 2 qubits")
    return tuple((i, j) for i in range(n_qubits) for j in range(i + 1, n_qubits))


def chain_bonds(n_qubits: int, periodic: bool = True) -> BondSet:
    if n_qubits < 2:
        raise ValueError("need at least 2 qubits")
    bonds = [(i, i + 1) for i in range(n_qubits - 1)]
    if periodic and n_qubits > 2:
        bonds.append((0, n_qubits - 1))
    return tuple(bonds)


def explicit_bonds(bonds: list[tuple[int, int]], n_qubits: int | None = None) -> BondSet:
    return _validate_bonds(bonds, n_qubits)


# --- fixed circuit layouts ------------------------------------------------

def _identity_block(bond: tuple[int, int]) -> UnitaryBlock:
    return UnitaryBlock(bond, np.eye(4, dtype=complex))


def trotter_structure(n_qubits: int, depth: int) -> Circuit:
    """Brickwork layers on a ring: even pairs then odd pairs, `depth` times.

    Block count is depth * n_qubits.
    """
    if n_qubits % 2 or n_qubits < 2:
        raise ValueError("trotter layout needs an even qubit count")
    if depth < 0:
        raise ValueError("depth must be non-negative")
    blocks = []
    for _ in range(depth):
        for i in range(0, n_qubits, 2):
            blocks.append(_identity_block((i, i + 1)))
        for i in range(1, n_qubits, 2):
            blocks.append(_identity_block((i, (i + 1) % n_qubits)))
    return Circuit(n_qubits, blocks)


def mera_structure(n_qubits: int, depth: int) -> Circuit:
    """Scale-layered layout: one top block, then ring layers at doubling
    strides down to nearest neighbors, each scale repeated `depth` times.

    At stride s the active sites are 0, s, 2s, ... and one layer is a
    brickwork step on that sub-ring (L/s blocks), so the block count is
    depth * (2*n_qubits - 4) + 1. Applied to |0...0>, the top block acts
    first and the nearest-neighbor layers act last.
    """
    if n_qubits < 4 or n_qubits & (n_qubits - 1):
        raise ValueError("mera layout needs a power-of-two qubit count >= 4")
    if depth < 1:
        raise ValueError("depth must be at least 1")
    blocks = [_identity_block((0, n_qubits // 2))]
    stride = n_qubits // 4
    while stride >= 1:
        sites = list(range(0, n_qubits, stride))
        n_sites = len(sites)
        layer = []
        for k in range(0, n_sites, 2):
            layer.append(_identity_block((sites[k], sites[k + 1])))
        for k in range(1, n_sites, 2):
            layer.append(_identity_block((sites[k], sites[(k + 1) % n_sites])))
        for _ in range(depth):
            blocks.extend(_identity_block(b.bond) for b in layer)
        stride //= 2
    return Circuit(n_qubits, blocks)


def count_parameters(circuit: Circuit) -> int:
    """Independent real angles after merging adjacent single-qubit rotations:
    9 per block plus 3 per qubit."""
    return 9 * circuit.n_blocks + 3 * circuit.n_qubits


# --- serialization ----------------------------------------------------------

def circuit_to_json_dict(circuit: Circuit) -> dict:
    blocks = []
    for m, b in enumerate(circuit.blocks, start=1):
        flat = []
        for entry in b.matrix.reshape(-1):
            flat.extend((float(entry.real), float(entry.imag)))
        blocks.append({"m": m, "bond": list(b.bond), "matrix": flat})
    return {"version": 1, "L": circuit.n_qubits, "blocks": blocks}


def export_json(circuit: Circuit, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(circuit_to_json_dict(circuit), fh)
        fh.write("\n")


def circuit_from_json_dict(data: dict) -> Circuit:
    if data.get("version") != 1:
        raise ValueError(f"unsupported circuit schema version {data.get('version')!r}")
    blocks = []
    for entry in sorted(data["blocks"], key=lambda e: e["m"]):
        flat = np.asarray(entry["matrix"], dtype=float)
        if flat.size != 32:
            raise ValueError("block matrix must carry 32 doubles (re/im row-major)")
        matrix = (flat[0::2] + 1j * flat[1::2]).reshape(4, 4)
        blocks.append(UnitaryBlock(tuple(entry["bond"]), matrix))
    return Circuit(int(data["L"]), blocks)


def import_json(path: str) -> Circuit:
    with open(path) as fh:
        return circuit_from_json_dict(json.load(fh))


def _qasm_u3(angles: tuple[float, float, float], qubit: int) -> str:
    theta1, theta2, theta3 = angles
    return f"u3({theta2!r},{theta3!r},{theta1!r}) q[{qubit}];"


def qasm_lines(circuit: Circuit) -> list[str]:
    """OpenQASM 2.0 with one u3 per merged single-qubit rotation and three cx
    per block. Global phases cannot be expressed in QASM 2.0 and are dropped.
    """
    lines = [
        "OPENQASM 2.0;",
        'include "qelib1.inc";',
        f"qreg q[{circuit.n_qubits}];",
    ]
    for m, block in enumerate(circuit.blocks, start=1):
        try:
            cf = decompose.kak_decompose(block.matrix)
        except decompose.DecompositionError as exc:
            raise RuntimeError(f"block {m} failed to decompose: {exc}") from exc
        t = decompose.to_gate_params(cf).theta
        i, j = block.bond
        lines.append(f"// block {m} on ({i},{j})")
        lines.append(_qasm_u3(t[0:3], i))
        lines.append(_qasm_u3(t[3:6], j))
        lines.append(f"cx q[{i}],q[{j}];")
        mid_i = decompose.euler_decompose(decompose.H_GATE @ decompose.rx(-2 * t[6]))
        lines.append(_qasm_u3(mid_i.zyz(), i))
        lines.append(_qasm_u3((-2 * t[8], 0.0, 0.0), j))
        lines.append(f"cx q[{i}],q[{j}];")
        hs = decompose.euler_decompose(decompose.H_GATE @ decompose.S_GATE)
        lines.append(_qasm_u3(hs.zyz(), i))
        lines.append(_qasm_u3((2 * t[7], 0.0, 0.0), j))
        lines.append(f"cx q[{i}],q[{j}];")
        out_i = decompose.euler_decompose(
            decompose.rz(t[11]) @ decompose.ry(t[10]) @ decompose.rz(t[9]) @ decompose.rx(-math.pi / 2)
        )
        out_j = decompose.euler_decompose(
            decompose.rz(t[14]) @ decompose.ry(t[13]) @ decompose.rz(t[12]) @ decompose.rx(math.pi / 2)
        )
        lines.append(_qasm_u3(out_i.zyz(), i))
        lines.append(_qasm_u3(out_j.zyz(), j))
    return lines


def export_qasm(circuit: Circuit, path: str) -> None:
    with open(path, "w") as fh:
        fh.write("\n".join(qasm_lines(circuit)) + "\n")
