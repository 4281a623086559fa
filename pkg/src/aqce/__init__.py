"""Automatic quantum circuit encoding of arbitrary target states.

Builds circuits of two-qubit unitary blocks that maximize the overlap with
a target statevector via singular-value-decomposition block updates, turns
each block into elementary gates through the magic-basis canonical form,
and ships spin-chain and classical-image encoding pipelines on top.
"""

__version__ = "0.1.0"

from .amplitude import (
    ClassicalVector,
    ImageGrid,
    amplitude_decode,
    amplitude_encode,
    assemble_image,
    encode_image_pipeline,
    segment_image,
)
from .circuit import (
    Circuit,
    UnitaryBlock,
    all_pairs_bonds,
    chain_bonds,
    circuit_fidelity,
    count_parameters,
    evaluate,
    explicit_bonds,
    export_json,
    export_qasm,
    import_json,
    mera_structure,
    trotter_structure,
)
from .decompose import (
    CanonicalForm,
    EulerAngles,
    GateParams,
    euler_decompose,
    gate_params_for,
    kak_decompose,
    magic_transform,
    reconstruct_gate,
    to_gate_params,
)
from .engine import (
    EncodeConfig,
    EncodeTrace,
    encode,
    encode_fixed,
    encode_with_restarts,
    enlarge,
    initialize_circuit,
    optimal_unitary,
    sweep,
    update_block,
)
from .hamiltonian import XXZModel, apply_hamiltonian, lanczos_ground_state
from .state import (
    StateVector,
    apply_two_qubit,
    fidelity_tensor,
    fidelity_tensor_via_pauli,
    load_qsv,
    overlap,
    pauli_overlap,
    q_fidelity,
    reduced_density_matrix,
    save_qsv,
)

__all__ = [name for name in dir() if not name.startswith("_")]
