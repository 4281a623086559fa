"""Compare the compiled statevector kernels against the numpy fallback.

Usage: python benchmarks/bench_kernels.py [max_qubits]

Times the two hot operations of the sweep optimizer (two-qubit gate
application and fidelity-tensor contraction) on both backends, plus one
end-to-end fixed-structure encode. The fallback is loaded directly from
aqce._kernels_py, so one process measures both.
"""
import sys
import time

import numpy as np

from aqce import _kernels_py, kernels


def _time(fn, *args, repeat: int = 0) -> float:
    if not repeat:
        # calibrate to ~50ms
        t0 = time.perf_counter()
        fn(*args)
        once = time.perf_counter() - t0
        repeat = max(3, int(0.05 / max(once, 1e-7)))
    t0 = time.perf_counter()
    for _ in range(repeat):
        fn(*args)
    return (time.perf_counter() - t0) / repeat


def bench_kernels(max_qubits: int) -> None:
    rng = np.random.default_rng(7)
    if kernels.BACKEND != "compiled":
        print("note: compiled backend unavailable; timing fallback against itself")
    print(f"{'L':>3} {'op':<16} {'compiled (us)':>14} {'numpy (us)':>12} {'speedup':>8}")
    for n_qubits in range(6, max_qubits + 1, 2):
        amps = rng.standard_normal(2**n_qubits) + 1j * rng.standard_normal(2**n_qubits)
        amps /= np.linalg.norm(amps)
        other = rng.permutation(amps)
        u = np.linalg.qr(rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)))[0]
        i, j = 1, n_qubits - 2
        for name, fast, slow, args in (
            ("apply_matrix4", kernels.apply_matrix4, _kernels_py.apply_matrix4, (u, i, j, n_qubits)),
            ("fidelity_tensor4", kernels.fidelity_tensor4, _kernels_py.fidelity_tensor4, (other, i, j, n_qubits)),
        ):
            t_fast = _time(fast, amps, *args) * 1e6
            t_slow = _time(slow, amps, *args) * 1e6
            print(f"{n_qubits:>3} {name:<16} {t_fast:>14.2f} {t_slow:>12.2f} {t_slow / t_fast:>7.1f}x")


def bench_encode() -> None:
    from aqce.circuit import trotter_structure
    from aqce.engine import encode_fixed
    from aqce.hamiltonian import XXZModel, lanczos_ground_state

    target = lanczos_ground_state(XXZModel(8, 0.0), seed=5).state
    t0 = time.perf_counter()
    _, trace = encode_fixed(target, trotter_structure(8, 2), 100)
    dt = time.perf_counter() - t0
    print(f"\nencode_fixed XY L=8, M=16, 100 sweeps [{kernels.BACKEND}]: "
          f"{dt:.2f}s, 1-|F| = {1 - trace.final_fidelity():.2e}")


if __name__ == "__main__":
    limit = int(sys.argv[1]) if len(sys.argv) > 1 else 16
    bench_kernels(limit)
    bench_encode()
