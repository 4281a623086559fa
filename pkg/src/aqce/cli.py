"""Command-line frontend.

Subcommands: encode-state (ground states or statevector files -> circuit),
encode-image (PGM -> per-segment circuits + reconstruction), decompose
(single 4x4 unitary -> angle table), verify (golden-vector suite).

Exit codes: 0 ok, 1 usage/input error, 2 runtime failure, 3 verification
failure. Every run writes a manifest next to its outputs; all outputs except
wall-clock columns are deterministic for a fixed --seed.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

from . import __version__, amplitude, circuit as circuit_mod, decompose, engine, golden
from .hamiltonian import ConvergenceError, XXZModel, lanczos_ground_state
from .presets import preset_quadruple
from .state import StateVector, apply_two_qubit, load_qsv, overlap

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RUNTIME = 2
EXIT_VERIFY = 3


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_USAGE):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        raise SystemExit(self._exit_with(message))

    @staticmethod
    def _exit_with(message: str) -> int:
        print(f"error: {message}", file=sys.stderr)
        return EXIT_USAGE


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="aqce", description="encode quantum states into two-qubit-gate circuits")
    sub = p.add_subparsers(dest="command", required=True)

    enc = sub.add_parser("encode-state", help="encode a spin-chain ground state or a statevector file")
    enc.add_argument("--model", choices=["heisenberg", "xy", "xxz"])
    enc.add_argument("--delta", type=float, help="anisotropy for --model xxz")
    enc.add_argument("--L", type=int, help="qubit count for model targets")
    enc.add_argument("--target-file", help="QSV statevector file as the target")
    enc.add_argument("--bonds", default="all", help="all | chain | chain-open | file:PATH")
    enc.add_argument("--M0", type=int)
    enc.add_argument("--Mmax", type=int)
    enc.add_argument("--dM", type=int)
    enc.add_argument("--sweeps", type=int)
    enc.add_argument("--final-sweeps", type=int, default=0)
    enc.add_argument("--restarts", type=int, default=1)
    enc.add_argument("--seed", type=int, default=1)
    enc.add_argument("--preset", help="heis | xy | image (formulas of L)")
    enc.add_argument("--structure", default="auto", help="auto | trotter:D | mera:D")
    enc.add_argument("--fidelity-stop", type=float)
    enc.add_argument("--threads", type=int, default=0)
    enc.add_argument("--out", default=".")

    img = sub.add_parser("encode-image", help="amplitude-encode a PGM image")
    img.add_argument("image", help="input PGM (P2 or P5)")
    img.add_argument("--segments", default="1x1", help="RxC tiling, e.g. 2x2")
    img.add_argument("--M0", type=int)
    img.add_argument("--Mmax", type=int, required=True)
    img.add_argument("--dM", type=int)
    img.add_argument("--sweeps", type=int)
    img.add_argument("--final-sweeps", type=int, default=0)
    img.add_argument("--restarts", type=int, default=1)
    img.add_argument("--seed", type=int, default=1)
    img.add_argument("--preset", default="image")
    img.add_argument("--threads", type=int, default=0)
    img.add_argument("--out", default=".")

    dec = sub.add_parser("decompose", help="decompose one 4x4 unitary into the 15-angle table")
    dec.add_argument("--in", dest="infile", help="JSON file with 32 doubles (re/im row-major)")
    dec.add_argument("--builtin", choices=["identity", "cnot", "swap"])
    dec.add_argument("--check", action="store_true", help="fail unless reconstruction error < 1e-10")
    dec.add_argument("--qasm", action="store_true", help="also print an OpenQASM snippet")
    dec.add_argument("--seed", type=int, default=1)

    ver = sub.add_parser("verify", help="run the golden-vector verification suite")
    ver.add_argument("--only", help="run only checks whose name contains this substring")
    ver.add_argument("--seed", type=int, default=1)
    return p


# --- helpers ---------------------------------------------------------------

def _resolve_bonds(spec: str, n_qubits: int):
    if spec == "all":
        return circuit_mod.all_pairs_bonds(n_qubits)
    if spec == "chain":
        return circuit_mod.chain_bonds(n_qubits, periodic=True)
    if spec == "chain-open":
        return circuit_mod.chain_bonds(n_qubits, periodic=False)
    if spec.startswith("file:"):
        path = spec[len("file:"):]
        try:
            with open(path) as fh:
                pairs = json.load(fh)
        except OSError as exc:
            raise CliError(f"cannot read bond file: {exc}")
        return circuit_mod.explicit_bonds([tuple(b) for b in pairs], n_qubits)
    raise CliError(f"unknown bond set {spec!r}")


def _write_manifest(out_dir: str, command: str, args: dict, seeds: list[int], outputs: list[str], wall_s: float) -> str:
    path = os.path.join(out_dir, "manifest.json")
    manifest = {
        "command": command,
        "config": args,
        "seeds": seeds,
        "outputs": sorted(outputs),
        "version": __version__,
        "wall_time_s": round(wall_s, 3),
    }
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def _fidelity_per_site(abs_f: float, n_qubits: int) -> float:
    return abs_f ** (1.0 / n_qubits)


def _config_from_args(args, n_qubits: int, bond_set) -> engine.EncodeConfig:
    params: dict = {}
    if args.preset:
        try:
            params.update(preset_quadruple(args.preset, n_qubits))
        except KeyError as exc:
            raise CliError(str(exc))
    if args.M0 is not None:
        params["m0"] = args.M0
    if args.dM is not None:
        params["delta_m"] = args.dM
    if args.sweeps is not None:
        params["sweeps_n"] = args.sweeps
    if args.Mmax is not None:
        params["m_max"] = args.Mmax
    params.setdefault("m0", min(n_qubits, params.get("m_max", n_qubits)))
    params.setdefault("sweeps_n", 20)
    params.setdefault("delta_m", max(1, n_qubits // 2))
    params.setdefault("m_max", params["m0"])
    params["m0"] = min(params["m0"], params["m_max"])
    try:
        return engine.EncodeConfig(
            bond_set=bond_set,
            restarts=args.restarts,
            seed=args.seed,
            fidelity_stop=getattr(args, "fidelity_stop", None),
            final_sweeps=args.final_sweeps,
            **params,
        )
    except ValueError as exc:
        raise CliError(str(exc))


# --- encode-state ------------------------------------------------------------

def cmd_encode_state(args) -> int:
    t_start = time.perf_counter()
    if (args.model is None) == (args.target_file is None):
        raise CliError("need exactly one of --model or --target-file")

    if args.model:
        if args.L is None:
            raise CliError("--model requires --L")
        delta = {"heisenberg": 1.0, "xy": 0.0}.get(args.model, args.delta)
        if delta is None:
            raise CliError("--model xxz requires --delta")
        model = XXZModel(args.L, delta)

        def target_factory(seed: int) -> StateVector:
            try:
                return lanczos_ground_state(model, seed=seed).state
            except ConvergenceError as exc:
                raise CliError(f"ground-state solve failed: {exc}", EXIT_RUNTIME)

        n_qubits = args.L
    else:
        try:
            fixed_target = load_qsv(args.target_file)
        except (OSError, ValueError) as exc:
            raise CliError(f"cannot load target: {exc}")
        n_qubits = fixed_target.n_qubits

        def target_factory(seed: int) -> StateVector:
            return fixed_target

    bond_set = _resolve_bonds(args.bonds, n_qubits)
    os.makedirs(args.out, exist_ok=True)
    outputs = []

    if args.structure == "auto":
        config = _config_from_args(args, n_qubits, bond_set)
        try:
            circ, trace, seed = engine.encode_with_restarts(target_factory, config)
        except engine.EngineError as exc:
            raise CliError(f"encoding failed: {exc}", EXIT_RUNTIME)
        seeds = list(range(config.seed, config.seed + config.restarts))
        config_snapshot = {
            "m0": config.m0, "m_max": config.m_max, "delta_m": config.delta_m,
            "sweeps_n": config.sweeps_n, "final_sweeps": config.final_sweeps,
            "restarts": config.restarts, "bonds": args.bonds, "structure": "auto",
        }
        target = target_factory(seed)
    else:
        kind, _, depth_s = args.structure.partition(":")
        try:
            depth = int(depth_s) if depth_s else 1
            if kind == "trotter":
                structure = circuit_mod.trotter_structure(n_qubits, depth)
            elif kind == "mera":
                structure = circuit_mod.mera_structure(n_qubits, depth)
            else:
                raise CliError(f"unknown structure {args.structure!r}")
        except ValueError as exc:
            raise CliError(str(exc))
        sweeps = args.sweeps if args.sweeps is not None else 1000
        target = target_factory(args.seed)
        try:
            circ, trace = engine.encode_fixed(target, structure, sweeps)
        except engine.EngineError as exc:
            raise CliError(f"encoding failed: {exc}", EXIT_RUNTIME)
        seed = args.seed
        seeds = [seed]
        config_snapshot = {"structure": args.structure, "sweeps_n": sweeps}

    abs_f = abs(overlap(circuit_mod.evaluate(circ), target))
    circ_path = os.path.join(args.out, "circuit.json")
    trace_path = os.path.join(args.out, "trace.csv")
    circuit_mod.export_json(circ, circ_path)
    trace.to_csv(trace_path)
    outputs += [circ_path, trace_path]
    _write_manifest(args.out, "encode-state", config_snapshot, seeds, outputs, time.perf_counter() - t_start)
    print(f"blocks={circ.n_blocks} |F|={abs_f:.12f} f_ps={_fidelity_per_site(abs_f, n_qubits):.12f}")
    return EXIT_OK


# --- encode-image ------------------------------------------------------------

def cmd_encode_image(args) -> int:
    t_start = time.perf_counter()
    try:
        img = amplitude.read_pgm(args.image)
    except (OSError, ValueError) as exc:
        raise CliError(f"cannot read image: {exc}")
    try:
        rows_s, _, cols_s = args.segments.partition("x")
        rows, cols = int(rows_s), int(cols_s)
    except ValueError:
        raise CliError(f"bad --segments {args.segments!r}, expected RxC")
    try:
        seg = amplitude.segment_image(img, rows, cols)
    except ValueError as exc:
        raise CliError(str(exc))

    seg_len = seg.seg_width * seg.seg_height
    n_qubits = amplitude.n_qubits_for(seg_len)
    bond_set = circuit_mod.all_pairs_bonds(n_qubits)

    def config_for_segment(L: int) -> engine.EncodeConfig:
        return _config_from_args(args, L, bond_set)

    threads = args.threads if args.threads > 0 else (os.cpu_count() or 1)
    os.makedirs(args.out, exist_ok=True)
    try:
        results, reconstructed = amplitude.encode_image_pipeline(
            img, rows, cols, config_for_segment, threads=threads
        )
    except engine.EngineError as exc:
        raise CliError(f"encoding failed: {exc}", EXIT_RUNTIME)

    outputs = []
    recon_path = os.path.join(args.out, "reconstructed.pgm")
    amplitude.write_pgm(reconstructed, recon_path)
    outputs.append(recon_path)
    report_path = os.path.join(args.out, "segments.csv")
    with open(report_path, "w") as fh:
        fh.write("segment,ms,L,M,abs_fidelity,f_ps,volume\n")
        for r in results:
            row, col = divmod(r.index - 1, cols)
            fh.write(
                f"r{row}c{col},{r.index},{r.n_qubits},{r.circuit.n_blocks},"
                f"{r.abs_fidelity!r},{r.fidelity_per_site!r},{r.volume!r}\n"
            )
    outputs.append(report_path)
    for r in results:
        path = os.path.join(args.out, f"circuit_{r.index:02d}.json")
        circuit_mod.export_json(r.circuit, path)
        outputs.append(path)
    config_snapshot = {
        "segments": args.segments, "m_max": args.Mmax, "preset": args.preset,
        "threads": threads,
    }
    _write_manifest(args.out, "encode-image", config_snapshot, [args.seed], outputs, time.perf_counter() - t_start)
    mean_f = float(np.mean([r.abs_fidelity for r in results]))
    print(f"segments={len(results)} L={n_qubits} mean|F|={mean_f:.9f}")
    return EXIT_OK


# --- decompose ---------------------------------------------------------------

_BUILTINS = {
    "identity": np.eye(4, dtype=complex),
    "cnot": decompose.CNOT,
    "swap": decompose.SWAP,
}


def cmd_decompose(args) -> int:
    if (args.infile is None) == (args.builtin is None):
        raise CliError("need exactly one of --in or --builtin")
    if args.builtin:
        u = _BUILTINS[args.builtin]
    else:
        try:
            with open(args.infile) as fh:
                flat = np.asarray(json.load(fh), dtype=float)
        except (OSError, ValueError) as exc:
            raise CliError(f"cannot read matrix: {exc}")
        if flat.size != 32:
            raise CliError(f"expected 32 doubles, got {flat.size}")
        u = (flat[0::2] + 1j * flat[1::2]).reshape(4, 4)

    deviation = decompose.unitarity_deviation(u)
    if deviation > 1e-10:
        print(f"input is not unitary: max-abs deviation of U*U - I is {deviation:.3e}", file=sys.stderr)
        return EXIT_USAGE
    try:
        cf = decompose.kak_decompose(u)
    except decompose.DecompositionError as exc:
        raise CliError(f"decomposition failed: {exc}", EXIT_RUNTIME)
    params = decompose.to_gate_params(cf)
    err = decompose.phase_aligned_error(decompose.reconstruct_gate(params), u)
    for k, theta in enumerate(params.theta):
        print(f"theta_{k:<2d} {theta: .7f}")
    print(f"reconstruction error (up to global phase): {err:.3e}")
    if args.qasm:
        block = circuit_mod.Circuit(2, [circuit_mod.UnitaryBlock((0, 1), u)])
        for line in circuit_mod.qasm_lines(block):
            print(line)
    if args.check and err >= 1e-10:
        print("check failed: reconstruction error above 1e-10", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


# --- verify ------------------------------------------------------------------

def _haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))


def _random_state(n_qubits: int, rng: np.random.Generator) -> StateVector:
    amps = rng.standard_normal(2**n_qubits) + 1j * rng.standard_normal(2**n_qubits)
    return StateVector(amps / np.linalg.norm(amps), copy=False)


def _check_param_state(blocks, target: np.ndarray, n_qubits: int) -> float:
    state = StateVector.zero(n_qubits)
    for bond, theta in blocks:
        u = decompose.reconstruct_gate(decompose.GateParams(theta=theta))
        state = apply_two_qubit(state, u, bond)
    t = StateVector(np.asarray(target) / np.linalg.norm(target))
    return abs(overlap(t, state))


def verification_checks(seed: int = 1):
    """(name, callable) pairs; each callable returns (ok, detail)."""
    tol = golden.GOLDEN_OVERLAP_TOL

    def params_singlet():
        ov = _check_param_state((((0, 1), golden.SINGLET_PARAMS),), golden.SINGLET_STATE, 2)
        return ov > 1 - tol, f"overlap {ov:.9f}"

    def params_random2q():
        ov = _check_param_state((((0, 1), golden.RANDOM2Q_PARAMS),), golden.RANDOM2Q_STATE, 2)
        return ov > 1 - tol, f"overlap {ov:.9f}"

    def params_ghz():
        ov = _check_param_state(golden.GHZ_BLOCKS, golden.GHZ_STATE, 3)
        return ov > 1 - tol, f"overlap {ov:.9f}"

    def params_random3q():
        ov = _check_param_state(golden.RANDOM3Q_BLOCKS, golden.RANDOM3Q_STATE, 3)
        return ov > 1 - tol, f"overlap {ov:.9f}"

    def builder_singlet():
        x = np.array([[0, 1], [1, 0]], dtype=complex)
        h = decompose.H_GATE
        block = decompose.CNOT @ np.kron(np.eye(2), h) @ np.kron(x, x)
        state = apply_two_qubit(StateVector.zero(2), block, (0, 1))
        ov = abs(overlap(StateVector(golden.SINGLET_STATE), state))
        return ov > 1 - 1e-12, f"overlap {ov:.12f}"

    def builder_ghz():
        h0 = np.kron(np.eye(2), decompose.H_GATE)
        state = StateVector.zero(3)
        state = apply_two_qubit(state, decompose.CNOT @ h0, (0, 1))
        state = apply_two_qubit(state, decompose.CNOT, (1, 2))
        ov = abs(overlap(StateVector(golden.GHZ_STATE), state))
        return ov > 1 - 1e-12, f"overlap {ov:.12f}"

    def tomography():
        from .state import fidelity_tensor, fidelity_tensor_via_pauli

        rng = np.random.default_rng(seed)
        worst = 0.0
        for _ in range(5):
            ket, bra = _random_state(4, rng), _random_state(4, rng)
            for bond in circuit_mod.all_pairs_bonds(4):
                direct = fidelity_tensor(ket, bra, bond).matrix
                via = fidelity_tensor_via_pauli(ket, bra, bond).matrix
                worst = max(worst, float(np.max(np.abs(direct - via))))
        return worst < 1e-12, f"max deviation {worst:.2e}"

    def kak_roundtrip():
        rng = np.random.default_rng(seed)
        worst = 0.0
        for _ in range(100):
            u = _haar_unitary(4, rng)
            rebuilt = decompose.reconstruct_gate(decompose.gate_params_for(u))
            worst = max(worst, decompose.phase_aligned_error(rebuilt, u))
        return worst < 1e-9, f"max error {worst:.2e}"

    def svd_optimality():
        from .linalg import svd
        from .state import FidelityTensor

        rng = np.random.default_rng(seed)
        vs = np.stack([_haar_unitary(4, rng) for _ in range(2000)])
        worst_eq = 0.0
        ok = True
        for _ in range(50):
            f = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
            res = svd(f)
            best = float(np.sum(res.singular))
            achieved = abs(np.sum(f * np.conj(res.left @ res.right)))
            worst_eq = max(worst_eq, abs(achieved - best))
            sampled = np.abs(np.einsum("kij,ij->k", np.conj(vs), f))
            ok &= bool(np.all(sampled <= best + 1e-12))
        return ok and worst_eq < 1e-12, f"trace gap {worst_eq:.2e}"

    return [
        ("params-singlet", params_singlet),
        ("params-random2q", params_random2q),
        ("params-ghz", params_ghz),
        ("params-random3q", params_random3q),
        ("builder-singlet", builder_singlet),
        ("builder-ghz", builder_ghz),
        ("tomography", tomography),
        ("kak-roundtrip", kak_roundtrip),
        ("svd-optimality", svd_optimality),
    ]


def cmd_verify(args) -> int:
    failures = 0
    ran = 0
    for name, fn in verification_checks(args.seed):
        if args.only and args.only not in name:
            continue
        ran += 1
        try:
            ok, detail = fn()
        except Exception as exc:  # a crash is a failure, not an abort
            ok, detail = False, f"exception: {exc}"
        print(f"{'PASS' if ok else 'FAIL'} {name} ({detail})")
        failures += 0 if ok else 1
    if ran == 0:
        print(f"no checks match --only {args.only!r}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK if failures == 0 else EXIT_VERIFY


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "encode-state": cmd_encode_state,
        "encode-image": cmd_encode_image,
        "decompose": cmd_decompose,
        "verify": cmd_verify,
    }
    try:
        return handlers[args.command](args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
