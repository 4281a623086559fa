import json
import os

import numpy as np
import pytest

from aqce import cli
from aqce.amplitude import ImageGrid, write_pgm
from aqce.circuit import import_json, evaluate
from aqce.state import StateVector, overlap, save_qsv

from conftest import random_state_amps


def run_cli(*argv) -> int:
    return cli.main(list(argv))


def test_verify_all_pass(capsys):
    assert run_cli("verify") == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out
    assert out.count("PASS") >= 9


def test_verify_only_filter(capsys):
    assert run_cli("verify", "--only", "tomography") == 0
    out = capsys.readouterr().out
    assert out.count("PASS") == 1 and "tomography" in out


def test_verify_unknown_filter(capsys):
    assert run_cli("verify", "--only", "nonexistent") == 1


def test_verify_detects_mutation(monkeypatch, capsys):
    from aqce import golden

    mutated = tuple(t + 1e-2 for t in golden.GHZ_BLOCKS[0][1])
    monkeypatch.setattr(golden, "GHZ_BLOCKS", ((golden.GHZ_BLOCKS[0][0], mutated), golden.GHZ_BLOCKS[1]))
    assert run_cli("verify", "--only", "params-ghz") == 3
    assert "FAIL params-ghz" in capsys.readouterr().out


def test_decompose_builtin_identity(capsys):
    assert run_cli("decompose", "--builtin", "identity", "--check") == 0
    out = capsys.readouterr().out
    assert "theta_0" in out and "reconstruction error" in out


def test_decompose_from_file_with_qasm(tmp_path, capsys, rng):
    from conftest import haar_unitary

    u = haar_unitary(4, rng)
    flat = []
    for entry in u.reshape(-1):
        flat += [entry.real, entry.imag]
    path = str(tmp_path / "u.json")
    with open(path, "w") as fh:
        json.dump(flat, fh)
    assert run_cli("decompose", "--in", path, "--check", "--qasm") == 0
    out = capsys.readouterr().out
    assert "OPENQASM 2.0;" in out and out.count("cx") == 3


def test_decompose_rejects_nonunitary(tmp_path, capsys):
    path = str(tmp_path / "bad.json")
    with open(path, "w") as fh:
        json.dump([1.0] * 32, fh)
    assert run_cli("decompose", "--in", path) == 1
    assert "not unitary" in capsys.readouterr().err


def test_decompose_needs_exactly_one_source(capsys):
    assert run_cli("decompose") == 1
    assert run_cli("decompose", "--builtin", "cnot", "--in", "x.json") == 1


def test_encode_state_target_file(tmp_path, capsys, rng):
    # a product state needs no entangling depth: one block suffices
    amps = np.zeros(8, dtype=complex)
    amps[5] = 1.0  # |101>
    target = StateVector(amps)
    qsv = str(tmp_path / "target.qsv")
    save_qsv(target, qsv)
    out_dir = str(tmp_path / "run")
    code = run_cli(
        "encode-state", "--target-file", qsv, "--bonds", "chain",
        "--M0", "2", "--Mmax", "4", "--sweeps", "6",
        "--fidelity-stop", "0.999999999999", "--out", out_dir,
    )
    assert code == 0
    printed = capsys.readouterr().out
    assert "|F|=" in printed and "f_ps=" in printed
    circ = import_json(os.path.join(out_dir, "circuit.json"))
    assert abs(abs(overlap(evaluate(circ), target)) - 1) < 1e-9
    manifest = json.load(open(os.path.join(out_dir, "manifest.json")))
    assert manifest["command"] == "encode-state"
    assert os.path.exists(os.path.join(out_dir, "trace.csv"))


def test_encode_state_model_run(tmp_path, capsys):
    out_dir = str(tmp_path / "heis")
    code = run_cli(
        "encode-state", "--model", "heisenberg", "--L", "4", "--preset", "heis",
        "--Mmax", "6", "--restarts", "2", "--seed", "3",
        "--fidelity-stop", "0.99999", "--out", out_dir,
    )
    assert code == 0
    trace_lines = open(os.path.join(out_dir, "trace.csv")).read().splitlines()
    assert trace_lines[0] == "phase,M,sweep,block,abs_fidelity,elapsed_ms"
    assert len(trace_lines) > 10


def test_encode_state_fixed_structure(tmp_path, capsys):
    out_dir = str(tmp_path / "trot")
    code = run_cli(
        "encode-state", "--model", "xy", "--L", "4",
        "--structure", "trotter:1", "--sweeps", "200", "--out", out_dir,
    )
    assert code == 0
    out = capsys.readouterr().out
    assert "blocks=4" in out


def test_encode_state_usage_errors(tmp_path):
    assert run_cli("encode-state", "--model", "heisenberg") == 1  # missing --L
    assert run_cli("encode-state", "--model", "xxz", "--L", "4") == 1  # missing --delta
    assert run_cli("encode-state") == 1  # no target at all
    assert run_cli("encode-state", "--model", "xy", "--L", "4", "--bonds", "nope") == 1


def test_encode_state_trace_deterministic_minus_timing(tmp_path):
    outs = []
    for name in ("a", "b"):
        out_dir = str(tmp_path / name)
        assert run_cli(
            "encode-state", "--model", "xy", "--L", "4", "--M0", "2", "--Mmax", "4",
            "--dM", "2", "--sweeps", "4", "--seed", "9", "--out", out_dir,
        ) == 0
        rows = open(os.path.join(out_dir, "trace.csv")).read().splitlines()
        outs.append([",".join(r.split(",")[:5]) for r in rows])
    assert outs[0] == outs[1]


def test_encode_image_smoke_and_outputs(tmp_path, rng):
    img = ImageGrid(width=16, height=16, pixels=rng.uniform(0, 255, 256))
    pgm = str(tmp_path / "in.pgm")
    write_pgm(img, pgm)
    out_dir = str(tmp_path / "imgrun")
    code = run_cli(
        "encode-image", pgm, "--segments", "1x1", "--Mmax", "8",
        "--sweeps", "10", "--out", out_dir,
    )
    assert code == 0
    assert os.path.exists(os.path.join(out_dir, "reconstructed.pgm"))
    report = open(os.path.join(out_dir, "segments.csv")).read().splitlines()
    assert report[0] == "segment,ms,L,M,abs_fidelity,f_ps,volume"
    assert len(report) == 2
    assert os.path.exists(os.path.join(out_dir, "circuit_01.json"))


def test_encode_image_segmented(tmp_path, rng):
    img = ImageGrid(width=16, height=16, pixels=rng.uniform(1, 255, 256))
    pgm = str(tmp_path / "in.pgm")
    write_pgm(img, pgm)
    out_dir = str(tmp_path / "seg")
    code = run_cli(
        "encode-image", pgm, "--segments", "2x2", "--Mmax", "6",
        "--sweeps", "10", "--threads", "2", "--out", out_dir,
    )
    assert code == 0
    report = open(os.path.join(out_dir, "segments.csv")).read().splitlines()
    assert len(report) == 5  # header + 4 segments
    for k in range(1, 5):
        assert os.path.exists(os.path.join(out_dir, f"circuit_{k:02d}.json"))


def test_encode_image_nondivisible_exits_one(tmp_path, rng, capsys):
    img = ImageGrid(width=32, height=32, pixels=rng.uniform(0, 255, 1024))
    pgm = str(tmp_path / "in.pgm")
    write_pgm(img, pgm)
    assert run_cli("encode-image", pgm, "--segments", "3x3", "--Mmax", "4") == 1
    assert "not divisible" in capsys.readouterr().err


def test_encode_image_unreadable_exits_one(tmp_path):
    assert run_cli("encode-image", str(tmp_path / "missing.pgm"), "--Mmax", "4") == 1


def test_bad_subcommand_exits_one():
    with pytest.raises(SystemExit) as exc_info:
        run_cli("frobnicate")
    assert exc_info.value.code == 1


def test_encode_state_paper_preset_alias(tmp_path):
    out_dir = str(tmp_path / "alias")
    code = run_cli(
        "encode-state", "--model", "heisenberg", "--L", "4", "--delta", "1",
        "--preset", "paper-heis", "--Mmax", "6", "--fidelity-stop", "0.99999",
        "--out", out_dir,
    )
    assert code == 0
