"""Amplitude encoding of classical data and the image pipeline.

A real vector x maps to the state sum_n x_n/sqrt(V) |n> with V = sum x_n^2
(the squared norm, kept alongside so the data can be rescaled back).
Images are row-major grids with pixel label s = ix + width*iy; segmentation
splits a grid into equal tiles, each encoded independently with its own
volume, and reassembles losslessly.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, circuit_fidelity, evaluate
from .engine import EncodeTrace, encode
from .state import StateVector


@dataclass(frozen=True)
class ClassicalVector:
    values: np.ndarray
    volume: float

    @classmethod
    def from_values(cls, values) -> "ClassicalVector":
        values = np.asarray(values, dtype=float).reshape(-1)
        return cls(values=values, volume=float(np.sum(values**2)))


@dataclass(frozen=True)
class ImageGrid:
    width: int
    height: int
    pixels: np.ndarray  # row-major, s = ix + width*iy

    def __post_init__(self):
        if self.pixels.size != self.width * self.height:
            raise ValueError("pixel count does not match width*height")

    def as_rows(self) -> np.ndarray:
        return self.pixels.reshape(self.height, self.width)


@dataclass(frozen=True)
class Segmentation:
    rows: int
    cols: int
    seg_width: int
    seg_height: int
    segments: list[ClassicalVector]


def n_qubits_for(length: int) -> int:
    """Qubits needed to amplitude-encode a vector of the given length."""
    if length < 1:
        raise ValueError("need at least one value")
    return max(1, math.ceil(math.log2(length)))


def amplitude_encode(data: ClassicalVector) -> StateVector:
    """Normalized state with amplitudes x_n/sqrt(V), zero-padded to 2^L."""
    if data.volume <= 0.0:
        raise ValueError("cannot encode all-zero data (zero volume)")
    n_qubits = n_qubits_for(data.values.size)
    amps = np.zeros(2**n_qubits, dtype=complex)
    amps[: data.values.size] = data.values / math.sqrt(data.volume)
    return StateVector(amps, copy=False)


def amplitude_decode(state: StateVector, volume: float, length: int) -> ClassicalVector:
    """Rescale amplitudes back to data; real parts are taken (approximate
    circuit states can carry small imaginary residue)."""
    if volume <= 0.0:
        raise ValueError("volume must be positive")
    if length > state.amps.size:
        raise ValueError(f"length {length} exceeds state dimension {state.amps.size}")
    values = math.sqrt(volume) * state.amps[:length].real
    return ClassicalVector(values=values, volume=float(np.sum(values**2)))


def segment_image(img: ImageGrid, rows: int, cols: int) -> Segmentation:
    """Split into rows x cols tiles, each flattened with its local
    s' = ix' + seg_width*iy' labeling (reading order over tiles)."""
    if img.height % rows or img.width % cols:
        raise ValueError(f"{img.width}x{img.height} image not divisible into {rows}x{cols} segments")
    seg_h, seg_w = img.height // rows, img.width // cols
    grid = img.as_rows()
    segments = []
    for r in range(rows):
        for c in range(cols):
            tile = grid[r * seg_h : (r + 1) * seg_h, c * seg_w : (c + 1) * seg_w]
            segments.append(ClassicalVector.from_values(tile.reshape(-1)))
    return Segmentation(rows=rows, cols=cols, seg_width=seg_w, seg_height=seg_h, segments=segments)


def assemble_image(seg: Segmentation) -> ImageGrid:
    height = seg.rows * seg.seg_height
    width = seg.cols * seg.seg_width
    grid = np.zeros((height, width))
    for idx, segment in enumerate(seg.segments):
        r, c = divmod(idx, seg.cols)
        tile = segment.values.reshape(seg.seg_height, seg.seg_width)
        grid[r * seg.seg_height : (r + 1) * seg.seg_height, c * seg.seg_width : (c + 1) * seg.seg_width] = tile
    return ImageGrid(width=width, height=height, pixels=grid.reshape(-1))


@dataclass(frozen=True)
class SegmentResult:
    index: int  # 1-based segment label in reading order
    n_qubits: int
    circuit: Circuit
    trace: EncodeTrace
    volume: float
    abs_fidelity: float

    @property
    def fidelity_per_site(self) -> float:
        return self.abs_fidelity ** (1.0 / self.n_qubits)


def fidelity_per_site(abs_f: float, n_qubits: int) -> float:
    """Size-comparable reporting metric |F|**(1/L)."""
    return abs_f ** (1.0 / n_qubits)


def encode_image_pipeline(
    img: ImageGrid,
    rows: int,
    cols: int,
    config_for_segment,
    threads: int = 1,
) -> tuple[list[SegmentResult], ImageGrid]:
    """Encode each tile into its own circuit and reconstruct the image.

    config_for_segment(n_qubits) -> EncodeConfig supplies per-tile control
    parameters (tiles share a size here, but the hook keeps sizes explicit).
    Tiles are independent, so they run on a thread pool when threads > 1.
    """
    seg = segment_image(img, rows, cols)

    def run(idx_segment: tuple[int, ClassicalVector]) -> tuple[SegmentResult, ClassicalVector]:
        idx, segment = idx_segment
        target = amplitude_encode(segment)
        config = config_for_segment(target.n_qubits)
        circuit, trace = encode(target, config)
        abs_f = abs(circuit_fidelity(circuit, target))
        decoded = amplitude_decode(evaluate(circuit), segment.volume, segment.values.size)
        result = SegmentResult(
            index=idx + 1,
            n_qubits=target.n_qubits,
            circuit=circuit,
            trace=trace,
            volume=segment.volume,
            abs_fidelity=abs_f,
        )
        return result, decoded

    jobs = list(enumerate(seg.segments))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(run, jobs))
    else:
        outcomes = [run(j) for j in jobs]

    results = [r for r, _ in outcomes]
    reconstructed = Segmentation(
        rows=seg.rows,
        cols=seg.cols,
        seg_width=seg.seg_width,
        seg_height=seg.seg_height,
        segments=[d for _, d in outcomes],
    )
    return results, assemble_image(reconstructed)


# --- PGM and vector file I/O -----------------------------------------------

def read_pgm(path: str) -> ImageGrid:
    """P2 (ASCII) or P5 (binary) grayscale, maxval <= 255."""
    with open(path, "rb") as fh:
        data = fh.read()

    def tokens():
        pos = 0
        while pos < len(data):
            if data[pos : pos + 1].isspace():
                pos += 1
                continue
            if data[pos : pos + 1] == b"#":
                pos = data.index(b"\n", pos) + 1
                continue
            end = pos
            while end < len(data) and not data[end : end + 1].isspace():
                end += 1
            yield pos, data[pos:end]
            pos = end

    it = tokens()
    _, magic = next(it)
    if magic not in (b"P2", b"P5"):
        raise ValueError(f"{path}: not a PGM file (magic {magic!r})")
    header = []
    pos, tok = 0, b""
    while len(header) < 3:
        pos, tok = next(it)
        header.append(int(tok))
    width, height, maxval = header
    if maxval > 255:
        raise ValueError(f"{path}: maxval {maxval} > 255 unsupported")
    if magic == b"P2":
        values = [int(t) for _, t in it]
        if len(values) != width * height:
            raise ValueError(f"{path}: expected {width*height} pixels, got {len(values)}")
        pixels = np.array(values, dtype=float)
    else:
        start = pos + len(tok) + 1  # single whitespace after maxval
        raw = data[start : start + width * height]
        if len(raw) != width * height:
            raise ValueError(f"{path}: truncated binary payload")
        pixels = np.frombuffer(raw, dtype=np.uint8).astype(float)
    return ImageGrid(width=width, height=height, pixels=pixels)


def write_pgm(img: ImageGrid, path: str) -> None:
    """Binary P5 output; values clamped to [0, 255] and rounded."""
    clamped = np.clip(np.round(img.pixels), 0, 255).astype(np.uint8)
    with open(path, "wb") as fh:
        fh.write(f"P5\n{img.width} {img.height}\n255\n".encode())
        fh.write(clamped.tobytes())


def read_vector(path: str) -> ClassicalVector:
    """Plain-text data file: one real per line (blank/# lines skipped)."""
    values = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line and not line.startswith("#"):
                values.append(float(line))
    return ClassicalVector.from_values(values)
