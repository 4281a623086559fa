"""Reference gate-parameter sets with known target states.

Each parameter set below was produced by running the encoder on the named
target; plugging the 15-angle sets back into the standard gate sequence
must reproduce the target up to a global phase. Angle values are truncated
to 8 digits, so comparisons are held to 1e-6 rather than machine precision.
The verification CLI consumes these; tests assert them directly.
"""
from __future__ import annotations

import numpy as np

SQRT2 = np.sqrt(2.0)

# Bell singlet (|01> - |10>)/sqrt(2) on qubits (0, 1); n = sigma0 + 2*sigma1.
SINGLET_STATE = np.array([0, -1, 1, 0], dtype=complex) / SQRT2
SINGLET_PARAMS = (
    1.6823068, 3.1415927, 0.0, -0.9758576, 0.0, -1.6678105, 0.3926991,
    3.5342917, 3.1355175, -2.6094912, -3.1415927, 3.1204519, -1.6869951,
    -3.1415926, 2.4721516,
)

# A fixed normal-sampled two-qubit state and its single-block encoding.
RANDOM2Q_STATE = np.array(
    [
        0.36179353 + 0.42519915j,
        0.14876111 + 0.33156910j,
        -0.02356009 + 0.68066637j,
        0.23101109 - 0.19752287j,
    ],
    dtype=complex,
)
RANDOM2Q_PARAMS = (
    2.0216448, 1.3683389, -2.2863607, -2.8429004, 1.9027058, -1.8420845,
    0.7086172, 1.1534484, 1.6383263, -2.6132016, -2.0676228, 2.1424122,
    -1.2293439, -1.8418481, -2.6729236,
)

# GHZ (|000> + |111>)/sqrt(2); encoded as block(0,1) then block(1,2).
GHZ_STATE = np.zeros(8, dtype=complex)
GHZ_STATE[0] = GHZ_STATE[7] = 1 / SQRT2
GHZ_BLOCKS = (
    ((0, 1), (
        0.70081942, 1.59343588, -2.99819974, 3.01209222, 1.45398911,
        -2.86368415, 0.25868788, 0.14505637, -0.63764672, -1.71718177,
        -2.80049545, -2.60125707, -2.13304918, 1.68590984, -2.04727870,
    )),
    ((1, 2), (
        0.0, 0.0, 0.0, 0.03670498, 1.57079633, 0.0, 0.25573854, 0.0,
        -2.35619449, 0.0, -3.14159265, 0.04066063, -1.57079633,
        -1.57079633, -1.11421776,
    )),
)

# A fixed normal-sampled three-qubit state; block(1,2) applied first,
# then block(0,1).
RANDOM3Q_STATE = np.array(
    [
        -0.41507377 + 0.14526187j,
        0.03169105 + 0.35848024j,
        -0.23166622 + 0.21332733j,
        -0.32248929 - 0.06104028j,
        -0.11551530 + 0.13972069j,
        0.26960898 - 0.03973709j,
        0.00215509 + 0.44364270j,
        0.01417350 + 0.40747913j,
    ],
    dtype=complex,
)
RANDOM3Q_BLOCKS = (
    ((1, 2), (
        1.39099869, 1.22253363, -1.22510250, -1.04474694, 1.85347535,
        -2.24417198, -1.06037512, -0.87968547, -0.05457889, 0.03359139,
        2.27862931, 0.49867804, 2.89140237, -0.80188802, 1.52534544,
    )),
    ((0, 1), (
        0.12699636, 1.49657252, -0.96112628, 0.0, 0.0, 0.0, -0.39222573,
        0.60984155, -0.07696758, 0.48406694, -0.36703453, 0.19553219,
        -1.17312888, -2.29176295, -3.06220240,
    )),
)

GOLDEN_OVERLAP_TOL = 1e-6
