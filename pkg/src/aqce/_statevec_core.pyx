# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled statevector kernels.

Same contracts as _kernels_py: bond (i, j) uses the local basis
n4 = sigma_i + 2*sigma_j. The environment loop runs environment-major, so
the summation order of fidelity_tensor4 is fixed and reproducible.
"""
import numpy as np

cimport numpy as cnp

cnp.import_array()


cdef inline Py_ssize_t _insert_bits(Py_ssize_t env, Py_ssize_t lo, Py_ssize_t hi) nogil:
    # Spread an environment label over the full index, leaving holes
    # (zero bits) at positions lo < hi.
    cdef Py_ssize_t low_mask = (<Py_ssize_t>1 << lo) - 1
    cdef Py_ssize_t mid_mask = (<Py_ssize_t>1 << hi) - 1
    cdef Py_ssize_t x = (env & low_mask) | ((env & ~low_mask) << 1)
    return (x & mid_mask) | ((x & ~mid_mask) << 1)


def apply_matrix4(cnp.ndarray[cnp.complex128_t, ndim=1] amps,
                  cnp.ndarray[cnp.complex128_t, ndim=2] m4,
                  int i, int j, int n_qubits):
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] out = np.empty_like(amps)
    cdef double complex[:, ::1] m = np.ascontiguousarray(m4)
    cdef double complex[::1] src = amps
    cdef double complex[::1] dst = out
    cdef Py_ssize_t si = <Py_ssize_t>1 << i
    cdef Py_ssize_t sj = <Py_ssize_t>1 << j
    cdef Py_ssize_t lo = i if i < j else j
    cdef Py_ssize_t hi = j if i < j else i
    cdef Py_ssize_t n_env = <Py_ssize_t>1 << (n_qubits - 2)
    cdef Py_ssize_t env, base, i0, i1, i2, i3
    cdef double complex a0, a1, a2, a3
    with nogil:
        for env in range(n_env):
            base = _insert_bits(env, lo, hi)
            i0 = base
            i1 = base | si
            i2 = base | sj
            i3 = base | si | sj
            a0 = src[i0]
            a1 = src[i1]
            a2 = src[i2]
            a3 = src[i3]
            dst[i0] = m[0, 0] * a0 + m[0, 1] * a1 + m[0, 2] * a2 + m[0, 3] * a3
            dst[i1] = m[1, 0] * a0 + m[1, 1] * a1 + m[1, 2] * a2 + m[1, 3] * a3
            dst[i2] = m[2, 0] * a0 + m[2, 1] * a1 + m[2, 2] * a2 + m[2, 3] * a3
            dst[i3] = m[3, 0] * a0 + m[3, 1] * a1 + m[3, 2] * a2 + m[3, 3] * a3
    return out


def fidelity_tensor4(cnp.ndarray[cnp.complex128_t, ndim=1] ket,
                     cnp.ndarray[cnp.complex128_t, ndim=1] bra,
                     int i, int j, int n_qubits):
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] out = np.zeros((4, 4), dtype=complex)
    cdef double complex[:, ::1] f = out
    cdef double complex[::1] k = ket
    cdef double complex[::1] b = bra
    cdef Py_ssize_t si = <Py_ssize_t>1 << i
    cdef Py_ssize_t sj = <Py_ssize_t>1 << j
    cdef Py_ssize_t lo = i if i < j else j
    cdef Py_ssize_t hi = j if i < j else i
    cdef Py_ssize_t n_env = <Py_ssize_t>1 << (n_qubits - 2)
    cdef Py_ssize_t env, base, i0, i1, i2, i3
    cdef double complex k0, k1, k2, k3, b0, b1, b2, b3
    with nogil:
        for env in range(n_env):
            base = _insert_bits(env, lo, hi)
            i0 = base
            i1 = base | si
            i2 = base | sj
            i3 = base | si | sj
            k0 = k[i0]; k1 = k[i1]; k2 = k[i2]; k3 = k[i3]
            b0 = b[i0].conjugate(); b1 = b[i1].conjugate()
            b2 = b[i2].conjugate(); b3 = b[i3].conjugate()
            f[0, 0] += k0 * b0; f[0, 1] += k0 * b1; f[0, 2] += k0 * b2; f[0, 3] += k0 * b3
            f[1, 0] += k1 * b0; f[1, 1] += k1 * b1; f[1, 2] += k1 * b2; f[1, 3] += k1 * b3
            f[2, 0] += k2 * b0; f[2, 1] += k2 * b1; f[2, 2] += k2 * b2; f[2, 3] += k2 * b3
            f[3, 0] += k3 * b0; f[3, 1] += k3 * b1; f[3, 2] += k3 * b2; f[3, 3] += k3 * b3
    return out
