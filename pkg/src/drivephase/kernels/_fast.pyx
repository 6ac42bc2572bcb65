# cython: boundscheck=False, wraparound=False, cdivision=True
"""Cython propagation kernels (fast backend).

Same contracts as kernels._ref; the sequential 2x2 products run as tight
C loops instead of NumPy tree reductions.
"""
import numpy as np

cimport numpy as cnp
from libc.math cimport cos, sin

cnp.import_array()

BACKEND = "cython"

ctypedef cnp.complex128_t cplx


cdef inline void _left_multiply(cplx *u, double c, double s, double cp, double sp) noexcept nogil:
    # u <- g @ u with g = [[c, -i s e^{-i phi}], [-i s e^{i phi}, c]]
    cdef cplx g01 = -1j * s * (cp - 1j * sp)
    cdef cplx g10 = -1j * s * (cp + 1j * sp)
    cdef cplx a = c * u[0] + g01 * u[2]
    cdef cplx b = c * u[1] + g01 * u[3]
    cdef cplx d = g10 * u[0] + c * u[2]
    cdef cplx e = g10 * u[1] + c * u[3]
    u[0] = a; u[1] = b; u[2] = d; u[3] = e


def su2_product(cnp.ndarray[double, ndim=1] theta, cnp.ndarray[double, ndim=1] phi):
    """Time-ordered product of xy-plane rotation slices."""
    cdef Py_ssize_t n = theta.shape[0]
    cdef cnp.ndarray[cplx, ndim=2] out = np.eye(2, dtype=np.complex128)
    cdef cplx *u = <cplx *> out.data
    cdef Py_ssize_t k
    cdef double th, ph
    with nogil:
        for k in range(n):
            th = 0.5 * theta[k]
            ph = phi[k]
            _left_multiply(u, cos(th), sin(th), cos(ph), sin(ph))
    return out


def sequence_product(cnp.ndarray mats):
    """Ordered product mats[n-1] @ ... @ mats[0] (2x2 fast path)."""
    cdef Py_ssize_t n = mats.shape[0]
    if mats.ndim != 3 or mats.shape[1] != 2 or mats.shape[2] != 2:
        # uncommon path (e.g. 4x4 superoperators): defer to NumPy
        from . import _ref
        return _ref.sequence_product(mats)
    cdef cnp.ndarray[cplx, ndim=3] m = np.ascontiguousarray(mats, dtype=np.complex128)
    cdef cnp.ndarray[cplx, ndim=2] out = np.eye(2, dtype=np.complex128)
    cdef cplx *u = <cplx *> out.data
    cdef cplx a, b, c, d
    cdef cplx m00, m01, m10, m11
    cdef Py_ssize_t k
    with nogil:
        for k in range(n):
            m00 = m[k, 0, 0]; m01 = m[k, 0, 1]; m10 = m[k, 1, 0]; m11 = m[k, 1, 1]
            a = m00 * u[0] + m01 * u[2]
            b = m00 * u[1] + m01 * u[3]
            c = m10 * u[0] + m11 * u[2]
            d = m10 * u[1] + m11 * u[3]
            u[0] = a; u[1] = b; u[2] = c; u[3] = d
    return out


def density_product(cnp.ndarray[double, ndim=1] theta, cnp.ndarray[double, ndim=1] phi,
                    double decay, cnp.ndarray rho):
    """Apply slice unitaries to rho with off-diagonal decay per slice."""
    cdef Py_ssize_t n = theta.shape[0]
    cdef cnp.ndarray[cplx, ndim=2] out = np.array(rho, dtype=np.complex128)
    cdef cplx *r = <cplx *> out.data
    cdef Py_ssize_t k
    cdef double th, ph, c, s
    cdef cplx g01, g10, n00, n01, n10, n11, t00, t01, t10, t11
    with nogil:
        for k in range(n):
            th = 0.5 * theta[k]
            ph = phi[k]
            c = cos(th); s = sin(th)
            g01 = -1j * s * (cos(ph) - 1j * sin(ph))
            g10 = -1j * s * (cos(ph) + 1j * sin(ph))
            # t = g @ r
            t00 = c * r[0] + g01 * r[2]
            t01 = c * r[1] + g01 * r[3]
            t10 = g10 * r[0] + c * r[2]
            t11 = g10 * r[1] + c * r[3]
            # r = t @ g^dagger ; g^dagger = [[c, conj(g10)], [conj(g01), c]]
            n00 = t00 * c + t01 * g01.conjugate()
            n01 = t00 * g10.conjugate() + t01 * c
            n10 = t10 * c + t11 * g01.conjugate()
            n11 = t10 * g10.conjugate() + t11 * c
            r[0] = n00; r[1] = n01 * decay; r[2] = n10 * decay; r[3] = n11
    return out


def conjugated_product(cnp.ndarray mats, cnp.ndarray index, cnp.ndarray axes):
    """Product of frame-rotated cached pulse unitaries (index 0 acts first)."""
    cdef cnp.ndarray[cplx, ndim=3] cache = np.ascontiguousarray(mats, dtype=np.complex128)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] idx = np.ascontiguousarray(index, dtype=np.int64)
    cdef cnp.ndarray[double, ndim=1] ax = np.ascontiguousarray(axes, dtype=np.float64)
    cdef Py_ssize_t n = idx.shape[0]
    cdef cnp.ndarray[cplx, ndim=2] out = np.eye(2, dtype=np.complex128)
    cdef cplx *u = <cplx *> out.data
    cdef cplx m00, m01, m10, m11, ph, a, b, c, d
    cdef Py_ssize_t k, j
    with nogil:
        for k in range(n):
            j = idx[k]
            ph = cos(ax[k]) - 1j * sin(ax[k])
            m00 = cache[j, 0, 0]
            m01 = cache[j, 0, 1] * ph
            m10 = cache[j, 1, 0] * ph.conjugate()
            m11 = cache[j, 1, 1]
            a = m00 * u[0] + m01 * u[2]
            b = m00 * u[1] + m01 * u[3]
            c = m10 * u[0] + m11 * u[2]
            d = m10 * u[1] + m11 * u[3]
            u[0] = a; u[1] = b; u[2] = c; u[3] = d
    return out
