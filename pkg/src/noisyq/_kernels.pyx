# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled density-matrix update kernels.

Same contract as the pure-python module: batched (batch, 2**n, 2**n)
complex128 arrays, qubit 0 in the most significant bit position, input
consumed.  These versions mutate in place and return the input array.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND_NAME = "compiled"


def apply_1q_unitary(object rhos, object u, int q, int n):
    """rho -> U rho U^dagger on qubit ``q``, in place over the batch."""
    cdef double complex[:, :, ::1] r = rhos
    cdef double complex[:, ::1] um = np.ascontiguousarray(u, dtype=np.complex128)
    cdef Py_ssize_t batch = r.shape[0]
    cdef Py_ssize_t s = 1 << (n - 1 - q)
    cdef Py_ssize_t nhi = 1 << q
    cdef Py_ssize_t two_s = 2 * s
    cdef double complex u00 = um[0, 0], u01 = um[0, 1]
    cdef double complex u10 = um[1, 0], u11 = um[1, 1]
    cdef double complex cu00 = u00.conjugate(), cu01 = u01.conjugate()
    cdef double complex cu10 = u10.conjugate(), cu11 = u11.conjugate()
    cdef Py_ssize_t z, rh, ch, rl, cl, r0, r1, c0, c1
    cdef double complex m00, m01, m10, m11, t00, t01, t10, t11

    for z in range(batch):
        for rh in range(nhi):
            for ch in range(nhi):
                for rl in range(s):
                    r0 = rh * two_s + rl
                    r1 = r0 + s
                    for cl in range(s):
                        c0 = ch * two_s + cl
                        c1 = c0 + s
                        m00 = r[z, r0, c0]
                        m01 = r[z, r0, c1]
                        m10 = r[z, r1, c0]
                        m11 = r[z, r1, c1]
                        t00 = u00 * m00 + u01 * m10
                        t01 = u00 * m01 + u01 * m11
                        t10 = u10 * m00 + u11 * m10
                        t11 = u10 * m01 + u11 * m11
                        r[z, r0, c0] = t00 * cu00 + t01 * cu01
                        r[z, r0, c1] = t00 * cu10 + t01 * cu11
                        r[z, r1, c0] = t10 * cu00 + t11 * cu01
                        r[z, r1, c1] = t10 * cu10 + t11 * cu11
    return rhos


def apply_1q_kraus(object rhos, object kraus, int q, int n):
    """rho -> sum_k K_k rho K_k^dagger on qubit ``q``, in place over the batch."""
    cdef double complex[:, :, ::1] r = rhos
    cdef double complex[:, :, ::1] km = np.ascontiguousarray(kraus, dtype=np.complex128)
    cdef Py_ssize_t nk = km.shape[0]
    if nk > 8:
        raise ValueError("at most 8 Kraus operators supported")
    cdef Py_ssize_t batch = r.shape[0]
    cdef Py_ssize_t s = 1 << (n - 1 - q)
    cdef Py_ssize_t nhi = 1 << q
    cdef Py_ssize_t two_s = 2 * s
    cdef double complex kk[8][2][2]
    cdef double complex ck[8][2][2]
    cdef Py_ssize_t k, i, j
    for k in range(nk):
        for i in range(2):
            for j in range(2):
                kk[k][i][j] = km[k, i, j]
                ck[k][i][j] = km[k, i, j].conjugate()
    cdef Py_ssize_t z, rh, ch, rl, cl, r0, r1, c0, c1
    cdef double complex m00, m01, m10, m11, t00, t01, t10, t11
    cdef double complex a00, a01, a10, a11

    for z in range(batch):
        for rh in range(nhi):
            for ch in range(nhi):
                for rl in range(s):
                    r0 = rh * two_s + rl
                    r1 = r0 + s
                    for cl in range(s):
                        c0 = ch * two_s + cl
                        c1 = c0 + s
                        m00 = r[z, r0, c0]
                        m01 = r[z, r0, c1]
                        m10 = r[z, r1, c0]
                        m11 = r[z, r1, c1]
                        a00 = 0
                        a01 = 0
                        a10 = 0
                        a11 = 0
                        for k in range(nk):
                            t00 = kk[k][0][0] * m00 + kk[k][0][1] * m10
                            t01 = kk[k][0][0] * m01 + kk[k][0][1] * m11
                            t10 = kk[k][1][0] * m00 + kk[k][1][1] * m10
                            t11 = kk[k][1][0] * m01 + kk[k][1][1] * m11
                            a00 = a00 + t00 * ck[k][0][0] + t01 * ck[k][0][1]
                            a01 = a01 + t00 * ck[k][1][0] + t01 * ck[k][1][1]
                            a10 = a10 + t10 * ck[k][0][0] + t11 * ck[k][0][1]
                            a11 = a11 + t10 * ck[k][1][0] + t11 * ck[k][1][1]
                        r[z, r0, c0] = a00
                        r[z, r0, c1] = a01
                        r[z, r1, c0] = a10
                        r[z, r1, c1] = a11
    return rhos


def apply_cx(object rhos, int control, int target, int n):
    """rho -> CX rho CX, in place over the batch."""
    cdef double complex[:, :, ::1] r = rhos
    cdef Py_ssize_t batch = r.shape[0]
    cdef Py_ssize_t d = 1 << n
    cdef Py_ssize_t cmask = 1 << (n - 1 - control)
    cdef Py_ssize_t tmask = 1 << (n - 1 - target)
    cdef Py_ssize_t z, a, pa, j
    cdef double complex tmp

    for z in range(batch):
        for a in range(d):
            if (a & cmask) and not (a & tmask):
                pa = a | tmask
                for j in range(d):
                    tmp = r[z, a, j]
                    r[z, a, j] = r[z, pa, j]
                    r[z, pa, j] = tmp
        for a in range(d):
            if (a & cmask) and not (a & tmask):
                pa = a | tmask
                for j in range(d):
                    tmp = r[z, j, a]
                    r[z, j, a] = r[z, j, pa]
                    r[z, j, pa] = tmp
    return rhos
