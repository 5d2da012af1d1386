# Compiled versions of the hot kernels. Reference semantics live in _pure.py.

import numpy as np

cimport numpy as cnp
from libc.math cimport log2, sqrt
from scipy.linalg.cython_lapack cimport zheevd

cnp.import_array()

BACKEND = "compiled"

DEF MAXD = 16
MAX_KEPT_DIM = MAXD


cdef inline double _plogp(double lam) noexcept nogil:
    if lam > 0.0:
        return -lam * log2(lam)
    return 0.0


cdef inline double _entropy_2x2(double a00, double a11, double complex a01) noexcept nogil:
    cdef double half_tr = 0.5 * (a00 + a11)
    cdef double off = a01.real * a01.real + a01.imag * a01.imag
    cdef double disc = sqrt(0.25 * (a00 - a11) * (a00 - a11) + off)
    cdef double lo = half_tr - disc
    cdef double hi = half_tr + disc
    if lo < 0.0:
        lo = 0.0
    if hi < 0.0:
        hi = 0.0
    return _plogp(lo) + _plogp(hi)


cdef double _entropy_nxn(double complex* a, int n) noexcept nogil:
    # a holds the n x n block densely; zheevd destroys it.
    cdef double w[MAXD]
    cdef double complex work[MAXD + 1]
    cdef double rwork[MAXD]
    cdef int iwork[1]
    cdef int lda = n, lwork = MAXD + 1, lrwork = MAXD, liwork = 1, info = 0
    cdef char jobz = b'N', uplo = b'L'
    cdef double out = 0.0
    cdef int i
    zheevd(&jobz, &uplo, &n, a, &lda, w, work, &lwork, rwork, &lrwork, iwork, &liwork, &info)
    if info != 0:
        return -1.0
    for i in range(n):
        if w[i] > 0.0:
            out += _plogp(w[i])
    return out


cdef double _measured_mi_one(const double complex[:, :, :, ::1] rho4,
                             const double complex[:, ::1] basis) except? -1.0:
    cdef int d = rho4.shape[0]
    cdef int m = rho4.shape[1]
    cdef int n_out = basis.shape[1]
    if d > MAXD:
        raise ValueError(f"kept dimension {d} exceeds compiled kernel limit {MAXD}")
    cdef double complex kblock[MAXD * MAXD]
    cdef double complex acc, va, vc
    cdef double h_keep, p, ent, total
    cdef int i, j, a, c, o

    # kept-side marginal entropy
    for i in range(d):
        for j in range(d):
            acc = 0.0
            for a in range(m):
                acc = acc + rho4[i, a, j, a]
            kblock[i * d + j] = acc
    if d == 2:
        h_keep = _entropy_2x2(kblock[0].real, kblock[3].real, kblock[1])
    else:
        h_keep = _entropy_nxn(kblock, d)
        if h_keep < 0.0:
            raise RuntimeError("eigenvalue solver failed")

    total = 0.0
    for o in range(n_out):
        p = 0.0
        for i in range(d):
            for j in range(d):
                acc = 0.0
                for a in range(m):
                    va = basis[a, o].conjugate()
                    for c in range(m):
                        acc = acc + va * rho4[i, a, j, c] * basis[c, o]
                kblock[i * d + j] = acc
            p += kblock[i * d + i].real
        if p <= 0.0:
            continue
        if d == 2:
            ent = _entropy_2x2(kblock[0].real, kblock[3].real, kblock[1])
        else:
            ent = _entropy_nxn(kblock, d)
            if ent < 0.0:
                raise RuntimeError("eigenvalue solver failed")
        # sum_o p_o H(K_o / p_o) accumulated as ent(K_o) + p log2 p
        total += ent + p * log2(p)
    return h_keep - total


def measured_mutual_info(rho4, basis):
    rho4 = np.ascontiguousarray(rho4, dtype=np.complex128)
    basis = np.ascontiguousarray(basis, dtype=np.complex128)
    return _measured_mi_one(rho4, basis)


def measured_mutual_info_batch(rho4, bases):
    rho4 = np.ascontiguousarray(rho4, dtype=np.complex128)
    bases = np.ascontiguousarray(bases, dtype=np.complex128)
    cdef Py_ssize_t nb = bases.shape[0]
    out = np.empty(nb, dtype=np.float64)
    cdef double[::1] out_view = out
    cdef const double complex[:, :, ::1] bview = bases
    cdef const double complex[:, :, :, ::1] rview = rho4
    cdef Py_ssize_t b
    for b in range(nb):
        out_view[b] = _measured_mi_one(rview, bview[b])
    return out


def rank_two_entropy_batch(c0, c1, gamma_in, gamma_out):
    gin = np.ascontiguousarray(np.asarray(gamma_in, dtype=np.complex128).ravel())
    gout = np.ascontiguousarray(np.asarray(gamma_out, dtype=np.complex128).ravel())
    if gin.shape[0] != gout.shape[0]:
        raise ValueError("gamma_in and gamma_out must have equal length")
    out = np.empty(gin.shape[0], dtype=np.float64)
    cdef double[::1] out_view = out
    cdef const double complex[::1] gin_view = gin
    cdef const double complex[::1] gout_view = gout
    cdef double complex cc0 = c0, cc1 = c1, cross, g, a01
    cdef double w0 = cc0.real * cc0.real + cc0.imag * cc0.imag
    cdef double w1 = cc1.real * cc1.real + cc1.imag * cc1.imag
    cdef double gabs2, tau, a00, a11
    cdef Py_ssize_t i
    for i in range(gin_view.shape[0]):
        g = gin_view[i]
        cross = cc0 * cc1.conjugate() * gout_view[i]
        gabs2 = g.real * g.real + g.imag * g.imag
        if gabs2 > 1.0:
            gabs2 = 1.0
        tau = sqrt(1.0 - gabs2)
        a00 = w0 + w1 * gabs2 + 2.0 * (cross * g).real
        a11 = w1 * (1.0 - gabs2)
        a01 = w1 * g.conjugate() * tau + cross * tau
        out_view[i] = _entropy_2x2(a00, a11, a01)
    return out


def rank_two_entropy(c0, c1, gamma_in, gamma_out):
    return float(rank_two_entropy_batch(c0, c1, [gamma_in], [gamma_out])[0])
