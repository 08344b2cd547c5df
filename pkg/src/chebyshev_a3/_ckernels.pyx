# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops: polynomial evaluation and alcove folding."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, M_PI

cnp.import_array()


def poly_eval(const double[:, :, :, ::1] cube, const double complex[:, ::1] z):
    # sparse: the maps have few nonzero coefficients, so sum terms off power tables
    cdef Py_ssize_t n = z.shape[0]
    cdef int ncomp = cube.shape[0]
    cdef int d = cube.shape[1] - 1
    nz = np.nonzero(np.asarray(cube))
    cdef int[::1] tc = nz[0].astype(np.intc)
    cdef int[::1] ti = nz[1].astype(np.intc)
    cdef int[::1] tj = nz[2].astype(np.intc)
    cdef int[::1] tk = nz[3].astype(np.intc)
    cdef double[::1] coef = np.ascontiguousarray(np.asarray(cube)[nz])
    cdef Py_ssize_t nterms = coef.shape[0]
    out_arr = np.zeros((n, ncomp), dtype=np.complex128)
    cdef double complex[:, ::1] out = out_arr
    pw_arr = np.empty((3, d + 1), dtype=np.complex128)
    cdef double complex[:, ::1] pw = pw_arr
    cdef Py_ssize_t p, t
    cdef int m, i
    for p in range(n):
        for m in range(3):
            pw[m, 0] = 1
            for i in range(1, d + 1):
                pw[m, i] = pw[m, i - 1] * z[p, m]
        for t in range(nterms):
            out[p, tc[t]] += coef[t] * (pw[0, ti[t]] * pw[1, tj[t]] * pw[2, tk[t]])
    return out_arr


def homogeneous_eval(const double[:, :, :, ::1] cube, const double complex[:, ::1] Z):
    # F_c(Z) = sum_e c_e Z1^e1 Z2^e2 Z3^e3 Z0^(d-|e|), F_0 = Z0^d
    cdef Py_ssize_t n = Z.shape[0]
    cdef int d = cube.shape[1] - 1
    out_arr = np.empty((n, 4), dtype=np.complex128)
    cdef double complex[:, ::1] out = out_arr
    pw_arr = np.empty((4, d + 1), dtype=np.complex128)
    cdef double complex[:, ::1] pw = pw_arr
    cdef Py_ssize_t p
    cdef int c, i, j, k, m
    cdef double complex acc, term
    for p in range(n):
        for m in range(4):
            pw[m, 0] = 1
            for i in range(1, d + 1):
                pw[m, i] = pw[m, i - 1] * Z[p, m]
        for c in range(3):
            acc = 0
            for i in range(d + 1):
                for j in range(d + 1 - i):
                    for k in range(d + 1 - i - j):
                        if cube[c, i, j, k] != 0.0:
                            term = pw[0, i] * pw[1, j] * pw[2, k] * pw[3, d - i - j - k]
                            acc = acc + cube[c, i, j, k] * term
            out[p, c] = acc
        out[p, 3] = pw[3, d]
    return out_arr


cdef double R2 = sqrt(2.0)


def fold_batch(const double[:, ::1] s, int budget=1000):
    """Fold each row into the alcove. Returns (points, reflection counts)."""
    cdef Py_ssize_t n = s.shape[0]
    out_arr = np.array(s, dtype=np.float64, copy=True)
    cnt_arr = np.zeros(n, dtype=np.int64)
    cdef double[:, ::1] out = out_arr
    cdef long long[::1] cnt = cnt_arr
    cdef double a[3][3]
    a[0][0] = -1.0 / R2; a[0][1] = -1.0; a[0][2] = 1.0 / R2
    a[1][0] = R2;        a[1][1] = 0.0;  a[1][2] = 0.0
    a[2][0] = -1.0 / R2; a[2][1] = 1.0;  a[2][2] = 1.0 / R2
    cdef Py_ssize_t p
    cdef int it, k, best
    cdef double v, worst, dot
    for p in range(n):
        for it in range(budget + 1):
            # violation of each face, as signed distance outside
            worst = 1e-13
            best = -1
            v = out[p, 2] - M_PI
            if v > worst:
                worst = v
                best = 0
            for k in range(3):
                dot = a[k][0] * out[p, 0] + a[k][1] * out[p, 1] + a[k][2] * out[p, 2]
                v = -dot / R2
                if v > worst:
                    worst = v
                    best = k + 1
            if best < 0:
                break
            if it == budget:
                cnt[p] = -1
                break
            if best == 0:
                out[p, 2] = 2.0 * M_PI - out[p, 2]
            else:
                k = best - 1
                dot = a[k][0] * out[p, 0] + a[k][1] * out[p, 1] + a[k][2] * out[p, 2]
                # |alpha_k|^2 = 2
                out[p, 0] -= dot * a[k][0]
                out[p, 1] -= dot * a[k][1]
                out[p, 2] -= dot * a[k][2]
            cnt[p] += 1
    return out_arr, cnt_arr
