# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels: Jacobi eigensolver and Monte-Carlo block accumulators.

Signatures and semantics match ``cgq._kernels_py``.
"""
import numpy as np

from libc.math cimport atan2, cos, sin, sqrt

cdef extern from "complex.h" nogil:
    double cabs(double complex)
    double creal(double complex)
    double cimag(double complex)
    double complex conj(double complex)

cdef double INV_SQRT3 = 0.57735026918962576451


def jacobi_eigh(h, double tol, int max_sweeps):
    cdef double complex[:, ::1] a = np.array(h, dtype=np.complex128, order="C", copy=True)
    cdef Py_ssize_t n = a.shape[0]
    v_arr = np.eye(n, dtype=np.complex128)
    cdef double complex[:, ::1] v = v_arr
    cdef Py_ssize_t i, p, q
    cdef int sweeps = 0
    cdef double total, off, threshold, mag, theta, c, s
    cdef double complex g, ph, ap, aq, j10, j11

    total = 0.0
    for i in range(n):
        for p in range(n):
            total += cabs(a[i, p]) ** 2
    threshold = tol * max(1.0, sqrt(total))

    with nogil:
        while True:
            off = 0.0
            for i in range(n):
                for p in range(n):
                    if p != i:
                        mag = cabs(a[i, p])
                        off += mag * mag
            off = sqrt(off)
            if not off > threshold or sweeps == max_sweeps:
                break
            for p in range(n - 1):
                for q in range(p + 1, n):
                    g = a[p, q]
                    mag = cabs(g)
                    if mag == 0.0:
                        continue
                    ph = creal(g) / mag + 1j * (cimag(g) / mag)
                    theta = 0.5 * atan2(2.0 * mag, creal(a[q, q]) - creal(a[p, p]))
                    c = cos(theta)
                    s = sin(theta)
                    j10 = -s * conj(ph)
                    j11 = c * conj(ph)
                    # columns: A <- A J
                    for i in range(n):
                        ap = a[i, p]
                        aq = a[i, q]
                        a[i, p] = ap * c + aq * j10
                        a[i, q] = ap * s + aq * j11
                        ap = v[i, p]
                        aq = v[i, q]
                        v[i, p] = ap * c + aq * j10
                        v[i, q] = ap * s + aq * j11
                    # rows: A <- J^dagger A
                    for i in range(n):
                        ap = a[p, i]
                        aq = a[q, i]
                        a[p, i] = c * ap + conj(j10) * aq
                        a[q, i] = s * ap + conj(j11) * aq
                    a[p, q] = 0.0
                    a[q, p] = 0.0
                    a[p, p] = creal(a[p, p])
                    a[q, q] = creal(a[q, q])
            sweeps += 1

    w = np.empty(n, dtype=np.float64)
    for i in range(n):
        w[i] = creal(a[i, i])
    return w, v_arr, sweeps


cdef inline void _rotate(double x0, double x1, double x2, double angle,
                         double* out) noexcept nogil:
    cdef double c = cos(angle)
    cdef double s = sin(angle)
    cdef double along = (x0 + x1 + x2) * INV_SQRT3 * INV_SQRT3 * (1.0 - c)
    out[0] = x0 * c + (x2 - x1) * INV_SQRT3 * s + along
    out[1] = x1 * c + (x0 - x2) * INV_SQRT3 * s + along
    out[2] = x2 * c + (x1 - x0) * INV_SQRT3 * s + along


def orbit_block_sum(v, angles):
    cdef double[::1] vv = np.ascontiguousarray(v, dtype=np.float64)
    cdef double[:, ::1] ang = np.ascontiguousarray(angles, dtype=np.float64)
    out_arr = np.zeros((4, 4), dtype=np.complex128)
    cdef double complex[:, ::1] out = out_arr
    cdef double ra[3]
    cdef double rb[3]
    cdef double complex psi[4]
    cdef Py_ssize_t k, i, j
    with nogil:
        psi[0] = vv[0] + 1j * vv[4]
        for k in range(ang.shape[0]):
            _rotate(vv[1], vv[2], vv[3], ang[k, 0], ra)
            _rotate(vv[5], vv[6], vv[7], ang[k, 1], rb)
            for i in range(3):
                psi[i + 1] = ra[i] + 1j * rb[i]
            for i in range(4):
                for j in range(4):
                    out[i, j] += psi[i] * conj(psi[j])
    return out_arr


def haar_block_sum(psi, gauss):
    cdef double complex[:, ::1] ps = np.ascontiguousarray(psi, dtype=np.complex128)
    cdef double[:, :, :, ::1] gs = np.ascontiguousarray(gauss, dtype=np.float64)
    cdef Py_ssize_t ds = ps.shape[0]
    cdef Py_ssize_t de = ps.shape[1]
    cdef Py_ssize_t dim = ds * de
    out_arr = np.zeros((dim, dim), dtype=np.complex128)
    cdef double complex[:, ::1] out = out_arr
    u_arr = np.empty((de, de), dtype=np.complex128)
    cdef double complex[:, ::1] u = u_arr
    rot_arr = np.empty(dim, dtype=np.complex128)
    cdef double complex[::1] rot = rot_arr
    cdef Py_ssize_t m, i, j, k, col, prev
    cdef double complex proj, acc
    cdef double nrm
    with nogil:
        for m in range(gs.shape[0]):
            for i in range(de):
                for j in range(de):
                    u[i, j] = gs[m, i, j, 0] + 1j * gs[m, i, j, 1]
            # modified Gram-Schmidt on columns; the positive diagonal of R
            # is the phase correction that makes the result Haar distributed
            for col in range(de):
                for prev in range(col):
                    proj = 0.0
                    for i in range(de):
                        proj = proj + conj(u[i, prev]) * u[i, col]
                    for i in range(de):
                        u[i, col] = u[i, col] - proj * u[i, prev]
                nrm = 0.0
                for i in range(de):
                    nrm += creal(u[i, col]) ** 2 + cimag(u[i, col]) ** 2
                nrm = sqrt(nrm)
                for i in range(de):
                    u[i, col] = u[i, col] / nrm
            for i in range(ds):
                for j in range(de):
                    acc = 0.0
                    for k in range(de):
                        acc = acc + ps[i, k] * u[j, k]
                    rot[i * de + j] = acc
            for i in range(dim):
                for j in range(dim):
                    out[i, j] += rot[i] * conj(rot[j])
    return out_arr
