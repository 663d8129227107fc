"""Numpy implementations of the numerical kernels.

These mirror the compiled routines in ``_kernels.pyx`` one to one and are
used whenever the extension is unavailable or ``CGQ_PURE_PYTHON`` is set.
"""
import math

import numpy as np

_INV_SQRT3 = 1.0 / math.sqrt(3.0)


def jacobi_eigh(h, tol, max_sweeps):
    """Cyclic Jacobi diagonalisation of a complex Hermitian matrix.

    Returns ``(eigenvalues, eigenvectors, sweeps)`` with eigenvalues in
    sweep order (unsorted); eigenvectors are the columns of the second item.
    """
    a = np.array(h, dtype=np.complex128, copy=True)
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)
    threshold = tol * max(1.0, float(np.sqrt(np.sum(np.abs(a) ** 2))))
    sweeps = 0
    for sweeps in range(max_sweeps + 1):
        off = np.sqrt(np.sum(np.abs(a[~np.eye(n, dtype=bool)]) ** 2))
        if not off > threshold or sweeps == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                g = a[p, q]
                mag = abs(g)
                if mag == 0.0:
                    continue
                phase = complex(g.real / mag, g.imag / mag)
                theta = 0.5 * math.atan2(2.0 * mag, a[q, q].real - a[p, p].real)
                c, s = math.cos(theta), math.sin(theta)
                # J = D R, D = diag(1, conj(phase)) on (p, q)
                j = np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ j
                a[idx, :] = j.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                v[:, idx] = v[:, idx] @ j
    return np.diag(a).real.copy(), v, sweeps


def _rotate_about_diagonal(x, angle):
    # Rodrigues rotation of rows of x (m, 3) about (1,1,1)/sqrt(3)
    c = np.cos(angle)[:, None]
    s = np.sin(angle)[:, None]
    total = x.sum(axis=1, keepdims=True)
    along = total * _INV_SQRT3
    cross = np.stack(
        [x[:, 2] - x[:, 1], x[:, 0] - x[:, 2], x[:, 1] - x[:, 0]], axis=1
    ) * _INV_SQRT3
    return x * c + cross * s + along * _INV_SQRT3 * (1.0 - c)


def orbit_block_sum(v, angles):
    """Sum of projectors ``Y O(theta, phi) V`` over rows of ``angles``.

    Args:
        v: length-8 real vector ``(a00, a01, a10, a11, b00, b01, b10, b11)``.
        angles: ``(m, 2)`` array of ``(theta, phi)`` pairs.
    """
    m = angles.shape[0]
    a = _rotate_about_diagonal(np.broadcast_to(v[1:4], (m, 3)), angles[:, 0])
    b = _rotate_about_diagonal(np.broadcast_to(v[5:8], (m, 3)), angles[:, 1])
    psi = np.empty((m, 4), dtype=np.complex128)
    psi[:, 0] = v[0] + 1j * v[4]
    psi[:, 1:] = a + 1j * b
    return np.einsum("ki,kj->ij", psi, psi.conj())


def haar_unitaries(gauss):
    """Haar unitaries from ``(m, d, d, 2)`` standard normals (real, imag)."""
    z = gauss[..., 0] + 1j * gauss[..., 1]
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r, axis1=1, axis2=2)
    return q * (diag / np.abs(diag))[:, None, :]


def haar_block_sum(psi, gauss):
    """Sum of ``(1 x U) psi (1 x U)^dagger`` for Haar ``U`` on the second factor.

    Args:
        psi: ``(d_s, d_e)`` coefficient matrix of the bipartite pure state.
        gauss: ``(m, d_e, d_e, 2)`` standard normals feeding the sampler.
    """
    u = haar_unitaries(gauss)
    # (1 x U)|psi> has coefficients psi @ U^T
    rotated = np.einsum("ik,mjk->mij", psi, u).reshape(gauss.shape[0], -1)
    return np.einsum("ki,kj->ij", rotated, rotated.conj())
