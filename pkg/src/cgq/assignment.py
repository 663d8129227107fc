"""Averaging assignment maps from macro states back to micro states.

Two coarse-grainings are covered: the environment partial trace and the
blurred-and-saturated (BnS) detector. Each has a closed form. Each also has a
Monte-Carlo estimator that averages over compatible pure micro states. For
the partial trace these are Haar-rotated purifications. For BnS they are
orbits of a seed vector under rotations about ``(1,1,1)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from cgq import kernels
from cgq.channels import apply_channel, bns_channel
from cgq.errors import DimensionError, InfeasibleStateError, PurificationError
from cgq.linalg import density_matrix, herm_eig, projector, tensor
from cgq.sampling import MCEstimate, SamplerConfig, accumulate

SQRT3 = math.sqrt(3.0)
RADICAND_TOL = 1e-12
RANK_TOL = 1e-12

DIAGONAL = np.ones(3) / SQRT3
CANONICAL_PERP = np.array([1.0, -1.0, 0.0]) / math.sqrt(2.0)


def _qubit_state(rho) -> np.ndarray:
    r = density_matrix(rho)
    if r.shape != (2, 2):
        raise DimensionError(f"expected a qubit density matrix, got {r.shape}")
    return r


def _feasible_coherence(r00: float, r01: complex, r11: float) -> complex:
    """Coherence of the closest BnS-compatible state, or raise.

    Compatibility needs ``|rho01|^2 <= rho00 rho11``. Rounding can break this
    for valid states near the boundary, so the coherence is shrunk onto the
    boundary when that moves it by at most ``RADICAND_TOL``.
    """
    if r00 <= 0.0:
        if abs(r01) > RADICAND_TOL:
            raise InfeasibleStateError("rho00 == 0 requires rho01 == 0")
        return 0j
    q = abs(r01) ** 2 / r00
    if q <= r11:
        return r01
    f = math.sqrt(max(r11, 0.0) / q)
    if abs(r01) * (1.0 - f) > RADICAND_TOL:
        raise InfeasibleStateError(f"no compatible pure state (|rho01|^2/rho00 - rho11 = {q - r11:.3g})")
    return r01 * f


def assign_partial_trace(rho_s, dim_e: int) -> np.ndarray:
    """``rho_S (x) 1/d_E``: the average over all purifications of ``rho_S``."""
    if dim_e < 1:
        raise DimensionError("dim_e must be >= 1")
    r = density_matrix(rho_s)
    return tensor(r, np.eye(dim_e) / dim_e)


def assign_bns(rho) -> np.ndarray:
    """Closed-form BnS averaging assignment of a qubit state.

    Coherences inside the excited subspace carry the nonlinear term
    ``|rho01|^2 / (2 rho00) - rho11 / 6``; at ``rho00 == 0`` (where
    positivity forces ``rho01 == 0``) the first part is taken as zero.

    Raises:
        InvalidStateError: if ``rho`` is not a valid qubit state.
        InfeasibleStateError: if no compatible pure state lies within
            1e-12 of ``rho``, e.g. ``rho00 == 0`` while ``rho01 != 0``.
    """
    r = _qubit_state(rho)
    r00 = float(r[0, 0].real)
    r11 = float(r[1, 1].real)
    r01 = _feasible_coherence(r00, complex(r[0, 1]), r11)
    nonlinear = abs(r01) ** 2 / (2.0 * r00) if r00 > 0.0 else 0.0
    out = np.full((4, 4), nonlinear - r11 / 6.0, dtype=np.complex128)
    out[0, 0] = r00
    out[0, 1:] = r01 / SQRT3
    out[1:, 0] = r01.conjugate() / SQRT3
    out[[1, 2, 3], [1, 2, 3]] = r11 / 3.0
    return out


@dataclass(frozen=True)
class OrbitSeed:
    """A pure two-qubit state whose BnS image is ``rho``.

    ``vector`` holds the real coordinates
    ``(a00, a01, a10, a11, b00, b01, b10, b11)`` with ``c_ij = a_ij + i b_ij``.
    The excited parts decompose as ``a = (s_a/3)(1,1,1) + r_a u`` and
    ``b = (s_b/3)(1,1,1) + r_b w`` with ``u, w`` unit vectors orthogonal to
    ``(1,1,1)``.
    """

    rho: np.ndarray = field(repr=False)
    vector: np.ndarray = field(repr=False)
    a00: float
    s_a: float
    r_a: float
    s_b: float
    r_b: float

    @property
    def base_vector(self) -> np.ndarray:
        return self.vector[:4] + 1j * self.vector[4:]


def _perp_unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    v = v - DIAGONAL * (DIAGONAL @ v)
    n = np.linalg.norm(v)
    if n < 1e-12:
        raise ValueError("direction must have a component orthogonal to (1,1,1)")
    return v / n


def orbit_seed(rho, u=CANONICAL_PERP, w=CANONICAL_PERP, split: float = 0.0) -> OrbitSeed:
    """Build a compatible seed with a chosen in-plane geometry.

    Args:
        rho: target qubit state.
        u: direction of the real excited component orthogonal to ``(1,1,1)``.
        w: same for the imaginary excited component.
        split: angle distributing the orthogonal norm, ``r_a = r cos(split)``
            and ``r_b = r sin(split)``.

    Raises:
        InfeasibleStateError: if no compatible pure state exists.
    """
    r = _qubit_state(rho)
    r00 = max(float(r[0, 0].real), 0.0)
    r11 = float(r[1, 1].real)
    r01 = _feasible_coherence(r00, complex(r[0, 1]), r11)
    a00 = math.sqrt(r00)
    if a00 > 0.0:
        s_a = SQRT3 * r01.real / a00
        s_b = -SQRT3 * r01.imag / a00
        radicand = r11 - abs(r01) ** 2 / r00
    else:
        s_a = s_b = 0.0
        radicand = r11
    radius = math.sqrt(max(radicand, 0.0))
    r_a = radius * math.cos(split)
    r_b = radius * math.sin(split)
    a = (s_a / 3.0) * np.ones(3) + r_a * _perp_unit(u)
    b = (s_b / 3.0) * np.ones(3) + r_b * _perp_unit(w)
    vector = np.concatenate([[a00], a, [0.0], b])
    return OrbitSeed(r, vector, a00, s_a, r_a, s_b, r_b)


def canonical_orbit_seed(rho) -> OrbitSeed:
    """Seed with ``u = (1,-1,0)/sqrt(2)`` and all orthogonal norm in ``r_a``."""
    return orbit_seed(rho)


def seed_from_vector(psi, rho=None) -> OrbitSeed:
    """Wrap an arbitrary compatible pure state (any global phase) as a seed.

    Raises:
        InfeasibleStateError: if the BnS image of ``psi`` differs from
            ``rho`` by more than 1e-12.
    """
    psi = np.asarray(psi, dtype=np.complex128).ravel()
    psi = psi / np.linalg.norm(psi)
    image = apply_channel(bns_channel(), projector(psi))
    if rho is None:
        rho = image
    r = _qubit_state(rho)
    if np.max(np.abs(image - r)) > 1e-12:
        raise InfeasibleStateError("vector is not compatible with rho")
    vector = np.concatenate([psi.real, psi.imag])
    a, b = vector[1:4], vector[5:8]
    s_a, s_b = float(a.sum()), float(b.sum())
    r_a = float(np.linalg.norm(a - s_a / 3.0))
    r_b = float(np.linalg.norm(b - s_b / 3.0))
    return OrbitSeed(r, vector, float(abs(psi[0])), s_a, r_a, s_b, r_b)


def _rotation_about_diagonal(angle: float) -> np.ndarray:
    k = np.array(
        [[0.0, -1.0, 1.0], [1.0, 0.0, -1.0], [-1.0, 1.0, 0.0]]
    ) / SQRT3
    return np.eye(3) + math.sin(angle) * k + (1.0 - math.cos(angle)) * (k @ k)


def orbit_rotation(theta: float, phi: float) -> np.ndarray:
    """The 8x8 block rotation ``1 (+) R(theta) (+) 1 (+) R(phi)``."""
    o = np.eye(8)
    o[1:4, 1:4] = _rotation_about_diagonal(theta)
    o[5:8, 5:8] = _rotation_about_diagonal(phi)
    return o


def orbit_state(seed: OrbitSeed, theta: float, phi: float) -> np.ndarray:
    """Rotate the seed's real and imaginary excited parts about ``(1,1,1)``."""
    v = orbit_rotation(theta, phi) @ seed.vector
    return v[:4] + 1j * v[4:]


def mc_estimate_bns(rho, cfg: SamplerConfig, seed: OrbitSeed | None = None) -> MCEstimate:
    """Monte-Carlo orbit average with uniform ``theta, phi`` on ``[0, 2 pi)``."""
    if seed is None:
        seed = canonical_orbit_seed(rho)
    v = np.ascontiguousarray(seed.vector)

    def block(rng, count):
        angles = rng.random((count, 2)) * (2.0 * math.pi)
        return kernels.orbit_block_sum(v, angles)

    return accumulate(block, cfg)


def mc_average_bns(rho, cfg: SamplerConfig, seed: OrbitSeed | None = None) -> np.ndarray:
    return mc_estimate_bns(rho, cfg, seed).mean


def purification(rho_s, dim_e: int) -> np.ndarray:
    """Spectral purification ``sum_i sqrt(l_i) |v_i>|i>`` as a ``(d_S, d_E)``
    coefficient matrix.

    Raises:
        PurificationError: if ``rank(rho_s) > dim_e``.
    """
    r = density_matrix(rho_s)
    w, v = herm_eig(r)
    order = np.argsort(w)[::-1]
    w, v = np.clip(w[order], 0.0, None), v[:, order]
    rank = int(np.sum(w > RANK_TOL))
    if rank > dim_e:
        raise PurificationError(f"rank {rank} state cannot be purified with d_E = {dim_e}")
    coeffs = np.zeros((r.shape[0], dim_e), dtype=np.complex128)
    keep = min(dim_e, r.shape[0])
    coeffs[:, :keep] = v[:, :keep] * np.sqrt(w[:keep])
    return coeffs


def mc_estimate_partial_trace(rho_s, dim_e: int, cfg: SamplerConfig) -> MCEstimate:
    """Average of ``(1 x U) psi (1 x U)^dagger`` over Haar ``U`` on the environment."""
    psi = np.ascontiguousarray(purification(rho_s, dim_e))

    def block(rng, count):
        return kernels.haar_block_sum(psi, rng.standard_normal((count, dim_e, dim_e, 2)))

    return accumulate(block, cfg)


def mc_average_partial_trace(rho_s, dim_e: int, cfg: SamplerConfig) -> np.ndarray:
    return mc_estimate_partial_trace(rho_s, dim_e, cfg).mean
