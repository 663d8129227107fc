"""Small dense complex linear algebra and density-matrix utilities.

Matrices are plain ``numpy`` complex arrays. Composite systems use the
first tensor factor as the slow index, so ``|ij>`` sits at row ``i*d_b + j``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from cgq import kernels
from cgq.errors import DimensionError, InvalidStateError, NotHermitianError

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_FLOOR = -1e-10
JACOBI_TOL = 1e-14
JACOBI_MAX_SWEEPS = 100

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
IDENTITY_2 = np.eye(2, dtype=np.complex128)


def as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2:
        raise DimensionError(f"expected a 2-d matrix, got shape {a.shape}")
    return a


def _square(m) -> np.ndarray:
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    return a


def hermiticity_defect(m) -> float:
    a = _square(m)
    return float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of :func:`validate_density`."""

    hermiticity_defect: float
    trace_defect: float
    min_eigenvalue: float
    passed: bool

    def as_dict(self) -> dict:
        return {
            "hermiticity_defect": self.hermiticity_defect,
            "trace_defect": self.trace_defect,
            "min_eigenvalue": self.min_eigenvalue,
            "passed": self.passed,
        }


def validate_density(
    m,
    tol: float = HERMITIAN_TOL,
    psd_floor: float = PSD_FLOOR,
) -> ValidationReport:
    """Check hermiticity, unit trace and positivity of ``m``.

    The minimum eigenvalue is taken from the Hermitian part of ``m`` so the
    report is defined even for inputs that fail the hermiticity check.

    Raises:
        DimensionError: if ``m`` is not square.
    """
    a = _square(m)
    herm = hermiticity_defect(a)
    trace = float(abs(np.trace(a) - 1.0))
    w, _ = herm_eig(0.5 * (a + a.conj().T))
    min_eig = float(w[0])
    passed = herm <= tol and trace <= tol and min_eig >= psd_floor
    return ValidationReport(herm, trace, min_eig, passed)


def density_matrix(m, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Return ``m`` as a complex array after validating it as a state.

    Raises:
        InvalidStateError: if any density-matrix invariant is violated.
    """
    a = _square(m)
    report = validate_density(a, tol=tol)
    if not report.passed:
        raise InvalidStateError(
            "not a valid density matrix: "
            f"hermiticity defect {report.hermiticity_defect:.3g}, "
            f"trace defect {report.trace_defect:.3g}, "
            f"min eigenvalue {report.min_eigenvalue:.3g}"
        )
    return a.copy()


def projector(v) -> np.ndarray:
    """``|v><v|`` for a state vector."""
    v = np.asarray(v, dtype=np.complex128).ravel()
    return np.outer(v, v.conj())


def canonical_phase(v) -> np.ndarray:
    """Normalise ``v`` and rotate its global phase so the first nonzero
    amplitude is real and non-negative."""
    v = np.asarray(v, dtype=np.complex128).ravel()
    norm = np.linalg.norm(v)
    if norm == 0:
        raise InvalidStateError("zero vector has no normalised form")
    v = v / norm
    nz = np.flatnonzero(np.abs(v) > 1e-15)
    lead = v[nz[0]]
    return v * (abs(lead) / lead)


def tensor(a, b) -> np.ndarray:
    """Kronecker product; row ``(i_a, i_b)`` maps to ``i_a * dim_b + i_b``."""
    a = as_matrix(a)
    b = as_matrix(b)
    ra, ca = a.shape
    rb, cb = b.shape
    return np.einsum("ij,kl->ikjl", a, b).reshape(ra * rb, ca * cb)


def partial_trace_env(rho_se, dim_s: int, dim_e: int) -> np.ndarray:
    """Trace out the second (environment) factor of a bipartite operator.

    Raises:
        DimensionError: if ``rho_se`` is not ``dim_s*dim_e`` square.
    """
    a = _square(rho_se)
    if a.shape[0] != dim_s * dim_e:
        raise DimensionError(
            f"operator of dimension {a.shape[0]} does not split as {dim_s}x{dim_e}"
        )
    return np.einsum("ikjk->ij", a.reshape(dim_s, dim_e, dim_s, dim_e))


def herm_eig(h) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a Hermitian matrix by cyclic Jacobi sweeps.

    Returns:
        Ascending real eigenvalues and a unitary whose columns are the
        matching eigenvectors.

    Raises:
        NotHermitianError: if ``h`` deviates from its adjoint by more than
            1e-12 in any entry.
    """
    a = _square(h)
    defect = hermiticity_defect(a)
    if defect > HERMITIAN_TOL:
        raise NotHermitianError(f"matrix is not Hermitian (defect {defect:.3g})")
    a = 0.5 * (a + a.conj().T)
    w, v, _ = kernels.jacobi_eigh(np.ascontiguousarray(a), JACOBI_TOL, JACOBI_MAX_SWEEPS)
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


@dataclass(frozen=True)
class HamiltonianSpec:
    """Hermitian generator of the micro dynamics, with hbar = 1."""

    matrix: np.ndarray = field(repr=False)
    label: str = "custom"

    def __post_init__(self):
        m = _square(self.matrix).copy()
        defect = hermiticity_defect(m)
        if defect > HERMITIAN_TOL:
            raise NotHermitianError(f"Hamiltonian is not Hermitian (defect {defect:.3g})")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def key(self) -> bytes:
        return self.matrix.tobytes()


def local_y() -> HamiltonianSpec:
    return HamiltonianSpec(tensor(IDENTITY_2, SIGMA_Y), "1⊗σy")


def global_y() -> HamiltonianSpec:
    return HamiltonianSpec(
        tensor(IDENTITY_2, SIGMA_Y) + tensor(SIGMA_Y, IDENTITY_2), "σy⊗1 + 1⊗σy"
    )


HAMILTONIAN_PRESETS = {"local-y": local_y, "global-y": global_y}

# single-assignment cache: concurrent fills compute identical values
_eig_cache: dict[bytes, tuple[np.ndarray, np.ndarray]] = {}
_propagator_cache: dict[tuple[bytes, float], np.ndarray] = {}
_CACHE_LIMIT = 4096


def _spectrum(h: HamiltonianSpec):
    k = h.key()
    hit = _eig_cache.get(k)
    if hit is None:
        hit = herm_eig(h.matrix)
        if len(_eig_cache) < _CACHE_LIMIT:
            _eig_cache.setdefault(k, hit)
    return hit


def unitary_at(h, t: float) -> np.ndarray:
    """Propagator ``exp(-i H t)`` built from the spectral decomposition of ``H``.

    ``t`` is the dimensionless product of frequency and time.
    """
    if not isinstance(h, HamiltonianSpec):
        h = HamiltonianSpec(h)
    key = (h.key(), float(t))
    u = _propagator_cache.get(key)
    if u is not None:
        return u
    w, v = _spectrum(h)
    u = (v * np.exp(-1j * w * float(t))) @ v.conj().T
    u.setflags(write=False)
    if len(_propagator_cache) < _CACHE_LIMIT:
        _propagator_cache.setdefault(key, u)
    return u


def conjugate(u, x) -> np.ndarray:
    """``U X U^dagger``."""
    return u @ x @ u.conj().T


def trace_distance(a, b) -> float:
    """Half the trace norm of ``a - b``.

    Raises:
        DimensionError: if the shapes differ.
    """
    a = _square(a)
    b = _square(b)
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch {a.shape} vs {b.shape}")
    diff = a - b
    w, _ = herm_eig(0.5 * (diff + diff.conj().T))
    return float(0.5 * np.sum(np.abs(w)))
