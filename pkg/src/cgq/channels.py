"""Coarse-graining channels stored as basis-action tables.

A channel from ``D``-dimensional to ``d``-dimensional operators is kept as
the array ``table[i, j] = Lambda[|i><j|]`` of shape ``(D, D, d, d)``; its
action on any operator follows by linearity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from cgq.errors import DimensionError, NotHermitianError
from cgq.linalg import PSD_FLOOR, as_matrix, herm_eig, hermiticity_defect

TP_TOL = 1e-12

PARTIAL_TRACE = "partial-trace"
BNS = "bns"
CUSTOM = "custom"


@dataclass(frozen=True)
class CoarseGrainingChannel:
    dim_in: int
    dim_out: int
    kind: str
    table: np.ndarray = field(repr=False)
    dim_s: int | None = None
    dim_e: int | None = None

    def __post_init__(self):
        t = np.array(self.table, dtype=np.complex128)
        expected = (self.dim_in, self.dim_in, self.dim_out, self.dim_out)
        if t.shape != expected:
            raise DimensionError(f"table shape {t.shape} != {expected}")
        t.setflags(write=False)
        object.__setattr__(self, "table", t)

    def __call__(self, x) -> np.ndarray:
        return apply_channel(self, x)


def partial_trace_channel(dim_s: int, dim_e: int) -> CoarseGrainingChannel:
    """``tr_E`` on ``H_S (x) H_E`` as a channel."""
    t = np.zeros((dim_s, dim_e, dim_s, dim_e, dim_s, dim_s), dtype=np.complex128)
    for s in range(dim_s):
        for s2 in range(dim_s):
            for e in range(dim_e):
                t[s, e, s2, e, s, s2] = 1.0
    d = dim_s * dim_e
    return CoarseGrainingChannel(
        d, dim_s, PARTIAL_TRACE, t.reshape(d, d, dim_s, dim_s), dim_s, dim_e
    )


def bns_channel() -> CoarseGrainingChannel:
    """Blurred-and-saturated detector map from two qubits to one.

    The ground state ``|00>`` maps to ``|0>``, the three excited basis
    states all map to ``|1>``, ground/excited coherences shrink by
    ``1/sqrt(3)`` and coherences inside the excited subspace vanish.
    """
    t = np.zeros((4, 4, 2, 2), dtype=np.complex128)
    g = 1.0 / math.sqrt(3.0)
    t[0, 0, 0, 0] = 1.0
    for k in (1, 2, 3):
        t[0, k, 0, 1] = g
        t[k, 0, 1, 0] = g
        t[k, k, 1, 1] = 1.0
    return CoarseGrainingChannel(4, 2, BNS, t)


def custom_channel(table) -> CoarseGrainingChannel:
    """Wrap an arbitrary ``(D, D, d, d)`` basis-action table, unverified."""
    t = np.asarray(table, dtype=np.complex128)
    if t.ndim != 4 or t.shape[0] != t.shape[1] or t.shape[2] != t.shape[3]:
        raise DimensionError(f"basis-action table must be (D, D, d, d), got {t.shape}")
    return CoarseGrainingChannel(t.shape[0], t.shape[2], CUSTOM, t)


def channel_from_function(
    fn: Callable[[np.ndarray], np.ndarray], dim_in: int, dim_out: int
) -> CoarseGrainingChannel:
    """Tabulate a linear map by evaluating it on every ``|i><j|``."""
    t = np.zeros((dim_in, dim_in, dim_out, dim_out), dtype=np.complex128)
    for i in range(dim_in):
        for j in range(dim_in):
            e = np.zeros((dim_in, dim_in), dtype=np.complex128)
            e[i, j] = 1.0
            t[i, j] = fn(e)
    return custom_channel(t)


def channel_by_name(name: str, dim_e: int = 2, dim_s: int = 2) -> CoarseGrainingChannel:
    if name == PARTIAL_TRACE:
        return partial_trace_channel(dim_s, dim_e)
    if name == BNS:
        return bns_channel()
    raise ValueError(f"unknown channel {name!r}; expected 'partial-trace' or 'bns'")


def apply_channel(ch: CoarseGrainingChannel, x) -> np.ndarray:
    """Apply ``ch`` to an arbitrary ``dim_in`` square operator."""
    a = as_matrix(x)
    if a.shape != (ch.dim_in, ch.dim_in):
        raise DimensionError(
            f"channel expects {ch.dim_in}x{ch.dim_in} input, got {a.shape[0]}x{a.shape[1]}"
        )
    return np.einsum("ij,ijkl->kl", a, ch.table)


def choi_matrix(ch: CoarseGrainingChannel) -> np.ndarray:
    """``sum_ij |i><j| (x) Lambda[|i><j|]``, of size ``dim_in*dim_out``."""
    n = ch.dim_in * ch.dim_out
    return ch.table.transpose(0, 2, 1, 3).reshape(n, n)


@dataclass(frozen=True)
class CPTPReport:
    tp_defect: float
    choi_min_eigenvalue: float
    choi_hermiticity_defect: float
    passed: bool

    def as_dict(self) -> dict:
        return {
            "tp_defect": self.tp_defect,
            "choi_min_eigenvalue": self.choi_min_eigenvalue,
            "choi_hermiticity_defect": self.choi_hermiticity_defect,
            "passed": self.passed,
        }


def verify_cptp(
    ch: CoarseGrainingChannel, tol: float = TP_TOL, psd_floor: float = PSD_FLOOR
) -> CPTPReport:
    """Trace-preservation defect and Choi positivity of ``ch``.

    A non-Hermitian Choi matrix cannot be CP; the reported eigenvalue is then
    that of its Hermitian part.
    """
    traces = np.einsum("ijkk->ij", ch.table)
    tp = float(np.max(np.abs(traces - np.eye(ch.dim_in))))
    choi = choi_matrix(ch)
    herm = hermiticity_defect(choi)
    try:
        w, _ = herm_eig(choi)
    except NotHermitianError:
        w, _ = herm_eig(0.5 * (choi + choi.conj().T))
    min_eig = float(w[0])
    passed = tp <= tol and herm <= tol and min_eig >= psd_floor
    return CPTPReport(tp, min_eig, herm, passed)
