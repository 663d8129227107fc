"""Effective coarse-grained dynamics ``Gamma_t = Lambda . U_t . A_Lambda``."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from cgq.assignment import (
    assign_bns,
    assign_partial_trace,
    mc_average_bns,
    mc_average_partial_trace,
)
from cgq.channels import BNS, PARTIAL_TRACE, CoarseGrainingChannel, apply_channel
from cgq.errors import DimensionError
from cgq.linalg import HamiltonianSpec, conjugate, partial_trace_env, tensor, unitary_at
from cgq.sampling import SamplerConfig


@dataclass(frozen=True)
class EffectiveChannelSpec:
    """Coarse-graining, assignment method and micro Hamiltonian.

    ``sampler`` selects the Monte-Carlo assigner; ``None`` uses the closed form.
    """

    channel: CoarseGrainingChannel
    hamiltonian: HamiltonianSpec
    sampler: SamplerConfig | None = None

    def __post_init__(self):
        if self.hamiltonian.dim != self.channel.dim_in:
            raise DimensionError(
                f"Hamiltonian dimension {self.hamiltonian.dim} != channel input "
                f"dimension {self.channel.dim_in}"
            )
        if self.channel.kind not in (BNS, PARTIAL_TRACE):
            raise ValueError(f"no averaging assignment for channel kind {self.channel.kind!r}")


def assign(spec: EffectiveChannelSpec, rho) -> np.ndarray:
    """``A_Lambda[rho]`` for the configured channel and assigner."""
    ch = spec.channel
    if ch.kind == PARTIAL_TRACE:
        if spec.sampler is None:
            return assign_partial_trace(rho, ch.dim_e)
        return mc_average_partial_trace(rho, ch.dim_e, spec.sampler)
    if spec.sampler is None:
        return assign_bns(rho)
    return mc_average_bns(rho, spec.sampler)


def evolve_assigned(spec: EffectiveChannelSpec, micro, t: float) -> np.ndarray:
    """``Lambda[U_t micro U_t^dagger]`` for an already assigned micro state."""
    return apply_channel(spec.channel, conjugate(unitary_at(spec.hamiltonian, t), micro))


def effective_evolve(spec: EffectiveChannelSpec, rho0, t: float) -> np.ndarray:
    """Evolve a macro state through ``Gamma_t``; ``t`` is the dimensionless time."""
    return evolve_assigned(spec, assign(spec, rho0), t)


def open_system_evolve(rho0, h_se: HamiltonianSpec, dim_e: int, t: float) -> np.ndarray:
    """``tr_E[U_t (rho0 (x) 1/d_E) U_t^dagger]``."""
    if not isinstance(h_se, HamiltonianSpec):
        h_se = HamiltonianSpec(h_se)
    rho0 = np.asarray(rho0, dtype=np.complex128)
    dim_s = rho0.shape[0]
    if h_se.dim != dim_s * dim_e:
        raise DimensionError(
            f"Hamiltonian dimension {h_se.dim} != {dim_s} x {dim_e}"
        )
    joint = tensor(rho0, np.eye(dim_e) / dim_e)
    return partial_trace_env(conjugate(unitary_at(h_se, t), joint), dim_s, dim_e)


def linearity_probe(spec: EffectiveChannelSpec, rho, chi, alpha: float, t: float) -> float:
    """Max-entry gap between ``Gamma_t`` of a mixture and the mixture of images."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    rho = np.asarray(rho, dtype=np.complex128)
    chi = np.asarray(chi, dtype=np.complex128)
    mixed = effective_evolve(spec, alpha * rho + (1.0 - alpha) * chi, t)
    if alpha == 1.0:
        separate = effective_evolve(spec, rho, t)
    else:
        separate = alpha * effective_evolve(spec, rho, t) + (1.0 - alpha) * effective_evolve(
            spec, chi, t
        )
    return float(np.max(np.abs(mixed - separate)))


def default_grid(t_min: float = 0.0, t_max: float = 2 * np.pi, steps: int = 200) -> np.ndarray:
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if steps == 1:
        return np.array([float(t_min)])
    return np.linspace(t_min, t_max, steps)
