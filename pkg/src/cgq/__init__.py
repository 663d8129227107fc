"""Coarse-graining channels, averaging assignments and effective dynamics."""
from cgq.assignment import (
    OrbitSeed,
    assign_bns,
    assign_partial_trace,
    canonical_orbit_seed,
    mc_average_bns,
    mc_average_partial_trace,
    orbit_seed,
    orbit_state,
)
from cgq.channels import (
    CoarseGrainingChannel,
    apply_channel,
    bns_channel,
    choi_matrix,
    custom_channel,
    partial_trace_channel,
    verify_cptp,
)
from cgq.discriminate import (
    DiscriminationExperiment,
    TraceSeries,
    helstrom_success,
    run_discrimination,
)
from cgq.dynamics import (
    EffectiveChannelSpec,
    effective_evolve,
    linearity_probe,
    open_system_evolve,
)
from cgq.errors import (
    DimensionError,
    InfeasibleStateError,
    InvalidStateError,
    NotHermitianError,
    PurificationError,
)
from cgq.kernels import BACKEND
from cgq.linalg import (
    HamiltonianSpec,
    herm_eig,
    partial_trace_env,
    tensor,
    trace_distance,
    unitary_at,
    validate_density,
)
from cgq.sampling import SamplerConfig

__version__ = "0.1.0"
