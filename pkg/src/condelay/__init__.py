"""Exact delay stability bounds for linear consensus networks.

Agents with identical LTI dynamics exchange state over an undirected graph
with one constant communication delay. The graph Laplacian decouples the
network into low-order delayed subsystems; counting their imaginary-axis
root crossings over the delay axis yields the exact consensus delay bound
and the full stability map. A deterministic DDE integrator cross-validates
the map empirically.
"""

from .config import ProblemConfig, default_step, fixture_path, load_config
from .ctcr import (
    AcePolynomial,
    CrossingPoint,
    LaurentMatrix,
    build_ace,
    characteristic_residual,
    crossing_frequencies,
    kernel_points,
    kron_sum,
    offspring,
    root_tendency,
    unit_circle_roots,
)
from .errors import (
    AsymmetricError,
    CondelayError,
    ConfigError,
    DecompositionFailedError,
    DegenerateAceError,
    DimensionMismatchError,
    DisconnectedError,
    HurwitzWarning,
    MarginalAtZeroError,
    MixedSizesError,
    NegativeWeightError,
    NoImaginaryRootError,
    NonFiniteStateWarning,
    NonSquareError,
    NonzeroDiagonalError,
    StaticRootWarning,
    TangentialCrossingError,
    TooShortError,
    TopologyError,
)
from .graphs import (
    AgentDynamics,
    SpectralDecomposition,
    Subsystem,
    Topology,
    build_topology,
    decouple,
    is_connected,
    spectral_decompose,
    transform_state,
)
from .sim import (
    BACKEND,
    SimConfig,
    Trajectory,
    classify,
    disagreement_norms,
    envelope_ratio,
    simulate_full,
    simulate_subsystem,
    stepper_backend,
)
from .stability import (
    StabilityMap,
    analyze_network,
    build_map,
    delay_bound,
    nu_at_zero,
    switching_bound,
    switching_subsystems,
)

__version__ = "0.1.0"

__all__ = [
    "AcePolynomial",
    "AgentDynamics",
    "AsymmetricError",
    "BACKEND",
    "CondelayError",
    "ConfigError",
    "CrossingPoint",
    "DecompositionFailedError",
    "DegenerateAceError",
    "DimensionMismatchError",
    "DisconnectedError",
    "HurwitzWarning",
    "LaurentMatrix",
    "MarginalAtZeroError",
    "MixedSizesError",
    "NegativeWeightError",
    "NoImaginaryRootError",
    "NonFiniteStateWarning",
    "NonSquareError",
    "NonzeroDiagonalError",
    "ProblemConfig",
    "SimConfig",
    "SpectralDecomposition",
    "StabilityMap",
    "StaticRootWarning",
    "Subsystem",
    "TangentialCrossingError",
    "TooShortError",
    "Topology",
    "Trajectory",
    "analyze_network",
    "build_ace",
    "build_map",
    "build_topology",
    "characteristic_residual",
    "classify",
    "crossing_frequencies",
    "decouple",
    "default_step",
    "delay_bound",
    "disagreement_norms",
    "envelope_ratio",
    "fixture_path",
    "is_connected",
    "kernel_points",
    "kron_sum",
    "load_config",
    "nu_at_zero",
    "offspring",
    "root_tendency",
    "simulate_full",
    "simulate_subsystem",
    "spectral_decompose",
    "stepper_backend",
    "switching_bound",
    "switching_subsystems",
    "transform_state",
    "unit_circle_roots",
]
