"""D-subdivision of the delay axis and the exact consensus delay bound.

Crossings from all disagreement subsystems are merged on the delay axis.
Starting from the unstable-root count at zero delay, every crossing with
tendency +1 adds one conjugate pair per subsystem copy (2 * multiplicity
roots) and every crossing with tendency -1 removes one.  Intervals where the
count is zero are the stable pockets; the consensus delay bound is the right
endpoint of the pocket that contains tau = 0+.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ctcr import CrossingPoint, kernel_points, offspring
from .errors import (
    DisconnectedError,
    MarginalAtZeroError,
    MixedSizesError,
    NegativeNuInternalError,
)
from .graphs import AgentDynamics, Subsystem, Topology, decouple, is_connected, spectral_decompose

MERGE_TOL = 1e-9  # coincident crossings from different subsystems collapse to one net step


@dataclass(frozen=True)
class StabilityMap:
    """Piecewise-constant unstable-root count NU over the delay axis.

    ``nu_steps`` are ``(tau_start, tau_end, nu)`` segments covering
    ``[0, tau_max]``; ``stable_pockets`` are the NU = 0 segments.
    ``delay_bound`` is exact: stability is lost *at* the bound (the pocket is
    right-open), and it is ``math.inf`` when no crossing exists at all.
    ``binding_lambda`` is the Laplacian eigenvalue whose crossing sets the
    bound, or None when the bound is 0 or infinite.
    """

    crossings: tuple[CrossingPoint, ...]
    nu_at_zero: int
    nu_steps: tuple[tuple[float, float, int], ...]
    stable_pockets: tuple[tuple[float, float], ...]
    delay_bound: float
    binding_lambda: float | None
    tau_max: float


def nu_at_zero(subsystems: list[Subsystem]) -> int:
    """Unstable characteristic roots of the delay-free closed loop.

    Sums ``multiplicity * #{Re > 0 eigenvalues of A + C}`` over subsystems.
    An eigenvalue within 1e-9 of the imaginary axis makes the starting count
    ill-defined and raises :class:`MarginalAtZeroError`.
    """
    total = 0
    for sub in subsystems:
        eigs = np.linalg.eigvals(sub.a_matrix + sub.c_matrix)
        if np.any(np.abs(eigs.real) < 1e-9):
            raise MarginalAtZeroError(
                f"subsystem lambda={sub.lam:.6g} has an eigenvalue on the imaginary "
                "axis at zero delay; the D-subdivision start count is undefined"
            )
        total += sub.multiplicity * int(np.sum(eigs.real > 0))
    return total


def build_map(subsystems: list[Subsystem], tau_max: float | None = None, *,
              unit_tol: float = 1e-6) -> StabilityMap:
    """Assemble the full stability map of a set of disagreement subsystems.

    ``tau_max`` defaults to four times the largest kernel delay, which is
    enough to expose any secondary stable pocket.  The delay bound itself
    does not depend on the truncation: the earliest crossing is always a
    kernel point, and kernels are computed exhaustively.
    """
    nu0 = nu_at_zero(subsystems)
    per_sub_kernels = [kernel_points(sub, unit_tol=unit_tol) for sub in subsystems]
    kernels: list[CrossingPoint] = [pt for kern in per_sub_kernels for pt in kern]

    if not kernels:
        bound = 0.0 if nu0 > 0 else math.inf
        pockets = ((0.0, math.inf),) if nu0 == 0 else ()
        return StabilityMap(
            crossings=(),
            nu_at_zero=nu0,
            nu_steps=((0.0, math.inf, nu0),),
            stable_pockets=pockets,
            delay_bound=bound,
            binding_lambda=None,
            tau_max=math.inf if tau_max is None else tau_max,
        )

    if tau_max is None:
        tau_max = 4.0 * max(pt.tau for pt in kernels)
    if tau_max <= 0:
        raise ValueError(f"tau_max must be positive, got {tau_max}")

    all_points: list[CrossingPoint] = []
    for kern in per_sub_kernels:
        all_points.extend(offspring(kern, tau_max))
    all_points = sorted((pt for pt in all_points if pt.tau <= tau_max),
                        key=lambda pt: (pt.tau, pt.lam, pt.omega))

    # merge crossings coincident on the delay axis into one net NU step
    merged: list[tuple[float, int, list[CrossingPoint]]] = []
    for pt in all_points:
        step = 2 * pt.multiplicity * pt.rt
        if merged and pt.tau - merged[-1][0] < MERGE_TOL:
            merged[-1] = (merged[-1][0], merged[-1][1] + step, merged[-1][2] + [pt])
        else:
            merged.append((pt.tau, step, [pt]))

    steps: list[tuple[float, float, int]] = []
    nu = nu0
    prev = 0.0
    for tau_c, dnu, _pts in merged:
        steps.append((prev, tau_c, nu))
        nu += dnu
        if nu < 0:
            raise NegativeNuInternalError(
                f"unstable-root count {nu} < 0 after the crossing at tau={tau_c:.6g}; "
                "a crossing was missed"
            )
        prev = tau_c
    steps.append((prev, tau_max, nu))

    pockets = tuple((a, b) for a, b, count in steps if count == 0 and b > a)

    first_kernel = min(kernels, key=lambda pt: pt.tau)
    if nu0 > 0:
        bound, binding = 0.0, None
    else:
        bound, binding = first_kernel.tau, first_kernel.lam

    return StabilityMap(
        crossings=tuple(all_points),
        nu_at_zero=nu0,
        nu_steps=tuple(steps),
        stable_pockets=pockets,
        delay_bound=bound,
        binding_lambda=binding,
        tau_max=tau_max,
    )


def delay_bound(stab_map: StabilityMap) -> tuple[float, float | None]:
    """The exact consensus delay bound and the eigenvalue that sets it."""
    return stab_map.delay_bound, stab_map.binding_lambda


def switching_subsystems(dynamics: AgentDynamics, topologies: list[Topology]) -> list[Subsystem]:
    """Disagreement subsystems for the union of eigenvalues over a topology set.

    Every topology must be connected and share the agent count.  The distinct
    nonzero Laplacian eigenvalues of all topologies are pooled (deduplicated
    to 1e-8) and one subsystem is built per pooled eigenvalue.  Multiplicity
    bookkeeping is per-value here (1 each): the pooled NU count is a union
    artifact, but pocket boundaries, which is what the bound needs, do not
    depend on it.
    """
    if not topologies:
        raise ValueError("at least one topology is required")
    n = topologies[0].n
    pooled: list[float] = []
    for topo in topologies:
        if topo.n != n:
            raise MixedSizesError(f"topology sizes differ: {topo.n} != {n}")
        decomp = spectral_decompose(topo)
        if not is_connected(decomp):
            raise DisconnectedError("every topology in a switching set must be connected")
        for lam, _ in decomp.multiplicities.items():
            if lam == 0.0:
                continue
            if not any(abs(lam - other) < 1e-8 for other in pooled):
                pooled.append(lam)
    pooled.sort()
    return [Subsystem.from_dynamics(dynamics, lam, multiplicity=1) for lam in pooled]


def switching_bound(dynamics: AgentDynamics, topologies: list[Topology],
                    tau_max: float | None = None) -> StabilityMap:
    """Delay bound valid for every fixed topology in a switching set.

    Reproduces the pooled-eigenvalue procedure: the map is the intersection
    of the per-topology maps, so a delay in a stable pocket keeps the system
    stable under any fixed topology from the set.  No dwell-time claim is
    made for arbitrary switching signals.
    """
    return build_map(switching_subsystems(dynamics, topologies), tau_max)


def analyze_network(dynamics: AgentDynamics, topology: Topology,
                    tau_max: float | None = None, *,
                    unit_tol: float = 1e-6) -> StabilityMap:
    """Stability map of a single fixed topology (decompose + decouple + map)."""
    decomp = spectral_decompose(topology)
    subsystems = decouple(dynamics, decomp)
    return build_map(subsystems, tau_max, unit_tol=unit_tol)
