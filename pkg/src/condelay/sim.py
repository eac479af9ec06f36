"""Delayed-network simulation by the method of steps.

Fixed-step RK4 with cubic Hermite dense output for the delayed lookup.
The step kernels live in a compiled extension when available; set
CONDELAY_PURE_PYTHON=1 to force the reference implementation.
"""

from __future__ import annotations

import math
import os
import warnings
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .errors import DimensionMismatchError, NonFiniteStateWarning, TooShortError
from .graphs import AgentDynamics, SpectralDecomposition, Subsystem, Topology, _frozen

if os.environ.get("CONDELAY_PURE_PYTHON"):
    from . import _stepper_py as _backend
else:
    try:
        from . import _stepper as _backend  # type: ignore[attr-defined]
    except ImportError:
        from . import _stepper_py as _backend

BACKEND: str = _backend.BACKEND

History = Union[np.ndarray, Callable[[float], np.ndarray]]


def stepper_backend() -> str:
    """Name of the active integration backend: "compiled" or "python"."""
    return BACKEND


@dataclass(frozen=True)
class SimConfig:
    """Run parameters for one integration.

    history is the initial function on [-tau, 0]: a constant vector or a
    callable t -> state. t_end is rounded to the nearest whole step.
    """

    tau: float
    t_end: float
    step: float
    history: History
    record_stride: int = 1

    def __post_init__(self):
        if self.step <= 0:
            raise ValueError(f"step must be positive, got {self.step}")
        if self.t_end <= 0:
            raise ValueError(f"t_end must be positive, got {self.t_end}")
        if self.tau < 0:
            raise ValueError(f"tau must be nonnegative, got {self.tau}")
        # the Hermite lookup needs the delay interval well resolved
        if self.tau > 0 and self.step > self.tau / 20 * (1 + 1e-12):
            raise ValueError(
                f"step {self.step} exceeds tau/20 = {self.tau / 20:.6g}")
        if self.record_stride < 1 or self.record_stride != int(self.record_stride):
            raise ValueError(f"record_stride must be a positive integer, "
                             f"got {self.record_stride}")


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    tau: float
    system_id: str
    diverged: bool = False

    def __post_init__(self):
        object.__setattr__(self, "times", _frozen(self.times))
        object.__setattr__(self, "states", _frozen(self.states))


def _history_fn(history: History, m: int) -> Callable[[float], np.ndarray]:
    if callable(history):
        def phi(t: float) -> np.ndarray:
            v = np.asarray(history(t), dtype=float).reshape(-1)
            if v.shape[0] != m:
                raise DimensionMismatchError(
                    f"history returned length {v.shape[0]}, state has {m}")
            return v
        return phi
    const = np.asarray(history, dtype=float).reshape(-1)
    if const.shape[0] == 1 and m > 1:
        const = np.full(m, const[0])
    if const.shape[0] != m:
        raise DimensionMismatchError(
            f"history has length {const.shape[0]}, state has {m}")
    return lambda t: const


def _run(F: np.ndarray, G: np.ndarray, config: SimConfig, system_id: str) -> Trajectory:
    m = F.shape[0]
    h = float(config.step)
    tau = float(config.tau)
    nsteps = max(1, int(round(config.t_end / h)))
    phi = _history_fn(config.history, m)
    x0 = phi(0.0)

    if tau == 0.0:
        X, diverged_at = _backend.integrate_ode(
            np.ascontiguousarray(F + G), h, nsteps, x0)
    else:
        # presample the history on the half grid the RK4 stages hit
        qmax = int(math.floor(2.0 * tau / h + 1e-9))
        hist = np.empty((qmax + 1, m))
        for q in range(qmax + 1):
            hist[q] = phi(min(q * (h / 2.0) - tau, 0.0))
        X, _, diverged_at = _backend.integrate_dde(
            np.ascontiguousarray(F), np.ascontiguousarray(G),
            h, nsteps, x0, hist, qmax, tau)

    diverged = diverged_at >= 0
    if diverged:
        warnings.warn(
            f"state became non-finite at t = {diverged_at * h:.6g} "
            f"({system_id}); returning the finite prefix",
            NonFiniteStateWarning, stacklevel=3)
        X = X[:diverged_at]
    times = np.arange(X.shape[0]) * h
    stride = config.record_stride
    return Trajectory(times=times[::stride], states=np.asarray(X)[::stride],
                      tau=tau, system_id=system_id, diverged=diverged)


def simulate_full(dynamics: AgentDynamics, topology: Topology,
                  config: SimConfig) -> Trajectory:
    """Integrate the coupled network x' = (I_n (x) A) x - (L (x) BK) x(t - tau)."""
    eye = np.eye(topology.n)
    F = np.kron(eye, dynamics.a_matrix)
    G = -np.kron(topology.laplacian, dynamics.b_matrix @ dynamics.k_gain)
    return _run(F, G, config, system_id=f"network-n{topology.n}")


def simulate_subsystem(subsystem: Subsystem, config: SimConfig) -> Trajectory:
    """Integrate one decoupled block x' = A x + C x(t - tau)."""
    return _run(subsystem.a_matrix, subsystem.c_matrix, config,
                system_id=f"subsystem-lambda{subsystem.lam:.6g}")


def disagreement_norms(traj: Trajectory, decomp: SpectralDecomposition,
                       p: int) -> np.ndarray:
    """Per-time norm of the modal states outside the group-decision block.

    The first block rides on the zero Laplacian eigenvalue and may drift
    when A is not Hurwitz, so it is excluded.
    """
    n = decomp.n
    if traj.states.shape[1] != n * p:
        raise DimensionMismatchError(
            f"trajectory has {traj.states.shape[1]} states, expected "
            f"n*p = {n}*{p} = {n * p}")
    blocks = traj.states.reshape(-1, n, p)
    modal = np.matmul(decomp.t_matrix.T, blocks)
    return np.linalg.norm(modal[:, 1:, :].reshape(modal.shape[0], -1), axis=1)


def envelope_ratio(times: np.ndarray, norms: np.ndarray, tau: float) -> float:
    """Peak norm over the last quarter of the run divided by the peak over
    the quarter before it. The run must span at least 20 delay intervals."""
    times = np.asarray(times, dtype=float)
    norms = np.asarray(norms, dtype=float)
    if times.shape != norms.shape:
        raise DimensionMismatchError(
            f"times {times.shape} and norms {norms.shape} differ")
    if times.size < 8:
        raise TooShortError(f"need at least 8 samples, got {times.size}")
    span = times[-1] - times[0]
    if tau > 0 and span < 20.0 * tau:
        raise TooShortError(
            f"run spans {span:.6g} s, need >= 20*tau = {20 * tau:.6g} s")

    t_half = times[0] + 0.5 * span
    t_3q = times[0] + 0.75 * span
    q3 = norms[(times >= t_half) & (times < t_3q)]
    q4 = norms[times >= t_3q]
    if q3.size == 0 or q4.size == 0:
        raise TooShortError("not enough samples in the trailing quarters")
    peak3 = float(q3.max())
    peak4 = float(q4.max())
    if peak3 == 0.0:
        return 0.0 if peak4 == 0.0 else math.inf
    return peak4 / peak3


def classify(times: np.ndarray, norms: np.ndarray, tau: float, *,
             decay_ratio: float = 0.5, growth_ratio: float = 2.0) -> str:
    """Verdict from the norm envelope: "stable", "marginal" or "unstable".

    A coarse instrument, not a proof; delays near a crossing legitimately
    land in the marginal band.
    """
    ratio = envelope_ratio(times, norms, tau)
    if ratio < decay_ratio:
        return "stable"
    if ratio > growth_ratio:
        return "unstable"
    return "marginal"
