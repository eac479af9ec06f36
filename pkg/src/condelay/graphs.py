"""Communication graphs and spectral decoupling of networked dynamics.

A network of ``n`` identical agents ``x_i' = A x_i + B u_i`` coupled by a
delayed relative-state feedback over an undirected graph decomposes, after
diagonalizing the graph Laplacian, into ``n`` independent p-dimensional
systems ``xi_i' = A xi_i - lambda_i B K xi_i(t - tau)``, one per Laplacian
eigenvalue.  The zero eigenvalue carries the delay-free average (group
decision) dynamics ``xi_1' = A xi_1``; the remaining eigenvalues carry the
disagreement dynamics whose simultaneous stability is equivalent to
consensus.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    AsymmetricError,
    DecompositionFailedError,
    DimensionMismatchError,
    DisconnectedError,
    HurwitzWarning,
    NegativeWeightError,
    NonSquareError,
    NonzeroDiagonalError,
)

DEFAULT_CLUSTER_TOL = 1e-8


def _frozen(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=float)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class AgentDynamics:
    """One agent's dynamics ``x' = A x + B u`` and its feedback gain K.

    The delayed control law is ``u_i = K * sum_k a_ik (x_k(t-tau) - x_i(t-tau))``.
    """

    a_matrix: np.ndarray
    b_matrix: np.ndarray
    k_gain: np.ndarray
    p: int = field(init=False)
    q: int = field(init=False)

    def __post_init__(self):
        a = _frozen(self.a_matrix)
        b = _frozen(self.b_matrix)
        k = _frozen(self.k_gain)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise NonSquareError(f"state matrix must be square, got {a.shape}")
        p = a.shape[0]
        if b.ndim != 2 or b.shape[0] != p:
            raise DimensionMismatchError(f"input map must have {p} rows, got {b.shape}")
        q = b.shape[1]
        if k.shape != (q, p):
            raise DimensionMismatchError(f"gain must be {q}x{p}, got {k.shape}")
        object.__setattr__(self, "a_matrix", a)
        object.__setattr__(self, "b_matrix", b)
        object.__setattr__(self, "k_gain", k)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)
        if np.all(np.linalg.eigvals(a).real < 0):
            warnings.warn(
                "open-loop dynamics matrix is Hurwitz; agents reach zero without "
                "cooperation and the delay analysis, while still valid, is moot",
                HurwitzWarning,
                stacklevel=2,
            )


@dataclass(frozen=True)
class Topology:
    """Undirected weighted communication graph and its Laplacian."""

    adjacency: np.ndarray
    laplacian: np.ndarray
    n: int


@dataclass(frozen=True)
class SpectralDecomposition:
    """Laplacian eigenstructure: sorted eigenvalues and orthogonal basis.

    ``multiplicities`` maps each distinct (clustered) eigenvalue to its count,
    in ascending order.  Eigenvector signs are normalized so the
    largest-magnitude entry of each column is positive, making the
    decomposition deterministic.
    """

    eigenvalues: np.ndarray
    t_matrix: np.ndarray
    multiplicities: dict[float, int]

    @property
    def n(self) -> int:
        return self.t_matrix.shape[0]


@dataclass(frozen=True)
class Subsystem:
    """One decoupled disagreement system ``x' = A x + C x(t - tau)``.

    ``c_matrix`` is always ``-lam * B @ K``; build instances through
    :meth:`from_dynamics` (or :func:`decouple`) so that relation holds.
    """

    lam: float
    a_matrix: np.ndarray
    c_matrix: np.ndarray
    multiplicity: int = 1

    @property
    def p(self) -> int:
        return self.a_matrix.shape[0]

    @classmethod
    def from_dynamics(cls, dynamics: AgentDynamics, lam: float, multiplicity: int = 1) -> "Subsystem":
        c = -lam * dynamics.b_matrix @ dynamics.k_gain
        return cls(lam=float(lam), a_matrix=dynamics.a_matrix, c_matrix=_frozen(c), multiplicity=multiplicity)


def build_topology(adjacency) -> Topology:
    """Validate an adjacency matrix and build the graph Laplacian.

    The input must be exactly symmetric with a zero diagonal and nonnegative
    weights.  The Laplacian has ``l_ii = sum_k a_ik`` and ``l_ik = -a_ik``,
    so its row sums are exactly zero in floating point.
    """
    a = np.array(adjacency, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NonSquareError(f"adjacency must be square, got shape {a.shape}")
    n = a.shape[0]
    asym = np.argwhere(a != a.T)
    if asym.size:
        i, k = asym[0]
        raise AsymmetricError(f"adjacency not symmetric at ({i}, {k}): {a[i, k]} != {a[k, i]}")
    diag = np.argwhere(np.diag(a) != 0.0)
    if diag.size:
        i = diag[0][0]
        raise NonzeroDiagonalError(f"adjacency diagonal must be zero, a[{i}][{i}] = {a[i, i]}")
    neg = np.argwhere(a < 0.0)
    if neg.size:
        i, k = neg[0]
        raise NegativeWeightError(f"negative weight at ({i}, {k}): {a[i, k]}")
    lap = -a
    np.fill_diagonal(lap, a.sum(axis=1))
    return Topology(adjacency=_frozen(a), laplacian=_frozen(lap), n=n)


def spectral_decompose(topology: Topology, tol: float = DEFAULT_CLUSTER_TOL) -> SpectralDecomposition:
    """Diagonalize the Laplacian with a symmetric eigensolver.

    Eigenvalues within ``tol * max(1, lam_n)`` of each other are clustered
    into one distinct eigenvalue (its representative value is the cluster
    mean) so that repeated Laplacian eigenvalues carry their multiplicity
    into the stability map.  The smallest cluster is snapped to exactly 0
    when it is within tolerance of zero.
    """
    try:
        evals, t = np.linalg.eigh(topology.laplacian)
    except np.linalg.LinAlgError as exc:
        raise DecompositionFailedError(f"eigensolver failed: {exc}") from exc

    scale = max(1.0, abs(float(evals[-1])))
    # deterministic eigenvector signs
    t = t.copy()
    for i in range(t.shape[1]):
        col = t[:, i]
        if col[np.argmax(np.abs(col))] < 0:
            t[:, i] = -col

    ortho = np.abs(t.T @ t - np.eye(topology.n)).max()
    if ortho > 1e-10:
        raise DecompositionFailedError(f"eigenvector basis not orthogonal: defect {ortho:.3e}")

    # cluster sorted eigenvalues
    groups: list[list[float]] = [[float(evals[0])]]
    for ev in evals[1:]:
        if ev - groups[-1][0] < tol * scale:
            groups[-1].append(float(ev))
        else:
            groups.append([float(ev)])
    reps = [sum(g) / len(g) for g in groups]
    if abs(reps[0]) < tol * scale:
        reps[0] = 0.0

    snapped = np.concatenate([np.full(len(g), r) for g, r in zip(groups, reps)])
    mult = {r: len(g) for g, r in zip(groups, reps)}
    return SpectralDecomposition(eigenvalues=_frozen(snapped), t_matrix=_frozen(t), multiplicities=mult)


def is_connected(decomp: SpectralDecomposition, tol: float = DEFAULT_CLUSTER_TOL) -> bool:
    """True iff the algebraic connectivity (second eigenvalue) is positive."""
    if decomp.n == 1:
        return True
    return float(decomp.eigenvalues[1]) > tol


def decouple(dynamics: AgentDynamics, decomp: SpectralDecomposition) -> list[Subsystem]:
    """Split the delayed network into per-eigenvalue disagreement systems.

    Returns one :class:`Subsystem` per distinct nonzero Laplacian eigenvalue,
    carrying its multiplicity.  The zero eigenvalue is excluded: its block is
    the delay-free group-decision dynamics ``xi_1' = A xi_1`` and plays no
    role in the delay analysis.
    """
    if not is_connected(decomp):
        raise DisconnectedError("graph is disconnected; consensus analysis requires connectivity")
    return [
        Subsystem.from_dynamics(dynamics, lam, mult)
        for lam, mult in decomp.multiplicities.items()
        if lam != 0.0
    ]


def transform_state(x, decomp: SpectralDecomposition, p: int) -> np.ndarray:
    """Map a stacked network state into decoupled coordinates.

    Applies ``(T' kron I_p)`` to the length ``n*p`` vector; the first p-block
    is ``sqrt(n)`` times the agent average when the graph is connected.  The
    map is an isometry since T is orthogonal.
    """
    x = np.asarray(x, dtype=float)
    n = decomp.n
    if x.shape != (n * p,):
        raise DimensionMismatchError(f"state must have length {n * p}, got {x.shape}")
    blocks = x.reshape(n, p)
    return (decomp.t_matrix.T @ blocks).reshape(-1)
