"""Exhaustive imaginary-axis crossing detection for ``x' = A x + C x(t-tau)``.

The characteristic equation ``det(sI - A - C e^{-s tau}) = 0`` has imaginary
roots ``s = j w`` only for delays where the algebraic auxiliary equation

    ACE(z) = det[(A + C z) (+) (A + C / z)] = 0,    z = e^{-j w tau}

has a unit-modulus solution ((+) is the Kronecker summation, whose spectrum
is the pairwise sums of its operands' spectra: ``j w`` and its conjugate sum
to zero, forcing a zero eigenvalue).  From each unit root the crossing
frequencies are the imaginary eigenvalues of ``A + C z``, the minimal delay
follows from ``z = e^{-j w tau}``, and the crossing direction is the sign of
``Re(ds/dtau)``.  Imaginary roots recur with period ``2 pi / w`` in the
delay, with invariant direction, which generates the offspring points.
"""

from __future__ import annotations

import cmath
import logging
import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    DegenerateAceError,
    CondelayError,
    NoImaginaryRootError,
    NonSquareError,
    StaticRootWarning,
    TangentialCrossingError,
)
from .graphs import Subsystem

log = logging.getLogger(__name__)

DEFAULT_UNIT_TOL = 1e-6
RESIDUAL_TOL = 1e-7
TANGENT_TOL = 1e-9


def kron_sum(m1, m2) -> np.ndarray:
    """Kronecker summation ``m1 (+) m2 = m1 kron I + I kron m2``.

    Its spectrum is every pairwise sum of the operands' eigenvalues
    (eigenvalue addition).
    """
    m1 = np.asarray(m1)
    m2 = np.asarray(m2)
    if m1.ndim != 2 or m1.shape[0] != m1.shape[1]:
        raise NonSquareError(f"first operand not square: {m1.shape}")
    if m2.ndim != 2 or m2.shape[0] != m2.shape[1]:
        raise NonSquareError(f"second operand not square: {m2.shape}")
    return np.kron(m1, np.eye(m2.shape[0])) + np.kron(np.eye(m1.shape[0]), m2)


@dataclass(frozen=True)
class LaurentMatrix:
    """The pencil ``M0 + M1 z + M2 / z`` equal to ``(A + Cz) (+) (A + C/z)``."""

    constant_part: np.ndarray
    z_part: np.ndarray
    zinv_part: np.ndarray

    @classmethod
    def from_subsystem(cls, sub: Subsystem) -> "LaurentMatrix":
        a, c = sub.a_matrix, sub.c_matrix
        eye = np.eye(sub.p)
        return cls(
            constant_part=kron_sum(a, a),
            z_part=np.kron(c, eye),
            zinv_part=np.kron(eye, c),
        )

    def evaluate(self, z: complex) -> np.ndarray:
        return self.constant_part + self.z_part * z + self.zinv_part / z


@dataclass(frozen=True)
class AcePolynomial:
    """``z^{p^2} det[(A+Cz) (+) (A+C/z)]`` with zero end coefficients trimmed.

    Coefficients are stored in ascending powers and are real (the imaginary
    residue of the construction is checked and discarded).  The nonzero root
    multiset is closed under ``z -> 1/z``.
    """

    coefficients: np.ndarray

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def roots(self) -> np.ndarray:
        """All polynomial roots, via companion-matrix eigenvalues."""
        if self.degree == 0:
            return np.empty(0, dtype=complex)
        return np.roots(self.coefficients[::-1])

    def reciprocal_defect(self) -> float:
        """Worst relative distance from any root's inverse to the root set."""
        r = self.roots()
        if len(r) == 0:
            return 0.0
        inv = 1.0 / r
        return float(max(np.min(np.abs(r - zi)) / abs(zi) for zi in inv))


@dataclass(frozen=True)
class CrossingPoint:
    """One imaginary-axis crossing of a disagreement subsystem.

    ``tau`` is the delay, ``omega`` the crossing frequency (rad/s, positive),
    ``z = e^{-j omega tau}``, ``rt`` the root tendency (+1 destabilizing,
    -1 stabilizing).  Kernel points satisfy ``0 < tau * omega < 2 pi``;
    offspring are their ``2 pi / omega`` translates.
    """

    tau: float
    omega: float
    z: complex
    rt: int
    lam: float
    multiplicity: int
    kind: str  # "kernel" | "offspring"


def build_ace(sub: Subsystem, *, sample_radius: float = 1.0) -> AcePolynomial:
    """Construct the auxiliary characteristic polynomial of a subsystem.

    The determinant is recovered by evaluation-interpolation: the degree is
    at most ``2 p^2``, so sampling ``z^{p^2} det(...)`` at ``2 p^2 + 1``
    points on a circle and applying an inverse DFT is exact, and avoids
    symbolic expansion entirely.
    """
    p = sub.p
    if p < 1:
        raise DegenerateAceError("empty subsystem")
    laurent = LaurentMatrix.from_subsystem(sub)
    m = 2 * p * p + 1
    zs = sample_radius * np.exp(2j * np.pi * np.arange(m) / m)
    vals = np.array([np.linalg.det(laurent.evaluate(z)) * z ** (p * p) for z in zs])
    # samples sit at +2 pi j/m angles, so the forward DFT (not ifft)
    # recovers ascending coefficients
    coeffs = np.fft.fft(vals) / m
    if sample_radius != 1.0:
        coeffs /= sample_radius ** np.arange(m)

    peak = np.abs(coeffs).max()
    if peak < 1e-300:
        raise DegenerateAceError("auxiliary polynomial is identically zero: every z solves it")
    imag_rel = np.abs(coeffs.imag).max() / peak
    if imag_rel > 1e-9:
        raise CondelayError(f"auxiliary polynomial has non-real coefficients (relative {imag_rel:.2e})")
    c = coeffs.real

    keep = np.abs(c) >= 1e-12 * np.abs(c).max()
    lo = int(np.argmax(keep))
    hi = len(c) - int(np.argmax(keep[::-1]))
    return AcePolynomial(coefficients=c[lo:hi])


def unit_circle_roots(ace: AcePolynomial, tol: float = DEFAULT_UNIT_TOL) -> list[complex]:
    """Roots on the unit circle, one representative per conjugate pair.

    Roots with ``||z| - 1| < tol`` are normalized to exact unit modulus,
    deduplicated, and reduced to the member with nonpositive imaginary part.
    (For crossings with ``omega * tau > pi`` the physical ``z`` is the other
    member; :func:`kernel_points` examines both.)
    """
    roots = ace.roots()
    on_circle = roots[np.abs(np.abs(roots) - 1.0) < tol]
    reps: list[complex] = []
    for z in on_circle:
        z = complex(z / abs(z))
        if z.imag > 0:
            z = z.conjugate()
        if not any(abs(z - w) < 1e-8 for w in reps):
            reps.append(z)
    reps.sort(key=lambda w: math.atan2(w.imag, w.real))
    return reps


def crossing_frequencies(sub: Subsystem, z: complex, tol: float = DEFAULT_UNIT_TOL) -> list[float]:
    """Positive crossing frequencies carried by one unit-circle value.

    Returns ``Im(s)`` for every eigenvalue ``s`` of ``A + C z`` lying on the
    imaginary axis with positive imaginary part.  A root pinned at the origin
    (``s = 0``, i.e. ``z = 1``) is delay-independent and outside the kernel
    definition; it is rejected with a :class:`StaticRootWarning`.
    """
    eigs = np.linalg.eigvals(sub.a_matrix + sub.c_matrix * z)
    omegas = []
    for s in eigs:
        if abs(s.real) >= tol * max(1.0, abs(s)):
            continue
        if abs(s.imag) < tol:
            warnings.warn(
                "characteristic root pinned at the origin (z = 1); it never crosses "
                "and is excluded from the kernel",
                StaticRootWarning,
                stacklevel=2,
            )
            continue
        if s.imag > 0:
            omegas.append(float(s.imag))
    if not omegas:
        raise NoImaginaryRootError(
            f"z = {z:.6g} yields no imaginary-axis eigenvalue with positive frequency"
        )
    return sorted(omegas)


def _adjugate(m: np.ndarray) -> np.ndarray:
    n = m.shape[0]
    if n == 1:
        return np.ones((1, 1), dtype=m.dtype)
    adj = np.empty_like(m)
    rows = np.arange(n)
    for i in range(n):
        for j in range(n):
            minor = m[np.ix_(rows != i, rows != j)]
            adj[j, i] = (-1) ** (i + j) * np.linalg.det(minor)
    return adj


def _char_fn(sub: Subsystem, s: complex, tau: float) -> complex:
    e = sub.c_matrix * cmath.exp(-s * tau)
    return complex(np.linalg.det(s * np.eye(sub.p) - sub.a_matrix - e))


def characteristic_residual(sub: Subsystem, omega: float, tau: float) -> float:
    """|det(jwI - A - C e^{-jw tau})| relative to the pencil norm."""
    s = 1j * omega
    m = s * np.eye(sub.p) - sub.a_matrix
    return abs(_char_fn(sub, s, tau)) / max(1.0, float(np.linalg.norm(m)))


def root_tendency(sub: Subsystem, omega: float, tau: float, *, fd_step: float = 1e-6) -> int:
    """Direction of the root transition at a crossing: sign of Re(ds/dtau).

    Computed by implicit differentiation of ``f(s, tau) = det(sI - A - C
    e^{-s tau})``: with ``M = sI - A - E`` and ``E = C e^{-s tau}``,
    ``ds/dtau = -tr(adj(M) s E) / tr(adj(M) (I + tau E))``.  The sign is
    cross-checked by moving ``tau`` by ``+-fd_step`` and tracking the root
    with one Newton step; disagreement or a vanishing derivative means the
    root touches the axis tangentially and the analysis cannot proceed.
    """
    s = 1j * omega
    e = sub.c_matrix * cmath.exp(-s * tau)
    m = s * np.eye(sub.p) - sub.a_matrix - e
    adj = _adjugate(m)
    f_tau = np.trace(adj @ (s * e))
    f_s = np.trace(adj @ (np.eye(sub.p) + tau * e))
    if f_s == 0:
        raise TangentialCrossingError(f"df/ds vanished at (omega={omega:.6g}, tau={tau:.6g})")
    ds_dtau = -f_tau / f_s
    if abs(ds_dtau.real) < TANGENT_TOL:
        raise TangentialCrossingError(
            f"Re(ds/dtau) = {ds_dtau.real:.3e} at (omega={omega:.6g}, tau={tau:.6g}); "
            "touch-and-return crossings cannot be counted"
        )
    analytic = 1 if ds_dtau.real > 0 else -1

    tracked = []
    for dtau in (-fd_step, fd_step):
        t = tau + dtau
        f = _char_fn(sub, s, t)
        # one Newton step in s at the perturbed delay
        e_t = sub.c_matrix * cmath.exp(-s * t)
        m_t = s * np.eye(sub.p) - sub.a_matrix - e_t
        fs_t = np.trace(_adjugate(m_t) @ (np.eye(sub.p) + t * e_t))
        tracked.append(s - f / fs_t)
    fd_slope = (tracked[1].real - tracked[0].real) / (2 * fd_step)
    if fd_slope == 0 or (1 if fd_slope > 0 else -1) != analytic:
        raise TangentialCrossingError(
            f"analytic tendency {analytic:+d} disagrees with finite-difference slope "
            f"{fd_slope:.3e} at (omega={omega:.6g}, tau={tau:.6g})"
        )
    return analytic


def kernel_points(sub: Subsystem, *, unit_tol: float = DEFAULT_UNIT_TOL) -> list[CrossingPoint]:
    """All kernel points of a subsystem, sorted by delay.

    For each unit-circle representative both conjugate-pair members are
    examined, because a crossing with ``omega * tau`` in ``(pi, 2 pi)`` lives
    on the member with positive imaginary part.  Each surviving ``(z, omega)``
    pair maps to the minimal positive delay ``tau = theta / omega`` with
    ``theta = -arg(z)`` normalized into ``(0, 2 pi)``, which is what makes it
    a kernel point.  Candidates whose characteristic residual does not vanish
    are spurious polynomial roots and are dropped.
    """
    ace = build_ace(sub)
    points: list[CrossingPoint] = []
    for rep in unit_circle_roots(ace, tol=unit_tol):
        members = [rep] if abs(rep.imag) < 1e-12 else [rep, rep.conjugate()]
        found = False
        for z in members:
            try:
                omegas = crossing_frequencies(sub, z, tol=unit_tol)
            except NoImaginaryRootError:
                continue
            theta = (-cmath.phase(z)) % (2 * math.pi)
            if theta == 0.0:
                # z = 1 with omega > 0 means tau * omega = 2 pi k, outside the
                # kernel constraint; such systems are marginal at tau = 0 and
                # rejected upstream by the unstable-root count.
                continue
            for omega in omegas:
                tau = theta / omega
                if characteristic_residual(sub, omega, tau) >= RESIDUAL_TOL:
                    log.debug("discarding spurious root z=%s omega=%.6g", z, omega)
                    continue
                points.append(
                    CrossingPoint(
                        tau=tau,
                        omega=omega,
                        z=z,
                        rt=root_tendency(sub, omega, tau),
                        lam=sub.lam,
                        multiplicity=sub.multiplicity,
                        kind="kernel",
                    )
                )
                found = True
        if not found:
            log.debug("unit-circle candidate %s produced no crossing; spurious", rep)

    points.sort(key=lambda pt: (pt.tau, pt.omega))
    deduped: list[CrossingPoint] = []
    for pt in points:
        if deduped and abs(pt.tau - deduped[-1].tau) < 1e-9 and abs(pt.omega - deduped[-1].omega) < 1e-9:
            continue
        deduped.append(pt)
    if len(deduped) > sub.p ** 2:
        raise CondelayError(
            f"kernel of size {len(deduped)} exceeds the p^2 = {sub.p ** 2} bound; "
            "numerical root duplication suspected"
        )
    return deduped


def offspring(kernel: list[CrossingPoint], tau_max: float) -> list[CrossingPoint]:
    """Kernel plus all its delay-periodic translates up to ``tau_max``.

    Each kernel point at ``(tau0, omega)`` recurs at ``tau0 + 2 k pi / omega``
    with an invariant root tendency.  The returned list merges the kernel
    (as given) with the generated offspring, sorted by delay.
    """
    if tau_max <= 0:
        raise ValueError(f"tau_max must be positive, got {tau_max}")
    merged = list(kernel)
    for pt in kernel:
        period = 2 * math.pi / pt.omega
        k = 1
        while pt.tau + k * period <= tau_max:
            merged.append(replace(pt, tau=pt.tau + k * period, kind="offspring"))
            k += 1
    merged.sort(key=lambda pt: (pt.tau, pt.omega))
    return merged
