"""Pure-numpy integration kernels: RK4 with cubic Hermite delayed lookup.

Same interface as the compiled module ``_stepper``; this one is the
fallback selected at import when the extension is unavailable (or when
CONDELAY_PURE_PYTHON is set).

Delayed lookups during a step land on the half-grid ``q * h/2 - tau``
(q integer), so pre-history values can be presampled exactly; lookups past
t = 0 interpolate the already-integrated dense grid, whose derivative values
are stored alongside the states.
"""

import numpy as np

BACKEND = "python"


def _hermite(x0, d0, x1, d1, th, h):
    a = (1.0 + 2.0 * th) * (1.0 - th) ** 2
    b = th * (1.0 - th) ** 2
    c = th * th * (3.0 - 2.0 * th)
    d = th * th * (th - 1.0)
    return a * x0 + (b * h) * d0 + c * x1 + (d * h) * d1


def integrate_dde(F, G, h, nsteps, x0, hist, qmax, tau):
    """Integrate ``x' = F x(t) + G x(t - tau)`` on a fixed grid.

    hist[q] holds the history at ``t = q*h/2 - tau`` for q <= qmax (t <= 0).
    Returns (X, D, diverged_at) where X[k] is the state at t = k*h, D[k] the
    derivative, and diverged_at the first non-finite step index (-1 if none).
    """
    m = x0.shape[0]
    X = np.empty((nsteps + 1, m))
    D = np.empty((nsteps + 1, m))
    X[0] = x0

    def lookup(q, filled):
        if q <= qmax:
            return hist[q]
        t = q * (h / 2.0) - tau
        j = int(t / h)
        if j > filled - 1:
            j = filled - 1
        if j < 0:
            j = 0
        th = t / h - j
        return _hermite(X[j], D[j], X[j + 1], D[j + 1], th, h)

    D[0] = F @ X[0] + G @ hist[0]
    # overflow is how divergence manifests; the isfinite check handles it
    with np.errstate(over="ignore", invalid="ignore"):
        for n in range(nsteps):
            xd_half = lookup(2 * n + 1, n)
            xd_full = lookup(2 * n + 2, n)
            k1 = D[n]
            k2 = F @ (X[n] + (0.5 * h) * k1) + G @ xd_half
            k3 = F @ (X[n] + (0.5 * h) * k2) + G @ xd_half
            k4 = F @ (X[n] + h * k3) + G @ xd_full
            X[n + 1] = X[n] + (h / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
            if not np.all(np.isfinite(X[n + 1])):
                return X, D, n + 1
            # t_{n+1} - tau lies at least 19 steps behind t_{n+1}, so the
            # xd_full lookup is already the delayed state for the new
            # derivative
            D[n + 1] = F @ X[n + 1] + G @ xd_full
    return X, D, -1


def integrate_ode(F, h, nsteps, x0):
    """Plain RK4 for the delay-free case ``x' = F x``."""
    m = x0.shape[0]
    X = np.empty((nsteps + 1, m))
    X[0] = x0
    with np.errstate(over="ignore", invalid="ignore"):
        for n in range(nsteps):
            k1 = F @ X[n]
            k2 = F @ (X[n] + (0.5 * h) * k1)
            k3 = F @ (X[n] + (0.5 * h) * k2)
            k4 = F @ (X[n] + h * k3)
            X[n + 1] = X[n] + (h / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
            if not np.all(np.isfinite(X[n + 1])):
                return X, n + 1
    return X, -1
