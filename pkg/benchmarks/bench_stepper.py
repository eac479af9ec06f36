"""Timing comparison of the integration backends.

Runs the bundled ring-5 network (15 states) and the binding third-order
subsystem through both steppers, reports steps/second and the speedup, and
checks that the trajectories agree to machine precision.

Usage: python benchmarks/bench_stepper.py [--steps N]
"""

import argparse
import math
import time

import numpy as np

from condelay import _stepper_py, decouple, load_config, spectral_decompose
from condelay.config import fixture_path

try:
    from condelay import _stepper
except ImportError:
    _stepper = None


def _network(cfg):
    topo = cfg.topologies[0]
    F = np.kron(np.eye(topo.n), cfg.dynamics.a_matrix)
    G = -np.kron(topo.laplacian, cfg.dynamics.b_matrix @ cfg.dynamics.k_gain)
    return F, G


def _time_backend(mod, F, G, h, nsteps, x0, hist, qmax, tau, repeats=3):
    best = math.inf
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = mod.integrate_dde(F, G, h, nsteps, x0, hist, qmax, tau)
        best = min(best, time.perf_counter() - t0)
    return best, out


def run_case(name, F, G, tau, h, nsteps):
    m = F.shape[0]
    rng = np.random.default_rng(42)
    x0 = rng.uniform(-1.0, 1.0, m)
    qmax = int(math.floor(2.0 * tau / h + 1e-9))
    hist = np.tile(x0, (qmax + 1, 1))

    t_py, (X_py, _, _) = _time_backend(_stepper_py, F, G, h, nsteps, x0, hist,
                                       qmax, tau)
    print(f"{name}: {m} states, {nsteps} steps")
    print(f"  python   {t_py:8.4f} s   {nsteps / t_py:12.0f} steps/s")
    if _stepper is None:
        print("  compiled backend not built; skipping")
        return
    t_c, (X_c, _, _) = _time_backend(_stepper, F, G, h, nsteps, x0, hist,
                                     qmax, tau)
    drift = float(np.max(np.abs(X_c - X_py)) / max(1.0, np.max(np.abs(X_py))))
    print(f"  compiled {t_c:8.4f} s   {nsteps / t_c:12.0f} steps/s   "
          f"speedup x{t_py / t_c:.1f}   rel state diff {drift:.3g}")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--steps", type=int, default=20000)
    args = ap.parse_args()

    cfg = load_config(fixture_path("ring5"))
    tau, h = 0.7, 0.0175
    F, G = _network(cfg)
    run_case("ring-5 network", F, G, tau, h, args.steps)

    decomp = spectral_decompose(cfg.topologies[0])
    sub = decouple(cfg.dynamics, decomp)[-1]
    run_case(f"subsystem lambda={sub.lam:.4f}", sub.a_matrix, sub.c_matrix,
             tau, h, args.steps)


if __name__ == "__main__":
    main()
