"""Command line front end.

Three commands: ``analyze`` builds the stability map and delay bound,
``simulate`` integrates the full network at one delay, ``sweep`` runs both
and cross-checks prediction against simulation. All artifacts are JSON or
CSV, written atomically into --out.

Exit codes: 0 success, 1 bad input (config, dimensions, disconnected graph),
2 degenerate analysis (tangential crossing, marginal at zero delay).
"""

from __future__ import annotations

import math
import os
import sys
from typing import Optional

import click
import numpy as np

from .config import ProblemConfig, default_step, load_config
from .errors import (
    CondelayError,
    ConfigError,
    DegenerateAceError,
    MarginalAtZeroError,
    TangentialCrossingError,
)
from .graphs import decouple, spectral_decompose
from .output import write_csv, write_json
from .sim import BACKEND, SimConfig, classify, disagreement_norms, envelope_ratio, simulate_full
from .stability import StabilityMap, build_map, switching_subsystems

_DEGENERATE = (TangentialCrossingError, MarginalAtZeroError, DegenerateAceError)


def _guard(body) -> None:
    try:
        body()
    except _DEGENERATE as exc:
        click.echo(f"degenerate analysis: {exc}", err=True)
        sys.exit(2)
    except (CondelayError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)


def _analysis_map(cfg: ProblemConfig, tau_max: Optional[float],
                  unit_tol: float) -> tuple[StabilityMap, bool]:
    switching = len(cfg.topologies) > 1
    if switching:
        subs = switching_subsystems(cfg.dynamics, list(cfg.topologies))
    else:
        decomp = spectral_decompose(cfg.topologies[0], tol=cfg.tol_cluster)
        subs = decouple(cfg.dynamics, decomp)
    return build_map(subs, tau_max=tau_max, unit_tol=unit_tol), switching


def _write_analysis(smap: StabilityMap, out_dir: str, switching: bool) -> None:
    records = [{"lambda": pt.lam, "tau": pt.tau, "omega": pt.omega, "rt": pt.rt,
                "multiplicity": pt.multiplicity, "kind": pt.kind}
               for pt in smap.crossings]
    write_json(os.path.join(out_dir, "crossings.json"), records)
    write_csv(os.path.join(out_dir, "nu_steps.csv"),
              ("tau_start", "tau_end", "nu"), smap.nu_steps)
    write_json(os.path.join(out_dir, "summary.json"), {
        "delay_bound": smap.delay_bound,
        "binding_lambda": smap.binding_lambda,
        "stable_pockets": [list(pocket) for pocket in smap.stable_pockets],
        "nu_at_zero": smap.nu_at_zero,
        "tau_max": smap.tau_max,
        "switching": switching,
    })


def _simulate_once(cfg: ProblemConfig, tau: float, seed: Optional[int]) -> dict:
    topo = cfg.topologies[0]
    decomp = spectral_decompose(topo, tol=cfg.tol_cluster)
    rng = np.random.default_rng(cfg.seed if seed is None else seed)
    p = cfg.dynamics.p
    x0 = rng.uniform(-1.0, 1.0, (topo.n, p))
    # verdicts concern disagreement, which is invariant to a common shift;
    # removing the agent average keeps the open-loop group mode (driven by
    # any unstable eigenvalue of A) from swamping double precision on long
    # horizons
    x0 = (x0 - x0.mean(axis=0)).reshape(-1)
    step = cfg.step if cfg.step is not None else default_step(tau)
    sim_cfg = SimConfig(tau=tau, t_end=cfg.t_end, step=step,
                        history=x0, record_stride=cfg.record_stride)
    traj = simulate_full(cfg.dynamics, topo, sim_cfg)
    norms = disagreement_norms(traj, decomp, cfg.dynamics.p)
    if traj.diverged:
        # overflow is a definitive verdict; the envelope needs no full run
        verdict, ratio = "unstable", math.inf
    else:
        ratio = envelope_ratio(traj.times, norms, tau)
        verdict = classify(traj.times, norms, tau)
    return {"traj": traj, "norms": norms, "verdict": verdict, "ratio": ratio,
            "tau": tau}


def _write_simulation(result: dict, out_dir: str) -> None:
    traj = result["traj"]
    norms = result["norms"]
    m = traj.states.shape[1]
    write_csv(os.path.join(out_dir, "trajectory.csv"),
              ["t"] + [f"x{i}" for i in range(m)],
              ([t] + list(row) for t, row in zip(traj.times, traj.states)))
    write_csv(os.path.join(out_dir, "disagreement.csv"), ("t", "norm"),
              zip(traj.times, norms))
    write_json(os.path.join(out_dir, "verdict.json"), {
        "tau": result["tau"],
        "verdict": result["verdict"],
        "diverged": traj.diverged,
        "envelope_ratio": result["ratio"],
        "initial_norm": float(norms[0]),
        "final_norm": float(norms[-1]),
        "backend": BACKEND,
    })


def _predict(smap: StabilityMap, tau: float, margin: float = 1e-3) -> str:
    """Verdict the map implies for one delay (marginal within 1e-3 of a crossing)."""
    if any(abs(pt.tau - tau) <= margin for pt in smap.crossings):
        return "marginal"
    for _, b, nu in smap.nu_steps:
        if tau < b:
            return "stable" if nu == 0 else "unstable"
    return "stable" if smap.nu_steps[-1][2] == 0 else "unstable"


def _parse_tau_list(text: str) -> list[float]:
    taus = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            taus.append(float(part))
        except ValueError:
            raise ConfigError(f"bad delay {part!r} in --tau-list") from None
    return taus


@click.group()
def main() -> None:
    """Exact delay bounds and simulation for consensus networks with a
    uniform communication delay."""


@main.command()
@click.option("--config", "config_path", required=True, metavar="PATH")
@click.option("--out", "out_dir", default=".", metavar="DIR", show_default=True)
@click.option("--tau-max", type=float, default=None,
              help="Right edge of the map (default: from config, else 4x the last kernel).")
@click.option("--tol-unit-circle", type=float, default=None,
              help="Unit-circle root acceptance tolerance.")
def analyze(config_path: str, out_dir: str, tau_max: Optional[float],
            tol_unit_circle: Optional[float]) -> None:
    """Write crossings.json, nu_steps.csv and summary.json."""
    def body():
        cfg = load_config(config_path)
        os.makedirs(out_dir, exist_ok=True)
        smap, switching = _analysis_map(
            cfg,
            tau_max if tau_max is not None else cfg.tau_max,
            tol_unit_circle if tol_unit_circle is not None else cfg.tol_unit_circle)
        _write_analysis(smap, out_dir, switching)
        if smap.binding_lambda is None:
            click.echo(f"delay bound: {smap.delay_bound}")
        else:
            click.echo(f"delay bound: {smap.delay_bound:.6g} "
                       f"(binding lambda = {smap.binding_lambda:.6g})")
    _guard(body)


@main.command()
@click.option("--config", "config_path", required=True, metavar="PATH")
@click.option("--tau", type=float, default=None,
              help="Delay in seconds (default: first entry of the config delay list).")
@click.option("--out", "out_dir", default=".", metavar="DIR", show_default=True)
@click.option("--seed", type=int, default=None, help="Initial-state RNG seed override.")
def simulate(config_path: str, tau: Optional[float], out_dir: str,
             seed: Optional[int]) -> None:
    """Integrate the first-topology network once; write trajectory.csv,
    disagreement.csv and verdict.json."""
    def body():
        cfg = load_config(config_path)
        os.makedirs(out_dir, exist_ok=True)
        t = tau if tau is not None else (cfg.delays[0] if cfg.delays else None)
        if t is None:
            raise ConfigError("no delay given: pass --tau or a config delay list")
        if t < 0:
            raise ConfigError(f"tau must be nonnegative, got {t}")
        result = _simulate_once(cfg, t, seed)
        _write_simulation(result, out_dir)
        click.echo(f"tau = {t:.6g}: {result['verdict']}")
    _guard(body)


@main.command()
@click.option("--config", "config_path", required=True, metavar="PATH")
@click.option("--tau-list", default=None, metavar="CSV",
              help="Comma-separated delays (default: the config delay list).")
@click.option("--out", "out_dir", default=".", metavar="DIR", show_default=True)
@click.option("--tau-max", type=float, default=None)
@click.option("--tol-unit-circle", type=float, default=None)
@click.option("--seed", type=int, default=None)
def sweep(config_path: str, tau_list: Optional[str], out_dir: str,
          tau_max: Optional[float], tol_unit_circle: Optional[float],
          seed: Optional[int]) -> None:
    """Analyze once, simulate every delay, write sweep.json with a
    predicted-versus-observed consistency table."""
    def body():
        cfg = load_config(config_path)
        os.makedirs(out_dir, exist_ok=True)
        taus = _parse_tau_list(tau_list) if tau_list is not None else list(cfg.delays)
        if not taus:
            raise ConfigError("empty delay list: pass --tau-list or a config delay list")
        for t in taus:
            if t < 0:
                raise ConfigError(f"tau must be nonnegative, got {t}")

        # the map must reach past every simulated delay
        base = tau_max if tau_max is not None else cfg.tau_max
        need = 1.2 * max(taus)
        eff_tau_max = need if base is None else max(base, need)
        if eff_tau_max <= 0:
            eff_tau_max = None  # all delays zero: let the map pick its range
        smap, switching = _analysis_map(
            cfg, eff_tau_max,
            tol_unit_circle if tol_unit_circle is not None else cfg.tol_unit_circle)
        _write_analysis(smap, out_dir, switching)

        entries = []
        for t in taus:
            predicted = _predict(smap, t)
            result = _simulate_once(cfg, t, seed)
            verdict = result["verdict"]
            consistent = (predicted == "stable") == (verdict == "stable")
            entries.append({"tau": t, "predicted": predicted,
                            "verdict": verdict, "consistent": consistent})
            flag = "" if consistent else "  <-- inconsistent"
            click.echo(f"tau = {t:.6g}: predicted {predicted}, "
                       f"simulated {verdict}{flag}")
        report = {"entries": entries,
                  "consistent_count": sum(e["consistent"] for e in entries),
                  "total": len(entries)}
        write_json(os.path.join(out_dir, "sweep.json"), report)
        click.echo(f"{report['consistent_count']}/{report['total']} consistent")
    _guard(body)


if __name__ == "__main__":
    main()
