"""Problem definition loading.

One YAML file describes the agent dynamics, one or more topologies, the
delays of interest and tool settings. Matrices are row-major nested lists
(a flat list of the right length is also accepted).
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from typing import Any, Optional

import numpy as np
import yaml

from .errors import ConfigError
from .graphs import AgentDynamics, Topology, build_topology

_TOP_KEYS = {"dynamics", "topologies", "delays", "analysis", "simulation"}
_DYN_KEYS = {"p", "q", "a", "b", "k"}
_ANALYSIS_KEYS = {"tau_max", "tol_unit_circle", "tol_cluster"}
_SIM_KEYS = {"t_end", "step", "record_stride", "seed"}


@dataclass(frozen=True)
class ProblemConfig:
    dynamics: AgentDynamics
    topologies: tuple[Topology, ...]
    delays: tuple[float, ...] = ()
    tau_max: Optional[float] = None
    tol_unit_circle: float = 1e-6
    tol_cluster: float = 1e-8
    t_end: float = 200.0
    step: Optional[float] = None
    record_stride: int = 1
    seed: int = 0


def _require(mapping: dict, key: str, where: str) -> Any:
    if key not in mapping:
        raise ConfigError(f"missing key '{key}' in {where}")
    return mapping[key]


def _reject_unknown(mapping: dict, allowed: set, where: str) -> None:
    extra = set(mapping) - allowed
    if extra:
        raise ConfigError(f"unknown key(s) {sorted(extra)} in {where}")


def _as_float(value: Any, name: str) -> float:
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"'{name}' must be a number, got {value!r}") from None


def _as_int(value: Any, name: str) -> int:
    if isinstance(value, bool) or int(value) != value:
        raise ConfigError(f"'{name}' must be an integer, got {value!r}")
    return int(value)


def _matrix(obj: Any, rows: int, cols: int, name: str) -> np.ndarray:
    try:
        arr = np.asarray(obj, dtype=float)
    except (TypeError, ValueError):
        raise ConfigError(f"'{name}' is not numeric") from None
    if arr.ndim == 1:
        if arr.size != rows * cols:
            raise ConfigError(
                f"'{name}' has {arr.size} entries, expected {rows}x{cols}")
        arr = arr.reshape(rows, cols)
    if arr.shape != (rows, cols):
        raise ConfigError(f"'{name}' has shape {arr.shape}, expected ({rows}, {cols})")
    return arr


def _adjacency(obj: Any, index: int) -> np.ndarray:
    name = f"topologies[{index}].adjacency"
    try:
        arr = np.asarray(obj, dtype=float)
    except (TypeError, ValueError):
        raise ConfigError(f"'{name}' is not numeric") from None
    if arr.ndim == 1:
        n = int(round(arr.size ** 0.5))
        if n * n != arr.size:
            raise ConfigError(f"'{name}' has {arr.size} entries, not a square")
        arr = arr.reshape(n, n)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ConfigError(f"'{name}' has shape {arr.shape}, expected square")
    return arr


def load_config(path: str) -> ProblemConfig:
    """Parse and validate a problem file. Raises ConfigError on bad input."""
    try:
        with open(path) as fh:
            raw = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML in {path}: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    _reject_unknown(raw, _TOP_KEYS, path)

    dyn_raw = _require(raw, "dynamics", path)
    if not isinstance(dyn_raw, dict):
        raise ConfigError("'dynamics' must be a mapping")
    _reject_unknown(dyn_raw, _DYN_KEYS, "'dynamics'")
    p = _as_int(_require(dyn_raw, "p", "'dynamics'"), "dynamics.p")
    q = _as_int(_require(dyn_raw, "q", "'dynamics'"), "dynamics.q")
    if p < 1 or q < 1:
        raise ConfigError(f"dimensions must be positive, got p={p}, q={q}")
    dynamics = AgentDynamics(
        a_matrix=_matrix(_require(dyn_raw, "a", "'dynamics'"), p, p, "dynamics.a"),
        b_matrix=_matrix(_require(dyn_raw, "b", "'dynamics'"), p, q, "dynamics.b"),
        k_gain=_matrix(_require(dyn_raw, "k", "'dynamics'"), q, p, "dynamics.k"),
    )

    topo_raw = _require(raw, "topologies", path)
    if not isinstance(topo_raw, list) or not topo_raw:
        raise ConfigError("'topologies' must be a non-empty list")
    topologies = []
    for i, entry in enumerate(topo_raw):
        if not isinstance(entry, dict) or set(entry) != {"adjacency"}:
            raise ConfigError(
                f"topologies[{i}] must be a mapping with the single key 'adjacency'")
        topologies.append(build_topology(_adjacency(entry["adjacency"], i)))

    delays: tuple[float, ...] = ()
    if "delays" in raw:
        if not isinstance(raw["delays"], list):
            raise ConfigError("'delays' must be a list of numbers")
        delays = tuple(_as_float(v, f"delays[{i}]")
                       for i, v in enumerate(raw["delays"]))
        for i, tau in enumerate(delays):
            if tau < 0:
                raise ConfigError(f"delays[{i}] is negative: {tau}")

    kwargs: dict[str, Any] = {}
    analysis = raw.get("analysis") or {}
    if not isinstance(analysis, dict):
        raise ConfigError("'analysis' must be a mapping")
    _reject_unknown(analysis, _ANALYSIS_KEYS, "'analysis'")
    if "tau_max" in analysis:
        kwargs["tau_max"] = _as_float(analysis["tau_max"], "analysis.tau_max")
        if kwargs["tau_max"] <= 0:
            raise ConfigError(f"analysis.tau_max must be positive, "
                              f"got {kwargs['tau_max']}")
    for key in ("tol_unit_circle", "tol_cluster"):
        if key in analysis:
            kwargs[key] = _as_float(analysis[key], f"analysis.{key}")
            if not 0 < kwargs[key] < 1:
                raise ConfigError(f"analysis.{key} must lie in (0, 1)")

    sim = raw.get("simulation") or {}
    if not isinstance(sim, dict):
        raise ConfigError("'simulation' must be a mapping")
    _reject_unknown(sim, _SIM_KEYS, "'simulation'")
    if "t_end" in sim:
        kwargs["t_end"] = _as_float(sim["t_end"], "simulation.t_end")
        if kwargs["t_end"] <= 0:
            raise ConfigError("simulation.t_end must be positive")
    if "step" in sim:
        kwargs["step"] = _as_float(sim["step"], "simulation.step")
        if kwargs["step"] <= 0:
            raise ConfigError("simulation.step must be positive")
    if "record_stride" in sim:
        kwargs["record_stride"] = _as_int(sim["record_stride"],
                                          "simulation.record_stride")
        if kwargs["record_stride"] < 1:
            raise ConfigError("simulation.record_stride must be >= 1")
    if "seed" in sim:
        kwargs["seed"] = _as_int(sim["seed"], "simulation.seed")

    return ProblemConfig(dynamics=dynamics, topologies=tuple(topologies),
                         delays=delays, **kwargs)


def default_step(tau: float) -> float:
    """Step used when the problem file does not pin one."""
    if tau > 0:
        return min(tau / 40.0, 0.05)
    return 0.05


def fixture_path(name: str) -> str:
    """Filesystem path of a bundled example problem, e.g. fixture_path("ring5")."""
    res = resources.files("condelay").joinpath("fixtures", name + ".yaml")
    if not res.is_file():
        available = sorted(
            entry.name[:-5]
            for entry in resources.files("condelay").joinpath("fixtures").iterdir()
            if entry.name.endswith(".yaml"))
        raise ConfigError(f"no bundled fixture {name!r}; available: {available}")
    return str(res)
