"""Shared fixtures and pytest hooks, including the one-line acceptance verdicts."""

import re

import numpy as np
import pytest

from condelay import AgentDynamics, build_topology


def ring_adjacency(n: int) -> np.ndarray:
    a = np.zeros((n, n))
    for i in range(n):
        a[i, (i + 1) % n] = a[(i + 1) % n, i] = 1.0
    return a


@pytest.fixture
def bench_dynamics():
    """Third-order two-input agents used throughout the benchmark tests."""
    return AgentDynamics(
        a_matrix=np.array([[0.2, 0.0, 0.0], [0.0, 0.0, 1.0], [1.0, -1.0, 0.0]]),
        b_matrix=np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 0.0]]),
        k_gain=np.array([[0.2694, -0.0402, 0.0899], [-0.0386, 0.2857, 0.1238]]),
    )


@pytest.fixture
def ring5_topology():
    return build_topology(ring_adjacency(5))


_PATTERN = re.compile(r"test_criterion_(\d+)")
_results = {}
_labels = {}


def pytest_collection_modifyitems(items):
    for item in items:
        m = _PATTERN.search(item.name)
        if not m:
            continue
        doc = (getattr(item, "function", None).__doc__ or "").strip()
        first = doc.splitlines()[0] if doc else item.name
        _labels[int(m.group(1))] = first.rstrip(".")


def pytest_runtest_logreport(report):
    m = _PATTERN.search(report.nodeid)
    if m is None:
        return
    num = int(m.group(1))
    if report.when == "call":
        _results[num] = report.outcome
    elif report.when == "setup" and report.outcome != "passed":
        _results[num] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_results):
        verdict = "PASS" if _results[num] == "passed" else "FAIL"
        terminalreporter.write_line(
            f"criterion {num}: {verdict} - {_labels.get(num, '')}")
