import math

import numpy as np
import pytest

from prevreact.model import NodeParams, Scenario, SensorModel

_ACCEPTANCE_LINES = []


def brute_force_reactive_cost(g, v, eps, delta, budget, steps=2000):
    """Minimum of sum v g (1 + eps/(delta + x)) over the grid simplex with spacing budget/steps."""
    g, v, eps, delta = map(np.asarray, (g, v, eps, delta))
    n = g.size
    h = budget / steps
    if n == 2:
        k = np.arange(steps + 1)
        grid = np.stack([k, steps - k], axis=1) * h
    elif n == 3:
        i, j = np.meshgrid(np.arange(steps + 1), np.arange(steps + 1), indexing="ij")
        keep = i + j <= steps
        i, j = i[keep], j[keep]
        grid = np.stack([i, j, steps - i - j], axis=1) * h
    else:
        raise ValueError("grid oracle supports n in {2, 3}")
    tot = delta + grid
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(g > 0, v * g * (1 + eps / tot), 0.0)
    return float(np.min(terms.sum(axis=1)))


def golden_section(f, a, b, tol=1e-10):
    inv = (math.sqrt(5) - 1) / 2
    c, d = b - inv * (b - a), a + inv * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - inv * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv * (b - a)
            fd = f(d)
    x = (a + b) / 2
    return x, f(x)


def random_reactive_instance(rng, n):
    g = rng.uniform(0.1, 1.0, n)
    v = rng.uniform(0.1, 5, n)
    eps = rng.uniform(0.1, 5, n)
    delta = rng.uniform(0.1, 5, n)
    budget = rng.uniform(0.5, 10)
    nodes = [NodeParams(1.0, vi, ei, di) for vi, ei, di in zip(v, eps, delta)]
    return g, nodes, budget


def random_scenario(rng, n, *, budget=None, delta_low=0.1):
    nodes = tuple(
        NodeParams(rng.uniform(0.5, 2), rng.uniform(0.5, 2), rng.uniform(0.5, 2),
                   rng.uniform(delta_low, 1.0))
        for _ in range(n)
    )
    sensors = tuple(SensorModel(rng.uniform(0.5, 1), rng.uniform(0, 0.5)) for _ in range(n))
    return Scenario(nodes, sensors, rng.uniform(2, 10) if budget is None else budget)


def random_preventive(rng, scenario, fraction=0.6):
    w = rng.dirichlet(np.ones(scenario.n))
    return w * fraction * scenario.budget


@pytest.fixture
def unit_node():
    return NodeParams(1.0, 1.0, 1.0, 0.0)


@pytest.fixture
def one_node_scenario(unit_node):
    # Y=1, X_P=1 gives prior 1/2; p=0.9, q=0.1; X=2 leaves X_R=1.
    return Scenario((unit_node,), (SensorModel(0.9, 0.1),), 2.0)


@pytest.fixture
def criterion():
    """Record one acceptance line and assert it."""
    def check(number, name, ok, detail=""):
        status = "PASS" if ok else "FAIL"
        _ACCEPTANCE_LINES.append(f"[{status}] criterion {number}: {name} {detail}".rstrip())
        assert ok, f"criterion {number} failed: {name} {detail}"
    return check


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
