"""Stage-1 search for the preventive allocation.

The objective ``J*(X_P)`` is only piecewise smooth (the reactive active set
changes across signal rows) and nonconvex in general, so we run a projected
finite-difference descent from several deterministic starts and keep the
best end point.
"""
from dataclasses import dataclass, field
import math

import numpy as np

from .cost import DEFAULT_SAMPLES, ExactObjective, SampledObjective
from .exceptions import NoFiniteOptimumError, ValidationError
from .model import EXACT_CAP

_MAX_HALVINGS = 30
_INWARD = 1e-6


@dataclass(frozen=True)
class OptimizerConfig:
    """Descent settings.

    ``starts=None`` means the full deterministic start set (``n + 4`` points);
    ``fd_step`` is a fraction of the total budget.
    """

    starts: int = None
    max_iterations: int = 500
    convergence_tol: float = 1e-6
    fd_step: float = 1e-4
    seed: int = 0
    method: str = "auto"
    sample_count: int = DEFAULT_SAMPLES

    def __post_init__(self):
        if self.starts is not None and int(self.starts) < 1:
            raise ValidationError("starts must be >= 1")
        if int(self.max_iterations) < 1:
            raise ValidationError("max_iterations must be >= 1")
        if not self.convergence_tol > 0:
            raise ValidationError("convergence_tol must be positive")
        if not 0 < self.fd_step < 1:
            raise ValidationError("fd_step must lie in (0, 1)")
        if self.method not in ("auto", "exact", "sampled"):
            raise ValidationError(f"unknown method {self.method!r}")
        if int(self.sample_count) < 1:
            raise ValidationError("sample_count must be >= 1")


@dataclass(frozen=True)
class Optimum:
    X_P_star: np.ndarray
    objective: float
    iterations_used: int
    start_index: int
    start_objectives: tuple = ()
    traces: tuple = field(default=(), repr=False)

    @property
    def total_preventive(self):
        return float(np.sum(self.X_P_star))


def project_capped_simplex(y, budget):
    """Euclidean projection onto ``{x >= 0, sum(x) <= budget}``.

    The returned point satisfies the budget exactly in floating point.
    """
    y = np.asarray(y, dtype=float)
    x = np.maximum(y, 0.0)
    if x.sum() > budget:
        u = np.sort(y)[::-1]
        css = np.cumsum(u) - budget
        ks = np.arange(1, y.size + 1)
        rho = np.nonzero(u - css / ks > 0)[0][-1]
        x = np.maximum(y - css[rho] / (rho + 1), 0.0)
    for _ in range(4):
        total = x.sum()
        if total <= budget:
            break
        x = x * np.nextafter(budget / total, 0.0)
    return x


def start_points(scenario, config):
    """Ordered start set: zero, three uniform fractions, one-hot halves, then random."""
    n, X = scenario.n, scenario.budget
    pts = [np.zeros(n)]
    pts += [np.full(n, t * X / n) for t in (0.25, 0.5, 0.75)]
    for i in range(n):
        e = np.zeros(n)
        e[i] = 0.5 * X
        pts.append(e)
    k = len(pts) if config.starts is None else int(config.starts)
    if k <= len(pts):
        pts = pts[:k]
    else:
        rng = np.random.default_rng(config.seed)
        extra = rng.dirichlet(np.ones(n + 1), size=k - len(pts))[:, :n] * X
        pts += [project_capped_simplex(row, X) for row in extra]
    if np.any(scenario.delta == 0):
        # The full-prevention face has infinite cost when some node has no legacy defense.
        cap = X * (1.0 - _INWARD)
        pts = [p * (cap / p.sum()) if p.sum() > cap else p for p in pts]
    return pts


def make_objective(scenario, config):
    method = config.method
    if method == "auto":
        method = "exact" if scenario.n <= EXACT_CAP else "sampled"
    if method == "exact":
        return ExactObjective(scenario)
    return SampledObjective(scenario, config.sample_count, config.seed)


def fd_gradient(f, x, fx, h, budget):
    """Central differences, one-sided where a step would leave the feasible set or hit infinity."""
    g = np.zeros_like(x)
    slack = budget - x.sum()
    for i in range(x.size):
        up, down = min(h, slack), min(h, x[i])
        fp = fm = fx
        if up > 0:
            xp = x.copy()
            xp[i] += up
            fp = f(xp)
            if not math.isfinite(fp):
                fp, up = fx, 0.0
        if down > 0:
            xm = x.copy()
            xm[i] -= down
            fm = f(xm)
            if not math.isfinite(fm):
                fm, down = fx, 0.0
        if up + down > 0:
            g[i] = (fp - fm) / (up + down)
    return g


def _coordinate_search(f, x, fx, step, budget, floor):
    s = step
    while s >= floor:
        for i in range(x.size):
            for sign in (1.0, -1.0):
                xn = x.copy()
                xn[i] += sign * s
                xn = project_capped_simplex(xn, budget)
                fn = f(xn)
                if fn < fx:
                    return xn, fn, s
        s *= 0.5
    return None, fx, step


def local_descent(f, x0, budget, config):
    """Projected descent from ``x0``.

    Returns ``(x, f(x), iterations, trace)`` where ``trace`` holds the
    objective after every accepted step (non-increasing by construction).
    """
    x = project_capped_simplex(x0, budget)
    fx = f(x)
    trace = [fx]
    h = config.fd_step * budget
    floor = 1e-9 * budget
    step = 0.1 * budget
    iterations = 0
    for iterations in range(1, config.max_iterations + 1):
        xn = None
        if math.isfinite(fx):
            g = fd_gradient(f, x, fx, h, budget)
            gn = float(np.linalg.norm(g))
            if gn > 0:
                t = min(2.0 * step, budget)
                for _ in range(_MAX_HALVINGS + 1):
                    cand = project_capped_simplex(x - t * g / gn, budget)
                    fc = f(cand)
                    if fc < fx:
                        xn, fn = cand, fc
                        break
                    t *= 0.5
        if xn is None:
            xn, fn, t = _coordinate_search(f, x, fx, step, budget, floor)
            if xn is None:
                break
        rel = (fx - fn) / abs(fx) if math.isfinite(fx) and fx != 0 else math.inf
        x, fx, step = xn, fn, max(t, floor)
        trace.append(fx)
        if rel < config.convergence_tol:
            break
    return x, fx, iterations, tuple(trace)


def optimize_preventive(scenario, config=None):
    """Best preventive allocation over all starts.

    Raises
    ------
    NoFiniteOptimumError
        If every start ends at infinite expected cost.
    """
    config = config or OptimizerConfig()
    f = make_objective(scenario, config)
    best = None
    start_values, traces = [], []
    for k, x0 in enumerate(start_points(scenario, config)):
        x, fx, its, trace = local_descent(f, x0, scenario.budget, config)
        start_values.append(trace[0])
        traces.append(trace)
        if best is None or fx < best[1]:
            best = (x, fx, its, k)
    x, fx, its, k = best
    if not math.isfinite(fx):
        raise NoFiniteOptimumError("no feasible preventive allocation has finite expected cost")
    return Optimum(x, fx, its, k, tuple(start_values), tuple(traces))


def total_cost(scenario, config=None):
    """Minimum two-stage expected cost ``J*(p, q)`` for the scenario's sensors."""
    return optimize_preventive(scenario, config).objective
