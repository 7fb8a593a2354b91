"""Figure sweeps, validation runs and the single-scenario report.

Every runner returns a ``Table``; rows come back in sweep order no
matter how many worker threads evaluated them.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
import logging
import math

import numpy as np

from .cost import expected_cost, reactive_budget, reactive_policy, signal_costs
from .exceptions import ValidationError
from .metrics import gamma_improvement, relative_improvement
from .model import compromise_prior, signal_bits, signal_weights
from .optimize import optimize_preventive
from .simulate import simulate

log = logging.getLogger(__name__)

FIG3_COLUMNS = ("p", "q_fixed", "sum_XP", "J_star")
FIG4_COLUMNS = ("q", "p_fixed", "sum_XP", "J_star")
FIG5_COLUMNS = ("p", "q", "sum_XP", "J_star", "improvement")
FIG6_COLUMNS = ("gamma1", "gamma2_fixed", "J_n", "J_p", "improvement", "is_peak")
VALIDATE_COLUMNS = ("case", "n", "episodes", "empirical_cost", "analytic_cost",
                    "relative_error", "signal_frequency_error", "seed", "status")
POLICY_TABLE_LIMIT = 6
POLICY_SAMPLES = 64
MC_TOLERANCE = 0.01
FREQ_TOLERANCE = 0.005


@dataclass(frozen=True)
class Table:
    columns: tuple
    rows: list


def _map(fn, items, threads):
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _solve(config, p, q):
    return optimize_preventive(config.scenario.with_sensor(p, q), config.optimizer)


def run_fig3(config, threads=1):
    """Total preventive spend against p, one series per fixed q."""
    sw = config.sweep
    points = [(p, q) for q in sw.q_fixed for p in sorted(sw.p_values)]
    results = _map(lambda pq: _solve(config, *pq), points, threads)
    rows = [(p, q, o.total_preventive, o.objective) for (p, q), o in zip(points, results)]
    return Table(FIG3_COLUMNS, rows)


def run_fig4(config, threads=1):
    """Total preventive spend against q, one series per fixed p."""
    sw = config.sweep
    points = [(p, q) for p in sw.p_fixed for q in sorted(sw.q_values)]
    results = _map(lambda pq: _solve(config, *pq), points, threads)
    rows = [(q, p, o.total_preventive, o.objective) for (p, q), o in zip(points, results)]
    return Table(FIG4_COLUMNS, rows)


def run_fig5(config, threads=1):
    sw = config.sweep
    baseline = _solve(config, 0.5, 0.5)
    if baseline.objective == 0:
        raise ValidationError("improvement is undefined: the uninformative baseline costs 0")
    points = [(p, q) for p in sorted(sw.p_values) for q in sorted(sw.q_values)]
    results = _map(lambda pq: _solve(config, *pq), points, threads)
    rows = [
        (p, q, o.total_preventive, o.objective,
         relative_improvement(o.objective, baseline.objective))
        for (p, q), o in zip(points, results)
    ]
    return Table(FIG5_COLUMNS, rows)


def interior_maxima(values):
    """Indices ``i`` with ``values[i-1] < values[i] >= values[i+1]``."""
    v = np.asarray(values)
    return [i for i in range(1, v.size - 1) if v[i - 1] < v[i] >= v[i + 1]]


def run_fig6(config, threads=1):
    """Perfect-sensor improvement for two homogeneous nodes against gamma1."""
    sw = config.sweep
    nodes = (sw.gamma_node, sw.gamma_node)
    g1 = sorted(sw.gamma1_values)
    rows = []
    for g2 in sw.gamma2_fixed:
        pts = _map(lambda g: gamma_improvement((g, g2), nodes, sw.reactive_budget), g1, threads)
        curve = [pt.improvement for pt in pts]
        peaks = set(interior_maxima(curve))
        if peaks:
            log.info("gamma2=%g: interior peak(s) at gamma1=%s", g2,
                     ", ".join(f"{g1[i]:g}" for i in sorted(peaks)))
        for i, (g, pt) in enumerate(zip(g1, pts)):
            rows.append((g, g2, pt.J_n, pt.J_p, pt.improvement, int(i in peaks)))
    return Table(FIG6_COLUMNS, rows)


def run_validate(config, threads=1):
    """Monte Carlo check of every configured case; failures are flagged, not raised."""
    def one(item):
        k, case = item
        seed = config.seed + k
        if not math.isfinite(expected_cost(case.preventive, case.scenario).expected_cost):
            log.warning("case %d flagged: analytic expected cost is infinite", k)
            nan = math.nan
            return (k, case.scenario.n, config.episodes, nan, math.inf, nan, nan, seed,
                    "infinite_cost")
        rep = simulate(case.scenario, case.preventive, config.episodes, seed)
        ok = rep.relative_error <= MC_TOLERANCE and rep.signal_frequency_error <= FREQ_TOLERANCE
        return (k, case.scenario.n, rep.episodes, rep.empirical_cost, rep.analytic_cost,
                rep.relative_error, rep.signal_frequency_error, rep.seed,
                "ok" if ok else "exceeds_tolerance")

    rows = _map(one, list(enumerate(config.cases)), threads)
    return Table(VALIDATE_COLUMNS, rows)


def policy_signals(scenario, priors, seed):
    """All signals for small ``n``; otherwise distinct draws from the signal distribution."""
    n = scenario.n
    if n <= POLICY_TABLE_LIMIT:
        return signal_bits(n)
    alarm = priors * scenario.p + (1.0 - priors) * scenario.q
    rng = np.random.default_rng(seed)
    draws = (rng.random((POLICY_SAMPLES, n)) < alarm).astype(np.int8)
    return np.unique(draws, axis=0)


def run_optimize(config, threads=1):
    """Preventive optimum plus the reactive allocation for each signal vector.

    The first row (``preventive``) carries ``X_P*`` and ``J*``; every
    following ``policy`` row carries ``X_R*(S)`` and the cost of that signal.
    """
    sc = config.scenario
    opt = optimize_preventive(sc, config.optimizer)
    X_P, X_R = reactive_budget(opt.X_P_star, sc)
    priors = compromise_prior(sc.Y, X_P)
    bits = policy_signals(sc, priors, config.seed)
    weights = signal_weights(priors, sc.p, sc.q, bits)
    alloc = reactive_policy(bits, priors, sc, X_R)
    costs = signal_costs(bits, priors, sc, X_R)
    columns = ("row_type", "signal", "weight", "cost") + tuple(f"x_{i + 1}" for i in range(sc.n))
    rows = [("preventive", "", 1.0, opt.objective) + tuple(X_P)]
    for b, w, c, a in zip(bits, weights, costs, alloc):
        rows.append(("policy", "".join(str(int(x)) for x in b), w, c) + tuple(a))
    return Table(columns, rows)


RUNNERS = {
    "fig3": run_fig3,
    "fig4": run_fig4,
    "fig5": run_fig5,
    "fig6": run_fig6,
    "validate": run_validate,
    "optimize": run_optimize,
}

HINTS = {
    "fig3": "x=p, y=sum_XP, one line per q_fixed",
    "fig4": "x=q, y=sum_XP, one line per p_fixed",
    "fig5": "heatmap: x=p, y=q, colour=improvement",
    "fig6": "x=gamma1, y=improvement, one line per gamma2_fixed; is_peak marks interior maxima",
    "validate": "table: compare empirical_cost with analytic_cost per case",
    "optimize": "bar chart of x_i for the preventive row; policy rows list X_R per signal",
}
