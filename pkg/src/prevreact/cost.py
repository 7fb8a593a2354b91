"""Per-signal and signal-averaged defense cost under the optimal reactive split."""
from dataclasses import dataclass
import math

import numpy as np

from ._validation import check_vector
from .exceptions import ValidationError
from .model import (
    EXACT_CAP,
    SignalVector,
    compromise_prior,
    posterior_matrix,
    signal_bits,
    signal_weights,
)
from .reactive import recovery_cost, water_fill

BUDGET_SLACK = 1e-9
DEFAULT_SAMPLES = 100_000
_CHUNK = 1 << 16


@dataclass(frozen=True)
class CostReport:
    expected_cost: float
    per_signal: list = None
    method: str = "exact"
    sample_count: int = 0
    seed: int = None


def reactive_budget(X_P, scenario):
    """Validate ``X_P`` against the scenario and return ``(X_P, X - sum X_P)``."""
    X_P = check_vector(X_P, "X_P", n=scenario.n, low=0.0)
    spent = X_P.sum()
    if spent > scenario.budget + BUDGET_SLACK:
        raise ValidationError(
            f"preventive spend {spent} exceeds the budget {scenario.budget}"
        )
    return X_P, max(scenario.budget - spent, 0.0)


def signal_costs(bits, priors, scenario, X_R):
    """Cost of every row of ``bits`` after its optimal reactive split."""
    G = posterior_matrix(priors, scenario.p, scenario.q, bits)
    alloc, _, _ = water_fill(np.sqrt(scenario.v * G * scenario.epsilon), scenario.delta, X_R)
    return recovery_cost(G, scenario.v, scenario.epsilon, scenario.delta, alloc)


def reactive_policy(bits, priors, scenario, X_R):
    """Reactive allocations, one row per signal vector in ``bits``."""
    G = posterior_matrix(priors, scenario.p, scenario.q, bits)
    alloc, _, _ = water_fill(np.sqrt(scenario.v * G * scenario.epsilon), scenario.delta, X_R)
    return alloc


def _weighted_total(weights, costs):
    live = weights > 0
    if np.any(np.isinf(costs[live])):
        return math.inf
    # np.sum reduces pairwise, so the result does not depend on evaluation order.
    return float(np.sum(weights[live] * costs[live]))


def cost_given_signal(S, X_P, scenario):
    """Cost of one observed signal vector ``S`` given preventive spend ``X_P``."""
    X_P, X_R = reactive_budget(X_P, scenario)
    bits = np.asarray(S.bits if isinstance(S, SignalVector) else S, dtype=np.int8)
    if bits.shape != (scenario.n,) or not np.all((bits == 0) | (bits == 1)):
        raise ValidationError(f"signal must be {scenario.n} bits, got {bits.tolist()}")
    priors = compromise_prior(scenario.Y, X_P)
    return float(signal_costs(bits[None, :], priors, scenario, X_R)[0])


class ExactObjective:
    """``X_P -> J*(X_P)`` with the signal table built once.

    Skips re-validation on every call; the optimizer guarantees feasibility.
    """

    def __init__(self, scenario):
        self.scenario = scenario
        self.bits = signal_bits(scenario.n)

    def __call__(self, X_P):
        sc = self.scenario
        X_R = max(sc.budget - float(np.sum(X_P)), 0.0)
        priors = sc.Y / (sc.Y + X_P)
        weights = signal_weights(priors, sc.p, sc.q, self.bits)
        return _weighted_total(weights, signal_costs(self.bits, priors, sc, X_R))


class SampledObjective:
    """Monte Carlo estimate of ``J*(X_P)`` from signal vectors drawn i.i.d.

    The generator is re-seeded on every call so the estimate is a
    deterministic function of ``X_P``.
    """

    def __init__(self, scenario, sample_count=DEFAULT_SAMPLES, seed=0):
        if int(sample_count) < 1:
            raise ValidationError("sampled mode needs sample_count >= 1")
        self.scenario = scenario
        self.sample_count = int(sample_count)
        self.seed = int(seed)

    def __call__(self, X_P):
        sc = self.scenario
        X_R = max(sc.budget - float(np.sum(X_P)), 0.0)
        priors = sc.Y / (sc.Y + X_P)
        alarm = priors * sc.p + (1.0 - priors) * sc.q
        rng = np.random.default_rng(self.seed)
        sums = []
        remaining = self.sample_count
        while remaining:
            m = min(_CHUNK, remaining)
            bits = (rng.random((m, sc.n)) < alarm).astype(np.int8)
            costs = signal_costs(bits, priors, sc, X_R)
            if np.any(np.isinf(costs)):
                return math.inf
            sums.append(np.sum(costs))
            remaining -= m
        return math.fsum(sums) / self.sample_count


def expected_cost(X_P, scenario, *, method="auto", sample_count=None, seed=0,
                  keep_per_signal=False):
    """Expected cost over signal realisations under the optimal reactive policy.

    Parameters
    ----------
    X_P : array-like of shape (n,)
    scenario : Scenario
    method : {"auto", "exact", "sampled"}
        ``auto`` enumerates up to ``EXACT_CAP`` nodes and samples beyond.
    sample_count : int, optional
        Draws for sampled mode; defaults to ``DEFAULT_SAMPLES``.
    seed : int
    keep_per_signal : bool
        Attach the ``(SignalVector, cost)`` table (exact mode only).

    Returns
    -------
    CostReport
    """
    X_P, X_R = reactive_budget(X_P, scenario)
    if method == "auto":
        method = "exact" if scenario.n <= EXACT_CAP else "sampled"
    if method == "exact":
        if scenario.n > EXACT_CAP:
            raise ValidationError(
                f"exact mode is capped at {EXACT_CAP} nodes; use method='sampled'"
            )
        bits = signal_bits(scenario.n)
        priors = compromise_prior(scenario.Y, X_P)
        weights = signal_weights(priors, scenario.p, scenario.q, bits)
        costs = signal_costs(bits, priors, scenario, X_R)
        table = None
        if keep_per_signal:
            table = [
                (SignalVector(tuple(int(b) for b in row), float(w)), float(c))
                for row, w, c in zip(bits, weights, costs)
            ]
        return CostReport(_weighted_total(weights, costs), table, "exact", 0, None)
    if method == "sampled":
        count = DEFAULT_SAMPLES if sample_count is None else sample_count
        objective = SampledObjective(scenario, count, seed)
        return CostReport(objective(X_P), None, "sampled", objective.sample_count, objective.seed)
    raise ValidationError(f"unknown method {method!r}")
