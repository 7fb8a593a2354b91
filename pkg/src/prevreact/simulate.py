"""Monte Carlo check of the analytic expected cost.

Each episode draws the true compromise state of every node, a sensor signal
conditioned on that state, applies the closed-form reactive policy to the
signal, and draws an exponential recovery time for every compromised node.

Random numbers come from numpy's counter-based Philox generator. Episodes
are processed in fixed blocks of ``BLOCK`` and block ``b`` uses the stream
seeded by ``SeedSequence([seed, b])``, so results do not depend on how the
blocks are scheduled.
"""
from dataclasses import dataclass
import math

import numpy as np

from ._validation import check_real, check_vector
from .cost import reactive_budget, signal_costs
from .exceptions import ValidationError
from .model import EXACT_CAP, compromise_prior, posterior_matrix, signal_bits, signal_weights
from .reactive import water_fill

BLOCK = 1 << 16


@dataclass(frozen=True)
class SimulationReport:
    episodes: int
    empirical_cost: float
    analytic_cost: float
    relative_error: float
    seed: int
    signal_frequency_error: float


def block_rng(seed, block):
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(block)])))


def recovery_rate(alloc, delta, epsilon):
    """Exponential rate ``(x + delta) / (x + delta + epsilon)``."""
    total = alloc + delta
    return total / (total + epsilon)


def draw_exponential(rate, rng, size=None):
    """Inverse-CDF exponential draws; a zero rate gives an infinite time."""
    u = 1.0 - rng.random(size if size is not None else np.shape(rate))  # u in (0, 1]
    with np.errstate(divide="ignore"):
        return np.where(rate > 0, -np.log(u) / np.where(rate > 0, rate, 1.0), np.inf)


def sample_recovery_times(node, X_R, size, seed=0):
    X_R = check_real(X_R, "X_R", low=0.0)
    rate = recovery_rate(X_R, node.delta, node.epsilon)
    return draw_exponential(np.full(size, rate), block_rng(seed, 0))


def _analytic(priors, scenario, X_R):
    bits = signal_bits(scenario.n)
    weights = signal_weights(priors, scenario.p, scenario.q, bits)
    costs = signal_costs(bits, priors, scenario, X_R)
    live = weights > 0
    if np.any(np.isinf(costs[live])):
        return math.inf, weights
    return float(np.sum(weights[live] * costs[live])), weights


def simulate_from_priors(priors, scenario, X_R, episodes, seed=0):
    """Simulate with exogenous compromise probabilities and reactive budget ``X_R``."""
    priors = check_vector(priors, "priors", n=scenario.n, low=0.0, high=1.0)
    X_R = check_real(X_R, "X_R", low=0.0)
    episodes = int(episodes)
    if episodes < 1:
        raise ValidationError("episodes must be >= 1")
    n = scenario.n
    if n > EXACT_CAP:
        raise ValidationError(f"simulation validates against exact enumeration (n <= {EXACT_CAP})")
    analytic, weights = _analytic(priors, scenario, X_R)
    if not math.isfinite(analytic):
        raise ValidationError("analytic expected cost is infinite; nothing to validate")

    codes = 1 << np.arange(n - 1, -1, -1)
    counts = np.zeros(2**n, dtype=np.int64)
    block_sums = []
    for b, start in enumerate(range(0, episodes, BLOCK)):
        m = min(BLOCK, episodes - start)
        rng = block_rng(seed, b)
        compromised = rng.random((m, n)) < priors
        u = rng.random((m, n))
        S = np.where(compromised, u < scenario.p, u < scenario.q).astype(np.int8)
        counts += np.bincount(S @ codes, minlength=2**n)
        G = posterior_matrix(priors, scenario.p, scenario.q, S)
        alloc, _, _ = water_fill(
            np.sqrt(scenario.v * G * scenario.epsilon), scenario.delta, X_R
        )
        times = draw_exponential(recovery_rate(alloc, scenario.delta, scenario.epsilon), rng)
        cost = np.where(compromised, scenario.v * times, 0.0).sum(axis=1)
        block_sums.append(np.sum(cost))
    empirical = math.fsum(block_sums) / episodes
    if analytic > 0:
        rel = abs(empirical - analytic) / analytic
    else:
        rel = abs(empirical)
    freq_err = float(np.max(np.abs(counts / episodes - weights)))
    return SimulationReport(episodes, empirical, analytic, rel, int(seed), freq_err)


def simulate(scenario, X_P, episodes, seed=0):
    """Simulate the full model at preventive allocation ``X_P``."""
    X_P, X_R = reactive_budget(X_P, scenario)
    return simulate_from_priors(compromise_prior(scenario.Y, X_P), scenario, X_R, episodes, seed)
