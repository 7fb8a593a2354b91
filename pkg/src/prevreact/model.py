"""Domain types and closed-form primitives of the two-stage defense model.

A node is attacked with effort ``Y``; preventive spending ``X_P`` sets the
compromise probability through a Tullock contest, a binary sensor with
true-positive rate ``p`` and false-positive rate ``q`` reports on it, and
reactive spending ``X_R`` shortens its exponential recovery time.
"""
from dataclasses import dataclass, field
from functools import cached_property
import math

import numpy as np

from ._validation import check_probability, check_real, check_vector
from .exceptions import ValidationError

#: Largest node count for which the 2**n signal space is enumerated exactly.
EXACT_CAP = 16


@dataclass(frozen=True)
class NodeParams:
    """Per-node constants: attack effort, valuation, half-saturation, legacy defense."""

    Y: float
    v: float
    epsilon: float
    delta: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "Y", check_real(self.Y, "Y", low=0.0, strict_low=True))
        object.__setattr__(self, "v", check_real(self.v, "v", low=0.0, strict_low=True))
        object.__setattr__(
            self, "epsilon", check_real(self.epsilon, "epsilon", low=0.0, strict_low=True)
        )
        object.__setattr__(self, "delta", check_real(self.delta, "delta", low=0.0))


@dataclass(frozen=True)
class SensorModel:
    """Binary detector with p in [1/2, 1], q in [0, 1/2].

    Uninformative sensors ``p == q`` are accepted anywhere on the diagonal.
    """

    p: float
    q: float

    def __post_init__(self):
        p = check_probability(self.p, "p")
        q = check_probability(self.q, "q")
        if p == q:
            pass
        elif p < 0.5:
            raise ValidationError(f"true-positive rate must be in [0.5, 1], got {p}")
        elif q > 0.5:
            raise ValidationError(f"false-positive rate must be in [0, 0.5], got {q}")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    @property
    def informative(self):
        return self.p != self.q


UNINFORMATIVE = SensorModel(0.5, 0.5)


@dataclass(frozen=True)
class Scenario:
    """Nodes, one sensor per node, and the total budget ``X``."""

    nodes: tuple
    sensors: tuple
    budget: float

    def __post_init__(self):
        nodes = tuple(self.nodes)
        sensors = tuple(self.sensors)
        if not nodes:
            raise ValidationError("a scenario needs at least one node")
        if len(sensors) != len(nodes):
            raise ValidationError(
                f"got {len(sensors)} sensors for {len(nodes)} nodes"
            )
        if not all(isinstance(nd, NodeParams) for nd in nodes):
            raise ValidationError("nodes must be NodeParams instances")
        if not all(isinstance(s, SensorModel) for s in sensors):
            raise ValidationError("sensors must be SensorModel instances")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "sensors", sensors)
        object.__setattr__(
            self, "budget", check_real(self.budget, "budget", low=0.0, strict_low=True)
        )

    @classmethod
    def homogeneous(cls, n, *, Y=1.0, v=1.0, epsilon=1.0, delta=0.0, p=0.5, q=0.5, budget=10.0):
        node = NodeParams(Y, v, epsilon, delta)
        return cls((node,) * n, (SensorModel(p, q),) * n, budget)

    def with_sensor(self, p, q):
        """Copy of the scenario with one (p, q) broadcast to every node."""
        return Scenario(self.nodes, (SensorModel(p, q),) * self.n, self.budget)

    @property
    def n(self):
        return len(self.nodes)

    # Column views used by the vectorised solvers.
    @cached_property
    def Y(self):
        return np.array([nd.Y for nd in self.nodes])

    @cached_property
    def v(self):
        return np.array([nd.v for nd in self.nodes])

    @cached_property
    def epsilon(self):
        return np.array([nd.epsilon for nd in self.nodes])

    @cached_property
    def delta(self):
        return np.array([nd.delta for nd in self.nodes])

    @cached_property
    def p(self):
        return np.array([s.p for s in self.sensors])

    @cached_property
    def q(self):
        return np.array([s.q for s in self.sensors])


@dataclass(frozen=True)
class SignalVector:
    bits: tuple
    weight: float


@dataclass(frozen=True)
class Belief:
    """Prior and both posteriors for one node.

    ``impossible`` lists the signal values with zero marginal probability;
    their posterior is reported as 0.
    """

    prior: float
    posterior_given_1: float
    posterior_given_0: float
    impossible: frozenset = field(default_factory=frozenset)


def compromise_prior(Y, X_P):
    """Tullock breach probability ``Y / (Y + X_P)``.

    Accepts scalars or equal-length arrays; returns the same kind.
    """
    scalar = np.ndim(Y) == 0 and np.ndim(X_P) == 0
    Y = check_vector(Y, "Y")
    X_P = check_vector(X_P, "X_P", low=0.0)
    if np.any(Y <= 0):
        raise ValidationError("attack effort Y must be strictly positive")
    gamma = Y / (Y + X_P)
    return float(gamma[0]) if scalar else gamma


def signal_marginal(gamma, sensor):
    """Return ``(P(S=1), P(S=0))`` for a node with prior ``gamma``."""
    gamma = check_probability(gamma, "gamma")
    alarm = gamma * sensor.p + (1.0 - gamma) * sensor.q
    return alarm, 1.0 - alarm


def _bayes(gamma, p, q, s):
    # Vectorised Bayes rule; p == q returns the prior bit-for-bit, zero-mass signals give 0.
    like_c = np.where(s == 1, p, 1.0 - p)
    like_s = np.where(s == 1, q, 1.0 - q)
    num = like_c * gamma
    den = num + like_s * (1.0 - gamma)
    safe = np.where(den > 0, den, 1.0)
    post = np.where(den > 0, num / safe, 0.0)
    return np.where(p == q, gamma, post)


def posterior(gamma, sensor, s):
    """Posterior compromise probability after observing bit ``s``."""
    gamma = check_probability(gamma, "gamma")
    if s not in (0, 1):
        raise ValidationError(f"signal must be 0 or 1, got {s!r}")
    return float(_bayes(np.float64(gamma), sensor.p, sensor.q, s))


def belief(gamma, sensor):
    alarm, quiet = signal_marginal(gamma, sensor)
    impossible = frozenset(s for s, m in ((1, alarm), (0, quiet)) if m == 0)
    return Belief(gamma, posterior(gamma, sensor, 1), posterior(gamma, sensor, 0), impossible)


def posterior_matrix(priors, p, q, bits):
    """Posteriors for a batch of signal vectors.

    ``bits`` has shape (m, n); ``priors``, ``p`` and ``q`` broadcast along
    the node axis. Returns an (m, n) float array.
    """
    return _bayes(np.asarray(priors, float), np.asarray(p, float), np.asarray(q, float),
                  np.asarray(bits))


def expected_recovery_time(node, X_R):
    """Mean recovery time ``1 + epsilon / (delta + X_R)``; infinite when nothing is spent."""
    X_R = check_real(X_R, "X_R", low=0.0)
    total = node.delta + X_R
    if total == 0:
        return math.inf
    return 1.0 + node.epsilon / total


def signal_bits(n):
    """All 2**n signal vectors as an int8 matrix in lexicographic order (node 0 most significant)."""
    if n > EXACT_CAP:
        raise ValidationError(
            f"exact enumeration is capped at {EXACT_CAP} nodes (got {n}); use sampled mode"
        )
    shifts = np.arange(n - 1, -1, -1)
    codes = np.arange(2**n)[:, None]
    return ((codes >> shifts) & 1).astype(np.int8)


def signal_weights(priors, p, q, bits):
    """Product-form probability of each row of ``bits``."""
    alarm = np.asarray(priors) * p + (1.0 - np.asarray(priors)) * q
    return np.prod(np.where(bits == 1, alarm, 1.0 - alarm), axis=1)


def enumerate_signals(priors, sensors):
    """Every signal vector with its probability, in lexicographic order."""
    priors = check_vector(priors, "priors", low=0.0, high=1.0)
    if len(sensors) != priors.shape[0]:
        raise ValidationError("need one sensor per prior")
    p = np.array([s.p for s in sensors])
    q = np.array([s.q for s in sensors])
    bits = signal_bits(priors.shape[0])
    weights = signal_weights(priors, p, q, bits)
    return [SignalVector(tuple(int(b) for b in row), float(w)) for row, w in zip(bits, weights)]

