"""Value-of-sensing measures."""
from dataclasses import dataclass
import itertools
import math

import numpy as np

from ._validation import check_real, check_vector
from .exceptions import ValidationError
from .model import EXACT_CAP
from .optimize import optimize_preventive
from .reactive import reactive_cost


@dataclass(frozen=True)
class ImprovementPoint:
    p: float
    q: float
    J_with: float
    J_baseline: float
    improvement: float
    sum_XP: float = math.nan
    sum_XP_baseline: float = math.nan


@dataclass(frozen=True)
class GammaImprovementPoint:
    gammas: tuple
    J_n: float
    J_p: float
    improvement: float


def relative_improvement(J_with, J_baseline):
    """``1 - J_with / J_baseline``; 0 when both are 0, error when only the baseline is."""
    if J_baseline > 0:
        return 1.0 - J_with / J_baseline
    if J_with == 0:
        return 0.0
    raise ValidationError("improvement is undefined for a zero-cost baseline")


def improvement(scenario, p, q, config=None, *, baseline=None):
    """Two-stage improvement ``1 - J*(p, q) / J*(1/2, 1/2)``.

    Both legs re-optimise prevention with the same ``config``. A precomputed
    baseline ``Optimum`` may be passed to avoid solving it once per grid point.
    """
    with_sensor = optimize_preventive(scenario.with_sensor(p, q), config)
    if baseline is None:
        baseline = optimize_preventive(scenario.with_sensor(0.5, 0.5), config)
    if baseline.objective == 0:
        raise ValidationError("improvement is undefined: the uninformative baseline costs 0")
    return ImprovementPoint(
        p=float(p),
        q=float(q),
        J_with=with_sensor.objective,
        J_baseline=baseline.objective,
        improvement=relative_improvement(with_sensor.objective, baseline.objective),
        sum_XP=with_sensor.total_preventive,
        sum_XP_baseline=baseline.total_preventive,
    )


def baseline_cost_no_sensor(gammas, nodes, X_R):
    """Cost when the whole reactive budget is split against the priors alone."""
    g = check_vector(gammas, "gammas", n=len(nodes), low=0.0, high=1.0)
    X_R = check_real(X_R, "X_R", low=0.0)
    return reactive_cost(g, nodes, X_R)


def _check_homogeneous(nodes):
    first = nodes[0]
    for nd in nodes[1:]:
        if (nd.v, nd.epsilon, nd.delta) != (first.v, first.epsilon, first.delta):
            raise ValidationError("perfect-sensor cost needs identical v, epsilon and delta")
    return first


def perfect_sensor_cost(gammas, nodes, X_R):
    """Expected cost when the compromised subset is known and ``X_R`` is split equally over it."""
    g = check_vector(gammas, "gammas", n=len(nodes), low=0.0, high=1.0)
    X_R = check_real(X_R, "X_R", low=0.0)
    n = g.size
    if n > EXACT_CAP:
        raise ValidationError(f"subset enumeration is capped at {EXACT_CAP} nodes")
    node = _check_homogeneous(nodes)
    terms = []
    for subset in itertools.product((0, 1), repeat=n):
        mask = np.array(subset, dtype=bool)
        k = int(mask.sum())
        weight = float(np.prod(np.where(mask, g, 1.0 - g)))
        if k == 0 or weight == 0:
            continue
        denom = node.delta + X_R / k
        per_node = math.inf if denom == 0 else 1.0 + node.epsilon / denom
        terms.append(weight * k * node.v * per_node)
    return math.fsum(terms)


def gamma_improvement(gammas, nodes, X_R):
    J_n = baseline_cost_no_sensor(gammas, nodes, X_R)
    J_p = perfect_sensor_cost(gammas, nodes, X_R)
    return GammaImprovementPoint(
        tuple(float(x) for x in gammas), J_n, J_p, relative_improvement(J_p, J_n)
    )
