"""Closed-form reactive budget split after the signals are observed.

Minimising ``sum_i v_i g_i (1 + eps_i / (delta_i + x_i))`` over the budget
line ``sum_i x_i = X_R, x >= 0`` gives, on the active set ``A``,

    x_i = w_i / sum_A w_k * (X_R + sum_A delta_k) - delta_i,   w_i = sqrt(v_i g_i eps_i)

The active set is found by repeatedly dropping every node whose unclipped
share is negative. The common factor ``(X_R + sum_A delta) / sum_A w`` only
shrinks when nodes are dropped, so a dropped node never re-enters.
"""
from dataclasses import dataclass

import numpy as np

from ._validation import check_real, check_vector


@dataclass(frozen=True)
class ReactiveSolution:
    allocations: np.ndarray
    active_set: frozenset
    lagrange_scale: float
    unspent: float = 0.0


def water_fill(weights, delta, budget):
    """Batched active-set solve.

    Parameters
    ----------
    weights : ndarray of shape (m, n)
        ``sqrt(v * posterior * eps)`` per signal row; zeros are never funded.
    delta : ndarray of shape (n,)
    budget : float

    Returns
    -------
    alloc : ndarray of shape (m, n)
    active : bool ndarray of shape (m, n)
    scale : ndarray of shape (m,)
        Water level; 0 for rows with an empty active set.
    """
    weights = np.atleast_2d(weights)
    m, n = weights.shape
    if budget == 0:
        return np.zeros((m, n)), np.zeros((m, n), bool), np.zeros(m)
    active = weights > 0
    for _ in range(n + 1):
        w_sum = np.where(active, weights, 0.0).sum(axis=1)
        d_sum = np.where(active, delta, 0.0).sum(axis=1)
        nonempty = w_sum > 0
        scale = np.where(nonempty, (budget + d_sum) / np.where(nonempty, w_sum, 1.0), 0.0)
        raw = weights * scale[:, None] - delta
        keep = active & (raw >= 0)
        if np.array_equal(keep, active):
            break
        active = keep
    alloc = np.where(active, raw, 0.0)
    return alloc, active, scale


def allocate_reactive(posteriors, nodes, X_R):
    """Optimal reactive split of ``X_R`` across nodes with the given posteriors.

    If every posterior is zero the objective is identically zero; nothing is
    spent and the budget is reported in ``unspent``.
    """
    g = check_vector(posteriors, "posteriors", n=len(nodes), low=0.0, high=1.0)
    X_R = check_real(X_R, "X_R", low=0.0)
    v = np.array([nd.v for nd in nodes])
    eps = np.array([nd.epsilon for nd in nodes])
    delta = np.array([nd.delta for nd in nodes])
    alloc, active, scale = water_fill(np.sqrt(v * g * eps)[None, :], delta, X_R)
    alloc, active = alloc[0], active[0]
    unspent = X_R if not active.any() else 0.0
    return ReactiveSolution(
        allocations=alloc,
        active_set=frozenset(int(i) for i in np.flatnonzero(active)),
        lagrange_scale=float(scale[0]),
        unspent=unspent,
    )


def recovery_cost(posteriors, v, epsilon, delta, alloc):
    """Row-wise ``sum_i v_i g_i T_i(x_i)``; zero-posterior nodes contribute 0 even if T is infinite."""
    g = np.atleast_2d(posteriors)
    total = delta + np.atleast_2d(alloc)
    with np.errstate(divide="ignore"):
        T = 1.0 + epsilon / total
    T = np.where(total > 0, T, np.inf)
    with np.errstate(invalid="ignore"):
        terms = np.where(g > 0, v * g * T, 0.0)
    return terms.sum(axis=1)


def reactive_cost(posteriors, nodes, X_R):
    """Cost of the optimal reactive split for a single posterior vector."""
    sol = allocate_reactive(posteriors, nodes, X_R)
    v = np.array([nd.v for nd in nodes])
    eps = np.array([nd.epsilon for nd in nodes])
    delta = np.array([nd.delta for nd in nodes])
    return float(recovery_cost(posteriors, v, eps, delta, sol.allocations)[0])
