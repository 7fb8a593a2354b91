"""scikit-learn style front end.

``fit`` solves the preventive stage for a node table; ``predict`` applies
the fitted reactive policy to observed signal vectors and ``transform``
returns the corresponding posteriors.
"""
import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_node_matrix, check_signals, check_vector
from .cost import reactive_policy, signal_costs
from .model import NodeParams, Scenario, SensorModel, compromise_prior, posterior_matrix
from .optimize import OptimizerConfig, optimize_preventive


class DefenseAllocator(TransformerMixin, BaseEstimator):
    """Two-stage preventive/reactive budget allocator.

    Parameters
    ----------
    budget : float, default=10.0
        Total budget shared by both stages.
    p, q : float or array-like of shape (n_nodes,), default=(0.9, 0.1)
        Sensor true- and false-positive rates, broadcast if scalar.
    starts : int or None, default=None
        Number of descent starts; ``None`` uses the full deterministic set.
    max_iterations, convergence_tol, fd_step :
        Passed to :class:`~prevreact.optimize.OptimizerConfig`.
    random_state : int, default=0
        Seed for any random starts and for sampled objectives.

    Attributes
    ----------
    scenario_ : Scenario
    preventive_ : ndarray of shape (n_nodes,)
    reactive_budget_ : float
    priors_ : ndarray of shape (n_nodes,)
    objective_ : float
        Expected two-stage cost at ``preventive_``.
    optimum_ : Optimum
    """

    def __init__(self, budget=10.0, p=0.9, q=0.1, starts=None, max_iterations=500,
                 convergence_tol=1e-6, fd_step=1e-4, random_state=0):
        self.budget = budget
        self.p = p
        self.q = q
        self.starts = starts
        self.max_iterations = max_iterations
        self.convergence_tol = convergence_tol
        self.fd_step = fd_step
        self.random_state = random_state

    def _scenario(self, X):
        n = X.shape[0]
        p = np.broadcast_to(check_vector(self.p, "p"), (n,)) if np.ndim(self.p) == 0 \
            else check_vector(self.p, "p", n=n)
        q = np.broadcast_to(check_vector(self.q, "q"), (n,)) if np.ndim(self.q) == 0 \
            else check_vector(self.q, "q", n=n)
        nodes = tuple(NodeParams(*row) for row in X)
        sensors = tuple(SensorModel(pi, qi) for pi, qi in zip(p, q))
        return Scenario(nodes, sensors, self.budget)

    def fit(self, X, y=None):
        """Solve the preventive stage.

        Parameters
        ----------
        X : array-like of shape (n_nodes, 4)
            Columns are attack effort ``Y``, valuation ``v``, half-saturation
            ``epsilon`` and pre-existing defense ``delta``.
        y : ignored
        """
        X = check_node_matrix(X)
        self.n_features_in_ = X.shape[1]
        self.scenario_ = self._scenario(X)
        config = OptimizerConfig(
            starts=self.starts,
            max_iterations=self.max_iterations,
            convergence_tol=self.convergence_tol,
            fd_step=self.fd_step,
            seed=self.random_state,
        )
        self.optimum_ = optimize_preventive(self.scenario_, config)
        self.preventive_ = self.optimum_.X_P_star
        self.objective_ = self.optimum_.objective
        self.reactive_budget_ = max(self.budget - float(self.preventive_.sum()), 0.0)
        self.priors_ = compromise_prior(self.scenario_.Y, self.preventive_)
        return self

    def transform(self, S):
        """Posterior compromise probabilities, shape (n_signals, n_nodes)."""
        check_is_fitted(self, "preventive_")
        S = check_signals(S, self.scenario_.n)
        return posterior_matrix(self.priors_, self.scenario_.p, self.scenario_.q, S)

    def predict(self, S):
        """Reactive allocation for each observed signal vector, shape (n_signals, n_nodes)."""
        check_is_fitted(self, "preventive_")
        S = check_signals(S, self.scenario_.n)
        return reactive_policy(S, self.priors_, self.scenario_, self.reactive_budget_)

    def signal_cost(self, S):
        check_is_fitted(self, "preventive_")
        S = check_signals(S, self.scenario_.n)
        return signal_costs(S, self.priors_, self.scenario_, self.reactive_budget_)

    def score(self, X, y=None):
        """Negative expected two-stage cost of the fitted allocation (higher is better)."""
        check_is_fitted(self, "preventive_")
        return -self.objective_
