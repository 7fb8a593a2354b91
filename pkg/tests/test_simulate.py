import numpy as np
import pytest

from prevreact import NodeParams, Scenario, SensorModel, ValidationError
from prevreact.simulate import (
    recovery_rate,
    sample_recovery_times,
    simulate,
    simulate_from_priors,
)
from prevreact.model import expected_recovery_time

from conftest import random_preventive, random_scenario


def test_one_node_example(one_node_scenario):
    rep = simulate(one_node_scenario, [1.0], 10**6, seed=0)
    assert rep.analytic_cost == pytest.approx(1.0, abs=1e-12)
    assert rep.empirical_cost == pytest.approx(1.0, abs=0.01)
    assert rep.relative_error <= 0.01 and rep.signal_frequency_error <= 0.005


def test_zero_priors_cost_exactly_zero(unit_node):
    sc = Scenario((unit_node, unit_node), (SensorModel(0.9, 0.1),) * 2, 3.0)
    rep = simulate_from_priors([0.0, 0.0], sc, 3.0, 5000, seed=1)
    assert rep.empirical_cost == 0.0 and rep.analytic_cost == 0.0 and rep.relative_error == 0.0


def test_signal_frequencies_two_nodes():
    rng = np.random.default_rng(8)
    sc = random_scenario(rng, 2)
    rep = simulate(sc, random_preventive(rng, sc), 10**6, seed=5)
    assert rep.signal_frequency_error <= 0.005
    assert rep.relative_error <= 0.01


@pytest.mark.parametrize("X_R, delta", [(1.0, 0.0), (0.5, 1.5)])
def test_mean_recovery_time(X_R, delta):
    node = NodeParams(1.0, 1.0, 2.0, delta)
    times = sample_recovery_times(node, X_R, 10**6, seed=3)
    assert times.mean() == pytest.approx(expected_recovery_time(node, X_R), rel=0.01)
    assert recovery_rate(X_R, delta, 2.0) == pytest.approx(1 / expected_recovery_time(node, X_R))


def test_reproducible(one_node_scenario):
    a = simulate(one_node_scenario, [1.0], 70000, seed=9)
    b = simulate(one_node_scenario, [1.0], 70000, seed=9)
    c = simulate(one_node_scenario, [1.0], 70000, seed=10)
    assert a == b and a.empirical_cost != c.empirical_cost


def test_infinite_analytic_cost_rejected(one_node_scenario):
    with pytest.raises(ValidationError):
        simulate(one_node_scenario, [2.0], 1000)
    with pytest.raises(ValidationError):
        simulate(one_node_scenario, [1.0], 0)
