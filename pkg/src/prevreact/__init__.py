"""Preventive vs. reactive cyber-defense budget allocation under imperfect sensing."""
from .cost import CostReport, cost_given_signal, expected_cost
from .estimator import DefenseAllocator
from .exceptions import NoFiniteOptimumError, ValidationError
from .metrics import (
    GammaImprovementPoint,
    ImprovementPoint,
    baseline_cost_no_sensor,
    gamma_improvement,
    improvement,
    perfect_sensor_cost,
)
from .model import (
    EXACT_CAP,
    Belief,
    NodeParams,
    Scenario,
    SensorModel,
    SignalVector,
    belief,
    compromise_prior,
    enumerate_signals,
    expected_recovery_time,
    posterior,
    signal_marginal,
)
from .optimize import Optimum, OptimizerConfig, optimize_preventive, total_cost
from .reactive import ReactiveSolution, allocate_reactive
from .simulate import SimulationReport, simulate

__version__ = "0.1.0"
