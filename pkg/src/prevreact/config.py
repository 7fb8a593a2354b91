"""YAML experiment configuration with strict key checking.

Top-level keys (all optional)::

    seed: 0
    scenario:
      budget: 10
      nodes: [{Y: 1, v: 1, epsilon: 1, delta: 0.1}, ...]
      sensor: {p: 0.9, q: 0.1}          # broadcast to every node, or
      sensors: [{p: 0.9, q: 0.1}, ...]  # one per node
    optimizer: {starts, max_iterations, convergence_tol, fd_step, method, sample_count}
    sweep:
      p_values, q_values, q_fixed, p_fixed    # fig3, fig4, fig5 sweeps
      gamma1_values, gamma2_fixed             # fig6 sweep
      reactive_budget, gamma_node: {v, epsilon, delta}
    validate:
      episodes: 1000000
      cases: [{scenario: {...}, preventive: [...]}, ...]

Missing keys take the defaults in ``DEFAULTS``; unknown keys are errors.
"""
from dataclasses import dataclass, replace

import yaml

from .exceptions import ValidationError
from .model import NodeParams, Scenario, SensorModel
from .optimize import OptimizerConfig


def _grid(start, stop, step):
    count = int(round((stop - start) / step))
    return [round(start + k * step, 10) for k in range(count + 1)]


DEFAULTS = {
    "seed": 0,
    "scenario": {
        "budget": 10.0,
        "nodes": [{"Y": 1.0, "v": 1.0, "epsilon": 1.0, "delta": 0.1}] * 2,
        "sensor": {"p": 0.9, "q": 0.1},
    },
    "sweep": {
        "p_values": _grid(0.5, 1.0, 0.05),
        "q_values": _grid(0.0, 0.5, 0.05),
        "q_fixed": [0.0, 0.25, 0.5],
        "p_fixed": [0.5, 0.75, 1.0],
        "gamma1_values": _grid(0.01, 0.99, 0.01),
        "gamma2_fixed": [0.1, 0.3, 0.5, 0.7, 0.9],
        "reactive_budget": 2.0,
        "gamma_node": {"v": 1.0, "epsilon": 1.0, "delta": 0.0},
    },
    "validate": {
        "episodes": 1_000_000,
        "cases": [
            {
                "scenario": {
                    "budget": 2.0,
                    "nodes": [{"Y": 1.0, "v": 1.0, "epsilon": 1.0, "delta": 0.0}],
                    "sensor": {"p": 0.9, "q": 0.1},
                },
                "preventive": [1.0],
            },
            {"preventive": [3.5, 3.5]},
        ],
    },
}

_SCENARIO_KEYS = {"budget", "nodes", "sensor", "sensors"}
_NODE_KEYS = {"Y", "v", "epsilon", "delta"}
_SENSOR_KEYS = {"p", "q"}
_OPTIMIZER_KEYS = {"starts", "max_iterations", "convergence_tol", "fd_step", "method",
                   "sample_count"}
_SWEEP_KEYS = set(DEFAULTS["sweep"])
_GAMMA_NODE_KEYS = {"v", "epsilon", "delta"}
_VALIDATE_KEYS = {"episodes", "cases"}
_CASE_KEYS = {"scenario", "preventive"}
_TOP_KEYS = {"seed", "scenario", "optimizer", "sweep", "validate"}


class ConfigError(ValidationError):
    pass


@dataclass(frozen=True)
class Sweep:
    p_values: tuple
    q_values: tuple
    q_fixed: tuple
    p_fixed: tuple
    gamma1_values: tuple
    gamma2_fixed: tuple
    reactive_budget: float
    gamma_node: NodeParams


@dataclass(frozen=True)
class ValidationCase:
    scenario: Scenario
    preventive: tuple


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: Scenario
    optimizer: OptimizerConfig
    sweep: Sweep
    cases: tuple = ()
    episodes: int = 1_000_000
    seed: int = 0
    output_path: str = None

    def with_seed(self, seed):
        return replace(self, seed=int(seed), optimizer=replace(self.optimizer, seed=int(seed)))


def _mapping(obj, where, allowed):
    if obj is None:
        return {}
    if not isinstance(obj, dict):
        raise ConfigError(f"{where} must be a mapping")
    unknown = set(obj) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {', '.join(sorted(map(str, unknown)))}")
    return obj


def _floats(values, where, low, high):
    if not isinstance(values, (list, tuple)) or not values:
        raise ConfigError(f"{where} must be a non-empty list")
    out = []
    for x in values:
        if isinstance(x, bool) or not isinstance(x, (int, float)):
            raise ConfigError(f"{where} entries must be numbers, got {x!r}")
        if not low <= x <= high:
            raise ConfigError(f"{where} entries must lie in [{low}, {high}], got {x}")
        out.append(float(x))
    return tuple(out)


def parse_scenario(raw, where="scenario"):
    raw = _mapping(raw, where, _SCENARIO_KEYS)
    if "sensor" in raw and "sensors" in raw:
        raise ConfigError(f"{where}: give either 'sensor' or 'sensors', not both")
    nodes_raw = raw.get("nodes", DEFAULTS["scenario"]["nodes"])
    if not isinstance(nodes_raw, list) or not nodes_raw:
        raise ConfigError(f"{where}.nodes must be a non-empty list")
    nodes = tuple(
        NodeParams(**_mapping(nd, f"{where}.nodes[{i}]", _NODE_KEYS))
        for i, nd in enumerate(nodes_raw)
    )
    if "sensors" in raw:
        if not isinstance(raw["sensors"], list):
            raise ConfigError(f"{where}.sensors must be a list")
        sensors = tuple(
            SensorModel(**_mapping(s, f"{where}.sensors[{i}]", _SENSOR_KEYS))
            for i, s in enumerate(raw["sensors"])
        )
    else:
        shared = raw.get("sensor", DEFAULTS["scenario"]["sensor"])
        sensors = (SensorModel(**_mapping(shared, f"{where}.sensor", _SENSOR_KEYS)),) * len(nodes)
    return Scenario(nodes, sensors, raw.get("budget", DEFAULTS["scenario"]["budget"]))


def parse_config(raw):
    """Build an ``ExperimentConfig`` from a parsed YAML document."""
    try:
        return _parse(raw)
    except ConfigError:
        raise
    except (ValidationError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc


def _parse(raw):
    raw = _mapping(raw, "config", _TOP_KEYS)
    seed = raw.get("seed", DEFAULTS["seed"])
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        raise ConfigError("seed must be a nonnegative integer")
    scenario = parse_scenario(raw.get("scenario"))
    opt = dict(_mapping(raw.get("optimizer"), "optimizer", _OPTIMIZER_KEYS))
    optimizer = OptimizerConfig(seed=seed, **opt)

    sw = {**DEFAULTS["sweep"], **_mapping(raw.get("sweep"), "sweep", _SWEEP_KEYS)}
    gnode = {**DEFAULTS["sweep"]["gamma_node"],
             **_mapping(sw["gamma_node"], "sweep.gamma_node", _GAMMA_NODE_KEYS)}
    reactive = sw["reactive_budget"]
    if isinstance(reactive, bool) or not isinstance(reactive, (int, float)) or reactive < 0:
        raise ConfigError("sweep.reactive_budget must be a nonnegative number")
    sweep = Sweep(
        p_values=_floats(sw["p_values"], "sweep.p_values", 0.5, 1.0),
        q_values=_floats(sw["q_values"], "sweep.q_values", 0.0, 0.5),
        q_fixed=_floats(sw["q_fixed"], "sweep.q_fixed", 0.0, 0.5),
        p_fixed=_floats(sw["p_fixed"], "sweep.p_fixed", 0.5, 1.0),
        gamma1_values=_floats(sw["gamma1_values"], "sweep.gamma1_values", 0.0, 1.0),
        gamma2_fixed=_floats(sw["gamma2_fixed"], "sweep.gamma2_fixed", 0.0, 1.0),
        reactive_budget=float(reactive),
        gamma_node=NodeParams(Y=1.0, **gnode),
    )

    val = {**DEFAULTS["validate"], **_mapping(raw.get("validate"), "validate", _VALIDATE_KEYS)}
    episodes = val["episodes"]
    if isinstance(episodes, bool) or not isinstance(episodes, int) or episodes < 1:
        raise ConfigError("validate.episodes must be a positive integer")
    if not isinstance(val["cases"], list):
        raise ConfigError("validate.cases must be a list")
    cases = []
    for i, case in enumerate(val["cases"]):
        case = _mapping(case, f"validate.cases[{i}]", _CASE_KEYS)
        sc = parse_scenario(case["scenario"], f"validate.cases[{i}].scenario") \
            if "scenario" in case else scenario
        if "preventive" not in case:
            raise ConfigError(f"validate.cases[{i}] needs a 'preventive' list")
        prev = _floats(case["preventive"], f"validate.cases[{i}].preventive", 0.0, float("inf"))
        cases.append(ValidationCase(sc, prev))
    return ExperimentConfig(scenario, optimizer, sweep, tuple(cases), episodes, seed)


def load_config(path=None):
    """Read a YAML file; ``None`` gives the built-in defaults."""
    if path is None:
        return parse_config({})
    with open(path, encoding="utf-8") as fh:
        try:
            raw = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise ConfigError(f"cannot parse {path}: {exc}") from exc
    return parse_config(raw or {})
