"""Shared fixtures; the expensive simulation runs are session-scoped so
the acceptance suite and unit tests reuse them."""

import json
import time

import pytest

from kmwave import runner


def _run(cfg_dict):
    return runner.run_scenario(runner.parse_config(json.dumps(cfg_dict)))


@pytest.fixture(scope="session")
def burgers_4096():
    """Inviscid reference run u0 = -sin on n=4096 (timed)."""
    cfg = {
        "equation": {"alpha": 1.0, "beta": 0.0, "nu": 0.0},
        "initial_data": {"kind": "sine", "amplitude": 1.0,
                         "phase": 3.141592653589793},
        "grid": {"n_points": 4096},
        "time": {"t_end": 2.0},
        "monitors": {"g5": {"enabled": False}, "q_monotone": {"enabled": False}},
    }
    t0 = time.time()
    art = _run(cfg)
    return art, time.time() - t0


@pytest.fixture(scope="session")
def gaussian_slope_runs():
    """Dissipative-dispersive runs with u0 = -a*x*exp(-x^2), a in {25,50,100}."""
    arts = {}
    t0 = time.time()
    for a in (25.0, 50.0, 100.0):
        arts[a] = _run({
            "equation": {"alpha": 1.0, "beta": 0.0, "nu": 1.0},
            "initial_data": {"kind": "neg_x_gaussian", "amplitude": a},
            "grid": {"half_length": 10.0, "n_points": 4096},
            "time": {"t_end": 1.0, "dt_max": 1e-3, "breaking_ratio": 40.0},
            "monitors": {"g5": {"enabled": True, "epsilon": 0.1}},
        })
    return arts, time.time() - t0


@pytest.fixture(scope="session")
def monitored_breaking_runs():
    """Breaking runs whose forcing-domination premise holds at every sample."""
    inviscid = _run({
        "equation": {"alpha": 1.0, "beta": 0.0, "nu": 0.0},
        "initial_data": {"kind": "sine"},
        "grid": {"n_points": 1024},
        "time": {"t_end": 2.0},
        "monitors": {"g5": {"enabled": True, "epsilon": 0.1},
                     "nesting": {"enabled": True}},
    })
    viscous = _run({
        "equation": {"alpha": 1.0, "beta": 0.0, "nu": 1.0},
        "initial_data": {"kind": "sine", "amplitude": 500.0},
        "grid": {"n_points": 1024},
        "time": {"t_end": 0.01, "dt_max": 1e-4},
        "monitors": {"g5": {"enabled": True, "epsilon": 0.1},
                     "nesting": {"enabled": True}},
    })
    return {"inviscid": inviscid, "viscous": viscous}
