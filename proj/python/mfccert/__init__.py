"""Model-following control design and certification for the mass-spring-damper benchmark.

Scenario functions accept a preset name ("scenario1", "scenario2") or a
configuration dict with the same fields as the CLI's JSON config.
"""

import json

import numpy as np

from ._mfccert import (
    ConfigError,
    NumericalError,
    gamma_mfc,
    gamma_sl,
    gamma_slhg,
    high_gain,
    place_poles,
    solve_cubic,
    solve_lyapunov,
)
from . import _mfccert

__all__ = [
    "ConfigError",
    "NumericalError",
    "analyze",
    "config",
    "falsify",
    "gamma_mfc",
    "gamma_sl",
    "gamma_slhg",
    "high_gain",
    "place_poles",
    "reproduce",
    "roa",
    "simulate",
    "solve_cubic",
    "solve_lyapunov",
    "steady_state",
]


def _text(cfg):
    if isinstance(cfg, str):
        return _mfccert._preset(cfg)
    return json.dumps(cfg)


def config(cfg="scenario1"):
    """Validated configuration with every default filled in."""
    return json.loads(_mfccert._normalize(_text(cfg)))


def analyze(cfg="scenario1"):
    """Gains, Lyapunov matrix and robustness bounds."""
    return json.loads(_mfccert._analyze(_text(cfg)))


def steady_state(cfg="scenario1"):
    """Equilibria of every loop, multiplicity loss and the y_d sweep."""
    return json.loads(_mfccert._steady_state(_text(cfg)))


def roa(cfg="scenario1"):
    """Region-of-attraction estimates."""
    return json.loads(_mfccert._roa(_text(cfg)))


def simulate(cfg="scenario1", trajectories=True):
    """One entry per run: metrics, plus time series as numpy arrays."""
    text = _text(cfg)
    runs = json.loads(_mfccert._simulate(text))
    if trajectories:
        series = {s["label"]: s["trajectory"] for s in _mfccert._trajectories(text)}
        for run in runs:
            t = series.get(run["label"])
            run["trajectory"] = None if t is None else {k: np.asarray(v) for k, v in t.items()}
    return runs


def falsify(cfg="scenario1"):
    """Monte-Carlo check of every valid certified set."""
    return json.loads(_mfccert._falsify(_text(cfg)))


def reproduce(cfg="scenario1", tolerances=None):
    """Summary rows comparing computed values with the published figures."""
    out = _mfccert._reproduce(_text(cfg), json.dumps(tolerances) if tolerances else "")
    return json.loads(out)
