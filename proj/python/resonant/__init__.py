"""Echo state networks with closed-form ridge readouts, trust-region Bayesian
hyper-parameter search and forced-pendulum forecasting experiments.

Configuration documents and hyper-parameters are plain dicts; they use the
same keys as the command-line tool's TOML/JSON files.
"""

import json

from . import _core
from ._core import InvalidArgument, Model, ResonantError, detect_resonance, integrate, nmse

__all__ = [
    "InvalidArgument",
    "Model",
    "ResonantError",
    "detect_resonance",
    "fit",
    "integrate",
    "nmse",
    "optimize",
    "preset",
    "reference_hyperparams",
    "run_forecast",
    "run_heatmap",
    "run_noise_study",
]


def reference_hyperparams():
    """Hyper-parameters shared by the forcing studies."""
    return json.loads(_core.reference_hyperparams())


def fit(targets, inputs=None, *, hyperparams, feedback=False, seed=0, activation="tanh",
        output_activation="identity", washout=None):
    """Fit a reservoir readout. ``activation`` may be a name or a mix dict."""
    if isinstance(activation, dict):
        activation = ",".join(f"{k}={v}" for k, v in activation.items())
    return _core.fit(targets, inputs, json.dumps(hyperparams), feedback, seed, activation,
                     output_activation, washout)


def preset(name, seed=210):
    """Built-in experiment configuration as a dict."""
    return json.loads(_core.preset(name, seed))


def run_forecast(config):
    return _core.run_forecast(json.dumps(config))


def run_noise_study(config):
    return _core.run_noise_study(json.dumps(config))


def run_heatmap(config, workers=0):
    """``cells`` rows are (amplitude, frequency, masked, failed, nmse)."""
    return _core.run_heatmap(json.dumps(config), workers)


def optimize(targets, inputs=None, *, base_hyperparams=None, feedback=False, reservoir_seed=0,
             activation="tanh", bounds_toml="", n_trust_regions=6, max_evals=1200,
             initial_samples=10, seed=0, validation_fraction=0.3):
    """Trust-region Bayesian search; returns the best hyper-parameters and the score trace."""
    base = json.dumps(base_hyperparams) if base_hyperparams else ""
    out = _core.optimize(targets, inputs, base, feedback, reservoir_seed, activation, bounds_toml,
                         n_trust_regions, max_evals, initial_samples, seed, validation_fraction)
    out["best_hyperparams"] = json.loads(out["best_hyperparams"])
    return out
