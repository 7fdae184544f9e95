"""Calogero-Moser lattice and Benjamin-Ono long-wave toolkit."""

import json

from . import _cmbo
from ._cmbo import (
    AlphaParams,
    ArgumentError,
    BlowUpError,
    CollisionError,
    ConfigError,
    ConsistencyError,
    DomainError,
    Error,
    Lattice,
    PreconditionError,
    antiderivative_meanzero,
    average_op,
    beta_exponent,
    derivative,
    eta_integral,
    eta_riemann,
    eval_at,
    find_alpha_star,
    frac_deriv,
    gamma_exponent,
    hilbert,
    make_alpha_params,
    p2_functional,
    run_cli,
    sobolev_norm,
    solve_bo,
    zeta,
    zeta_gap,
    zeta_tail,
)

__all__ = [name for name in dir(_cmbo) if not name.startswith("_")] + [
    "plan",
    "residual_sweep",
    "validate",
    "config_hash",
]


def _text(config):
    if config is None:
        return "{}"
    return config if isinstance(config, str) else json.dumps(config)


def plan(config=None):
    """Resolved per-epsilon schedule for a config given as dict or JSON text."""
    return json.loads(_cmbo.plan(_text(config)))


def residual_sweep(config=None, jobs=1):
    return json.loads(_cmbo.residual_sweep(_text(config), jobs))


def validate(config=None, jobs=1):
    return json.loads(_cmbo.validate(_text(config), jobs))


def config_hash(config=None):
    return _cmbo.config_hash(_text(config))
