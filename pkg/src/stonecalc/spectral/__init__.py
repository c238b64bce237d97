"""Interval algebra, step functions, spectral systems and the Daniell functional calculus."""

from .calculus import (
    ContinuousFunction,
    SpectralSystem,
    bump,
    compose_continuous,
    compose_multivariate,
    constant,
    cutoff,
    daniell_continuous,
    daniell_monotone,
    daniell_step,
    daniell_step_closed_form,
    identity,
    mu_A,
    piecewise_linear,
    polynomial,
    spectral_system,
    step_approximation,
)
from .intervals import IntervalSet
from .steps import DyadicGridStep, MonotoneStepSequence, StepFunction

__all__ = [
    "ContinuousFunction",
    "DyadicGridStep",
    "IntervalSet",
    "MonotoneStepSequence",
    "SpectralSystem",
    "StepFunction",
    "bump",
    "compose_continuous",
    "compose_multivariate",
    "constant",
    "cutoff",
    "daniell_continuous",
    "daniell_monotone",
    "daniell_step",
    "daniell_step_closed_form",
    "identity",
    "mu_A",
    "piecewise_linear",
    "polynomial",
    "spectral_system",
    "step_approximation",
]
