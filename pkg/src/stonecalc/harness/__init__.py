"""Seeded property suites, mutation checks and fixture replay."""

from .config import SUITES, SuiteConfig
from .generate import generate_instance, stream
from .mutations import MUTATIONS, applied
from .properties import EXPECTED, REGISTRY, Outcome, Property
from .runner import Record, Report, replay_fixture, run_property, run_suites

__all__ = [
    "EXPECTED", "MUTATIONS", "REGISTRY", "SUITES", "Outcome", "Property", "Record", "Report",
    "SuiteConfig", "applied", "generate_instance", "replay_fixture", "run_property", "run_suites", "stream",
]
