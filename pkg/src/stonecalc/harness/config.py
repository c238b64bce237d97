"""Suite configuration."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

from ..errors import InvalidConfig

SUITES = ("core", "spectral", "probability", "stopping")


@dataclass(frozen=True)
class SuiteConfig:
    """Everything that determines a report; equal configs give identical reports."""

    seed: int = 0
    atoms_range: tuple[int, int] = (1, 16)
    horizon_range: tuple[int, int] = (1, 8)
    trials: int = 1000
    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    suites: tuple[str, ...] = SUITES
    only: tuple[str, ...] = field(default=())  # restrict to these property names

    def __post_init__(self):
        object.__setattr__(self, "atoms_range", tuple(int(a) for a in self.atoms_range))
        object.__setattr__(self, "horizon_range", tuple(int(h) for h in self.horizon_range))
        object.__setattr__(self, "suites", tuple(self.suites))
        object.__setattr__(self, "only", tuple(self.only))
        self.validate()

    def validate(self) -> None:
        if not 0 <= int(self.seed) < 2 ** 64:
            raise InvalidConfig(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        for label, (lo, hi) in (("atoms", self.atoms_range), ("horizon", self.horizon_range)):
            if not 1 <= lo <= hi:
                raise InvalidConfig(f"{label} range must satisfy 1 <= min <= max, got {lo}..{hi}")
        if self.atoms_range[1] > 64:
            raise InvalidConfig("at most 64 atoms are supported")
        if int(self.trials) < 1:
            raise InvalidConfig("trials must be positive")
        if not (self.rel_tol >= 0 and self.abs_tol >= 0):
            raise InvalidConfig("tolerances must be non-negative")
        unknown = set(self.suites) - set(SUITES)
        if unknown:
            raise InvalidConfig(f"unknown suites {sorted(unknown)}")

    def to_json(self) -> dict:
        doc = asdict(self)
        doc["atoms_range"] = list(self.atoms_range)
        doc["horizon_range"] = list(self.horizon_range)
        doc["suites"] = list(self.suites)
        doc["only"] = list(self.only)
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> SuiteConfig:
        return cls(**doc)
