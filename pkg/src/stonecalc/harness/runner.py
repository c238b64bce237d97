"""Run the property suites and assemble a report; replay failure fixtures."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from . import generate as gen
from .config import SUITES, SuiteConfig
from .mutations import applied
from .properties import EXPECTED, Outcome, Property, by_name

FIXTURE_FORMAT = 1


@dataclass
class Record:
    name: str
    anchor: str
    trials: int = 0
    failures: int = 0
    first_failure_fixture: dict | None = None
    max_observed_slack: float = 0.0

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def to_json(self) -> dict:
        return {"name": self.name, "anchor": self.anchor, "trials": self.trials, "failures": self.failures,
                "first_failure_fixture": self.first_failure_fixture,
                "max_observed_slack": self.max_observed_slack}


@dataclass
class Report:
    config: SuiteConfig
    mutation: str | None = None
    records: list[Record] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    def record(self, name: str) -> Record:
        for r in self.records:
            if r.name == name:
                return r
        raise KeyError(name)

    def to_json(self) -> dict:
        return {"config": self.config.to_json(), "mutation": self.mutation, "pass": self.passed,
                "records": [r.to_json() for r in self.records]}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)


def property_key(p: Property) -> tuple[int, int]:
    short = p.name.split(".", 1)[1]
    return SUITES.index(p.suite), EXPECTED[p.suite].index(short)


def selected(cfg: SuiteConfig) -> list[Property]:
    props = by_name()
    out = []
    for suite in SUITES:
        if suite not in cfg.suites:
            continue
        for short in EXPECTED[suite]:
            name = f"{suite}.{short}"
            if cfg.only and name not in cfg.only:
                continue
            if name in props:
                out.append(props[name])
    return out


def _trial_rng(cfg: SuiteConfig, p: Property, trial: int):
    s, i = property_key(p)
    return gen.stream(cfg.seed, s, i, trial)


def _run_trial(p: Property, cfg: SuiteConfig, trial: int):
    inst = None
    try:
        inst = p.generate(_trial_rng(cfg, p, trial), cfg)
        out = p.check(inst, cfg)
    except Exception as exc:  # failures are data
        out = Outcome(False, 0.0, f"{type(exc).__name__}: {exc}")
    return inst, out


def _fixture(p: Property, cfg: SuiteConfig, trial: int, inst, out: Outcome, mutation) -> dict:
    s, i = property_key(p)
    try:
        encoded = gen.encode(inst) if inst is not None else None
    except TypeError:
        encoded = None
    return {"format": FIXTURE_FORMAT, "property": p.name,
            "stream": {"seed": cfg.seed, "suite": s, "property": i, "trial": trial},
            "config": cfg.to_json(), "mutation": mutation, "instance": encoded, "outcome": out.to_json()}


def run_property(p: Property, cfg: SuiteConfig, mutation: str | None = None) -> Record:
    rec = Record(p.name, p.anchor)
    with applied(mutation):
        for trial in range(cfg.trials):
            inst, out = _run_trial(p, cfg, trial)
            rec.trials += 1
            rec.max_observed_slack = max(rec.max_observed_slack, float(out.slack))
            if not out.ok:
                rec.failures += 1
                if rec.first_failure_fixture is None:
                    rec.first_failure_fixture = _fixture(p, cfg, trial, inst, out, mutation)
    return rec


def run_suites(cfg: SuiteConfig, mutation: str | None = None) -> Report:
    cfg.validate()
    report = Report(cfg, mutation)
    props = selected(cfg)
    for p in props:
        report.records.append(run_property(p, cfg, mutation))
    if props:
        report.records.extend(_harness_records(cfg, props, report, mutation))
    return report


def _harness_records(cfg, props, report, mutation) -> list[Record]:
    coverage = Record("harness.coverage", "one record per property", trials=1)
    names = [r.name for r in report.records]
    wanted = [p.name for p in props]
    expected = [f"{s}.{n}" for s in SUITES if s in cfg.suites for n in EXPECTED[s]
                if not cfg.only or f"{s}.{n}" in cfg.only]
    if sorted(names) != sorted(expected) or sorted(wanted) != sorted(expected):
        coverage.failures = 1
        coverage.first_failure_fixture = {"missing": sorted(set(expected) - set(names)),
                                          "duplicated": sorted({n for n in names if names.count(n) > 1})}

    replay = Record("harness.replay", "failure fixtures replay bit-exactly")
    for r in report.records:
        if r.first_failure_fixture is None:
            continue
        replay.trials += 1
        fixture = json.loads(json.dumps(r.first_failure_fixture))
        again = replay_fixture(fixture)
        if again.to_json() != fixture["outcome"]:
            replay.failures += 1
            if replay.first_failure_fixture is None:
                replay.first_failure_fixture = fixture

    determinism = Record("harness.determinism", "identical streams give identical fixtures")
    with applied(mutation):
        for p in props:
            determinism.trials += 1
            docs = [json.dumps(gen.encode(p.generate(_trial_rng(cfg, p, 0), cfg)), sort_keys=True)
                    for _ in range(2)]
            if docs[0] != docs[1]:
                determinism.failures += 1
    return [coverage, replay, determinism]


def replay_fixture(fixture: dict) -> Outcome:
    """Re-run the check recorded in a fixture, under its mutation if any."""
    if fixture.get("format") != FIXTURE_FORMAT:
        raise ValueError(f"unsupported fixture format {fixture.get('format')!r}")
    p = by_name()[fixture["property"]]
    cfg = SuiteConfig.from_json(fixture["config"])
    with applied(fixture.get("mutation")):
        if fixture.get("instance") is None:
            _, out = _run_trial(p, cfg, fixture["stream"]["trial"])
            return out
        try:
            return p.check(gen.decode(fixture["instance"]), cfg)
        except Exception as exc:
            return Outcome(False, 0.0, f"{type(exc).__name__}: {exc}")
