from __future__ import annotations

import json
import math

import pytest

from stonecalc import probability, stopping
from stonecalc.errors import InvalidConfig
from stonecalc.harness import (
    EXPECTED,
    MUTATIONS,
    REGISTRY,
    SUITES,
    SuiteConfig,
    applied,
    generate_instance,
    replay_fixture,
    run_suites,
)
from stonecalc.harness import generate as gen
from stonecalc.harness.cli import main
from stonecalc.lattice import StoneSpace
from stonecalc.spectral import calculus

SMALL = dict(atoms_range=(1, 6), horizon_range=(1, 4), trials=5)


class TestConfig:
    @pytest.mark.parametrize("bad", [
        dict(atoms_range=(0, 3)),
        dict(atoms_range=(4, 2)),
        dict(horizon_range=(0, 1)),
        dict(trials=0),
        dict(seed=-1),
        dict(suites=("core", "topology")),
        dict(abs_tol=-1.0),
    ])
    def test_invalid(self, bad):
        with pytest.raises(InvalidConfig):
            SuiteConfig(**bad)

    def test_json_roundtrip(self):
        cfg = SuiteConfig(seed=7, suites=("core",), only=("core.lattice_laws",))
        assert SuiteConfig.from_json(json.loads(json.dumps(cfg.to_json()))) == cfg


class TestGeneration:
    @pytest.mark.parametrize("kind", gen.KINDS)
    def test_seed_42_is_byte_identical(self, kind):
        cfg = SuiteConfig(seed=42)
        docs = [json.dumps(gen.encode(generate_instance(cfg, kind)), sort_keys=True) for _ in range(2)]
        assert docs[0] == docs[1]

    def test_different_seeds_differ(self):
        docs = {json.dumps(gen.encode(generate_instance(SuiteConfig(seed=s), "process"))) for s in range(5)}
        assert len(docs) > 1

    def test_single_atom(self):
        inst = generate_instance(SuiteConfig(atoms_range=(1, 1)), "stopping_time")
        assert inst["tau"].space.atom_count == 1
        assert all(len(b) == 1 for n in range(1, inst["filtration"].horizon + 1)
                   for b in inst["filtration"].stage(n).blocks)

    def test_generated_stopping_times_validate(self):
        for seed in range(200):
            inst = generate_instance(SuiteConfig(seed=seed), "stopping_time")
            assert inst["tau"].unmeasurable_level() is None

    @pytest.mark.parametrize("kind", gen.KINDS)
    def test_codec_roundtrip(self, kind):
        inst = generate_instance(SuiteConfig(seed=3), kind)
        doc = json.loads(json.dumps(gen.encode(inst)))
        assert gen.encode(gen.decode(doc)) == doc

    def test_unknown_kind(self):
        with pytest.raises(InvalidConfig):
            generate_instance(SuiteConfig(), "martingale_measure")

    def test_dyadic_weights_have_power_of_two_block_totals(self):
        rng = gen.stream(1, 0, 0, 0)
        filt = gen.random_filtration(rng, StoneSpace(12), 4)
        for n in range(1, 5):
            for b in filt.stage(n).blocks:
                total = float(sum(filt.weights[list(b)]))
                assert total == 2.0 ** round(math.log2(total))


class TestRunner:
    def test_coverage_of_registry(self):
        assert sorted(p.name for p in REGISTRY) == sorted(f"{s}.{n}" for s in SUITES for n in EXPECTED[s])

    def test_small_run_passes(self):
        report = run_suites(SuiteConfig(**SMALL))
        assert report.passed
        names = [r.name for r in report.records]
        assert len(names) == len(set(names))
        for extra in ("harness.coverage", "harness.replay", "harness.determinism"):
            assert report.record(extra).passed

    def test_identical_config_identical_report(self):
        cfg = SuiteConfig(**SMALL, suites=("probability", "stopping"))
        assert run_suites(cfg).dumps() == run_suites(cfg).dumps()

    def test_empty_suites(self):
        report = run_suites(SuiteConfig(suites=()))
        assert report.records == [] and report.passed

    def test_report_fields(self):
        doc = json.loads(run_suites(SuiteConfig(**SMALL, suites=("core",))).dumps())
        assert doc["pass"] is True
        assert set(doc["records"][0]) == {"name", "anchor", "trials", "failures", "first_failure_fixture",
                                          "max_observed_slack"}


class TestMutations:
    def test_restored_after_use(self):
        originals = (calculus._piece_measure, probability._block_average, stopping._level_set)
        for name in MUTATIONS:
            with applied(name):
                pass
        assert (calculus._piece_measure, probability._block_average, stopping._level_set) == originals

    def test_unknown(self):
        with pytest.raises(KeyError):
            with applied("nope"):
                pass

    @pytest.mark.parametrize("name", sorted(MUTATIONS))
    def test_fixture_replays_failure(self, name):
        m = MUTATIONS[name]
        report = run_suites(SuiteConfig(trials=30, suites=(m.target_suite,)), mutation=name)
        assert not report.passed
        failing = [r for r in report.records if not r.passed and r.name.startswith(m.target_suite)]
        assert failing
        fx = json.loads(json.dumps(failing[0].first_failure_fixture))
        assert fx["mutation"] == name
        again = replay_fixture(fx)
        assert not again.ok
        assert again.to_json() == fx["outcome"]
        assert report.record("harness.replay").passed


class TestCli:
    def test_verify_writes_report(self, tmp_path, capsys):
        out = tmp_path / "report.json"
        code = main(["verify", "--seed", "3", "--atoms", "1..5", "--horizon", "1..3", "--trials", "3",
                     "--suite", "core,stopping", "--out", str(out)])
        assert code == 0
        doc = json.loads(out.read_text())
        assert doc["pass"] and doc["config"]["suites"] == ["core", "stopping"]
        assert "overall: PASS" in capsys.readouterr().out

    def test_verify_mutation_fails_and_replays(self, tmp_path):
        out, fixtures = tmp_path / "report.json", tmp_path / "fx"
        code = main(["verify", "--trials", "20", "--suite", "probability", "--mutation", "ce_dropped_weight",
                     "--out", str(out), "--fixtures", str(fixtures)])
        assert code == 1
        files = sorted(fixtures.glob("*.json"))
        assert files
        assert main(["replay", "--fixture", str(files[0])]) == 1
        assert main(["replay", "--fixture", str(out)]) == 1

    def test_replay_passing_fixture(self, tmp_path):
        report = run_suites(SuiteConfig(trials=20, suites=("stopping",)), mutation="hitting_level_shift")
        fx = next(r.first_failure_fixture for r in report.records if r.first_failure_fixture)
        fx["mutation"] = None
        path = tmp_path / "fx.json"
        path.write_text(json.dumps(fx))
        assert main(["replay", "--fixture", str(path)]) == 0

    def test_invalid_config_exit_code(self, capsys):
        assert main(["verify", "--atoms", "5..2"]) == 2
        assert "invalid configuration" in capsys.readouterr().err

    def test_bad_suite_name(self):
        with pytest.raises(SystemExit):
            main(["verify", "--suite", "core,topology"])
