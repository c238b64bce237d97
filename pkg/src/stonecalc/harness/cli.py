"""Command line entry point: ``verify`` runs the suites, ``replay`` re-runs failure fixtures."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from ..errors import InvalidConfig
from .config import SUITES, SuiteConfig
from .mutations import MUTATIONS
from .runner import replay_fixture, run_suites


def parse_range(text: str) -> tuple[int, int]:
    """``"A..B"`` or ``"A"`` as an inclusive integer range."""
    lo, sep, hi = text.partition("..")
    try:
        return (int(lo), int(hi)) if sep else (int(lo), int(lo))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected A..B, got {text!r}") from None


def parse_suites(text: str) -> tuple[str, ...]:
    names = tuple(s for s in (p.strip() for p in text.split(",")) if s)
    unknown = [s for s in names if s not in SUITES]
    if unknown:
        raise argparse.ArgumentTypeError(f"unknown suites {unknown}; choose from {','.join(SUITES)}")
    return names


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stonecalc", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run the property suites and write a JSON report")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--atoms", type=parse_range, default=(1, 16), metavar="A..B")
    v.add_argument("--horizon", type=parse_range, default=(1, 8), metavar="H..K")
    v.add_argument("--trials", type=int, default=1000)
    v.add_argument("--suite", type=parse_suites, default=SUITES, metavar="LIST",
                   help=f"comma separated subset of {','.join(SUITES)}")
    v.add_argument("--rel-tol", type=float, default=1e-9)
    v.add_argument("--abs-tol", type=float, default=1e-12)
    v.add_argument("--mutation", choices=sorted(MUTATIONS), default=None,
                   help="run with a deliberate defect in place")
    v.add_argument("--out", type=Path, default=None, help="report path (stdout summary only if omitted)")
    v.add_argument("--fixtures", type=Path, default=None, help="directory for first-failure fixtures")

    r = sub.add_parser("replay", help="re-run the check stored in a failure fixture or report")
    r.add_argument("--fixture", type=Path, required=True)
    return parser


def _verify(args) -> int:
    cfg = SuiteConfig(seed=args.seed, atoms_range=args.atoms, horizon_range=args.horizon, trials=args.trials,
                      rel_tol=args.rel_tol, abs_tol=args.abs_tol, suites=args.suite)
    report = run_suites(cfg, mutation=args.mutation)
    for rec in report.records:
        status = "PASS" if rec.passed else "FAIL"
        print(f"{status}  {rec.name:<45} {rec.failures}/{rec.trials}  slack={rec.max_observed_slack:.3g}")
    print("overall:", "PASS" if report.passed else "FAIL")
    if args.out is not None:
        args.out.write_text(report.dumps() + "\n")
    if args.fixtures is not None:
        args.fixtures.mkdir(parents=True, exist_ok=True)
        for rec in report.records:
            if rec.first_failure_fixture is not None:
                path = args.fixtures / f"{rec.name}.json"
                path.write_text(json.dumps(rec.first_failure_fixture, indent=2) + "\n")
    return 0 if report.passed else 1


def _replay(args) -> int:
    doc = json.loads(args.fixture.read_text())
    fixtures = [r["first_failure_fixture"] for r in doc["records"] if r.get("first_failure_fixture")
                and "property" in r["first_failure_fixture"]] if "records" in doc else [doc]
    ok = True
    for fx in fixtures:
        out = replay_fixture(fx)
        same = out.to_json() == fx.get("outcome")
        ok = ok and out.ok
        print(f"{'PASS' if out.ok else 'FAIL'}  {fx['property']}: {out.message or 'ok'}"
              f"  (matches recorded outcome: {same})")
    return 0 if ok else 1


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _verify(args) if args.command == "verify" else _replay(args)
    except InvalidConfig as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
