"""The property suites.

Each property draws an instance from its stream (``generate``) and checks it
(``check``).  Instances are plain dicts of library objects so a failing one
can be serialized with :func:`generate.encode` and replayed later.  Oracles
here are written independently of the library routes they test: per-atom
loops, block enumeration with Python sets, and exact rational arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .. import lattice as lat
from .. import probability as prob
from .. import stopping as stp
from ..spectral import calculus as calc
from ..spectral.intervals import IntervalSet
from ..spectral.steps import StepFunction
from . import generate as gen
from .config import SuiteConfig


@dataclass
class Outcome:
    ok: bool
    slack: float = 0.0
    message: str = ""

    def to_json(self) -> dict:
        return {"ok": self.ok, "slack": self.slack, "message": self.message}


@dataclass(frozen=True)
class Property:
    name: str
    suite: str
    anchor: str
    generate: Callable[[np.random.Generator, SuiteConfig], dict]
    check: Callable[[dict, SuiteConfig], Outcome]


REGISTRY: list[Property] = []


def prop(suite: str, name: str, anchor: str):
    def wrap(cls):
        REGISTRY.append(Property(f"{suite}.{name}", suite, anchor, cls.generate, cls.check))
        return cls

    return wrap


def _fail(message: str, slack: float = 0.0) -> Outcome:
    return Outcome(False, slack, message)


def _all(checks: list[tuple[bool, str]], slack: float = 0.0) -> Outcome:
    for ok, label in checks:
        if not ok:
            return _fail(label, slack)
    return Outcome(True, slack)


# -- independent oracles -------------------------------------------------------


def brute_measurable(values, filtration: prob.Filtration) -> bool:
    """Every level set ``{tau = n}`` is a union of blocks of ``F_n``."""
    vals = list(values)
    for n in {v for v in vals if math.isfinite(v)}:
        level = {i for i, v in enumerate(vals) if v == n}
        for block in filtration.stage(int(n)).blocks:
            b = set(block)
            if b & level and not b <= level:
                return False
    return True


def exact_block_average(ce: prob.ConditionalExpectation, x) -> list[Fraction]:
    out = [Fraction(0)] * ce.space.atom_count
    for block in ce.blocks:
        num = sum(Fraction(float(ce.weights[a])) * Fraction(float(x[a])) for a in block)
        den = sum(Fraction(float(ce.weights[a])) for a in block)
        for a in block:
            out[a] = num / den
    return out


def stopped_oracle(process, tau_values) -> list[float]:
    return [float(process.at(int(t)).values[i]) for i, t in enumerate(tau_values)]


# == core =======================================================================


@prop("core", "lattice_laws", "order complete lattice laws of C(K)")
class LatticeLaws:
    @staticmethod
    def generate(rng, cfg):
        space = gen.random_space(rng, cfg)
        return {"x": gen.random_element(rng, space), "y": gen.random_element(rng, space),
                "z": gen.random_element(rng, space)}

    @staticmethod
    def check(inst, cfg):
        x, y, z = inst["x"], inst["y"], inst["z"]
        return _all([
            ((x | y) == (y | x) and (x & y) == (y & x), "commutativity"),
            (((x | y) | z) == (x | (y | z)) and ((x & y) & z) == (x & (y & z)), "associativity"),
            ((x | (x & y)) == x and (x & (x | y)) == x, "absorption"),
            ((x + (y | z)) == ((x + y) | (x + z)), "translation over sup"),
            ((x + (y & z)) == ((x + y) & (x + z)), "translation over inf"),
            (abs(x) == (x | -x), "|x| = x v -x"),
            (x == x.positive_part - x.negative_part, "x = x+ - x-"),
            (abs(x) == x.positive_part + x.negative_part, "|x| = x+ + x-"),
            (all(float(a) == max(b, c) for a, b, c in zip((y | z).values, y.values, z.values)),
             "sup is the per-atom maximum"),
        ])


@prop("core", "f_algebra", "f-algebra multiplication and commuting band projections")
class FAlgebra:
    @staticmethod
    def generate(rng, cfg):
        space = gen.random_space(rng, cfg)
        masks = rng.random((2, space.atom_count)) < 0.5
        return {"x": gen.random_element(rng, space), "y": gen.random_element(rng, space),
                "z": gen.random_element(rng, space),
                "p": space.clopen_from_mask(masks[0]).indicator(),
                "q": space.clopen_from_mask(masks[1]).indicator()}

    @staticmethod
    def check(inst, cfg):
        x, y, z = inst["x"], inst["y"], inst["z"]
        P = lat.BandProjection(inst["p"].support())
        Q = lat.BandProjection(inst["q"].support())
        return _all([
            ((x * y) * z == x * (y * z), "associativity"),
            (x * y == y * x, "commutativity"),
            (lat.apply_projection(P, lat.apply_projection(Q, x))
             == lat.apply_projection(Q, lat.apply_projection(P, x)), "projections commute"),
            ((P @ Q).band_support == (P.band_support & Q.band_support), "composite support"),
            (lat.apply_projection(P @ Q, x) == lat.apply_projection(P, lat.apply_projection(Q, x)),
             "composite acts as the product"),
        ])


@prop("core", "sup_completion_decomposition", "finite and infinite parts in the sup-completion")
class SupCompletion:
    @staticmethod
    def generate(rng, cfg):
        space = gen.random_space(rng, cfg)
        v = gen.dyadic(rng, space.atom_count)
        v[rng.random(space.atom_count) < 0.3] = np.inf
        return {"u": lat.LatticeElement(space, v)}

    @staticmethod
    def check(inst, cfg):
        u = inst["u"]
        fin, infp = lat.finite_infinite_decomposition(u)
        return _all([
            (fin * infp == u.space.zero, "parts are disjoint"),
            (fin + infp == u, "parts sum to u"),
            (fin.is_finite, "finite part is finite"),
            (all(v in (0.0, math.inf) for v in infp.values), "infinite part is 0 or inf"),
        ])


@prop("core", "sup_infinite_criterion", "sup G is infinite exactly when it is infinite at every atom")
class SupInfinite:
    @staticmethod
    def generate(rng, cfg):
        space = gen.random_space(rng, cfg)
        k = int(rng.integers(1, 5))
        fam = []
        for _ in range(k):
            v = np.abs(gen.dyadic(rng, space.atom_count))
            v[rng.random(space.atom_count) < rng.uniform(0.2, 0.9)] = np.inf
            fam.append(lat.LatticeElement(space, v))
        return {"family": fam}

    @staticmethod
    def check(inst, cfg):
        G = inst["family"]
        n = G[0].space.atom_count
        oracle = all(any(g.values[w] == math.inf for g in G) for w in range(n))
        top = lat.sup_family(G)
        return _all([
            (lat.sup_is_infinite(G) == oracle, "criterion disagrees with per-atom oracle"),
            ((top == G[0].space.constant(math.inf)) == oracle, "sup_family disagrees with oracle"),
        ])


# == spectral ===================================================================


def _random_x(rng, cfg, dyadic=True):
    space = gen.random_space(rng, cfg)
    if dyadic:
        return gen.random_element(rng, space)
    return lat.LatticeElement(space, rng.uniform(-4.0, 4.0, space.atom_count))


@prop("spectral", "step_integral", "daniell integral of step functions and its band closed form")
class StepIntegral:
    @staticmethod
    def generate(rng, cfg):
        x = _random_x(rng, cfg)
        return {"x": x, "f": gen.random_step(rng, near=x.values.tolist())}

    @staticmethod
    def check(inst, cfg):
        x, f = inst["x"], inst["f"]
        direct = calc.daniell_step(f, x)
        oracle = lat.LatticeElement(x.space, [float(f(v)) for v in x.values.tolist()])
        closed = calc.daniell_step_closed_form(f, x)
        return _all([(direct == oracle, f"I(f) = {direct.values.tolist()} but f(X) = {oracle.values.tolist()}"),
                     (closed == oracle, "band closed form differs from f(X)")])


@prop("spectral", "lattice_homomorphism", "the functional calculus is a lattice homomorphism")
class LatticeHomomorphism:
    @staticmethod
    def generate(rng, cfg):
        return {"x": _random_x(rng, cfg, dyadic=rng.random() < 0.5),
                "f": gen.random_recipe(rng), "g": gen.random_recipe(rng)}

    @staticmethod
    def check(inst, cfg):
        x = inst["x"]
        f, g = gen.build_function(inst["f"]), gen.build_function(inst["g"])
        If, Ig = calc.compose_continuous(f, x), calc.compose_continuous(g, x)
        return _all([
            (calc.compose_continuous(f.sup(g), x) == (If | Ig), "sup"),
            (calc.compose_continuous(f.inf(g), x) == (If & Ig), "inf"),
            (calc.compose_continuous(abs(f), x) == abs(If), "modulus"),
        ])


@prop("spectral", "linearity_positivity", "daniell integral is positive and linear on step functions")
class LinearityPositivity:
    @staticmethod
    def generate(rng, cfg):
        x = _random_x(rng, cfg)
        near = x.values.tolist()
        f = gen.random_step(rng, near)
        return {"x": x, "f": f, "g": gen.random_step(rng, near), "h": abs(gen.random_step(rng, near)),
                "alpha": float(abs(gen.dyadic(rng))), "beta": float(abs(gen.dyadic(rng)))}

    @staticmethod
    def check(inst, cfg):
        x, f, g, h, a, b = (inst[k] for k in ("x", "f", "g", "h", "alpha", "beta"))
        I = calc.daniell_step
        return _all([
            (I(f * a + g * b, x) == I(f, x).scale(a) + I(g, x).scale(b), "linearity"),
            (I(f, x) <= I(f + h, x), "monotonicity"),
            (I(h, x).is_positive, "positivity"),
        ])


@prop("spectral", "daniell_axiom", "I(f_n) decreases to 0 when f_n does")
class DaniellAxiom:
    @staticmethod
    def generate(rng, cfg):
        x = _random_x(rng, cfg)
        f0 = abs(gen.random_step(rng, x.values.tolist(), bound=2.0))
        top = max([abs(v) for v in f0.values] + [abs(f0.value_at_infinity)])
        h = float(rng.integers(1, 5)) / 4
        length = int(math.ceil(top / h)) + int(rng.integers(1, 4))
        lo, hi = -6.0 - float(rng.integers(0, 4)), 6.0 + float(rng.integers(0, 4))
        seq = []
        for k in range(length):
            shrink = k / max(length - 1, 1)
            window = IntervalSet.interval(lo * (1 - shrink), hi * (1 - shrink)) if k < length - 1 else IntervalSet.empty()
            damp = (f0 - StepFunction.constant(k * h)).positive_part
            seq.append(_restrict(damp, window))
        return {"x": x, "sequence": seq}

    @staticmethod
    def check(inst, cfg):
        x, seq = inst["x"], inst["sequence"]
        pts = np.unique(np.concatenate([s.witness_points() for s in seq] + [x.values]))
        if any(not np.all(b(pts) <= a(pts)) for a, b in zip(seq, seq[1:])) or seq[-1] != StepFunction.constant(0.0):
            return _fail("construction does not decrease to zero")
        ints = [calc.daniell_step(f, x) for f in seq]
        return _all([
            (all(i.is_positive for i in ints), "I(f_n) positive"),
            (all(b <= a for a, b in zip(ints, ints[1:])), "I(f_n) decreasing"),
            (ints[-1] == x.space.zero, "I(f_n) reaches 0"),
        ])


def _restrict(f: StepFunction, window: IntervalSet) -> StepFunction:
    """``f * 1_window`` for a positive step function f."""
    if not window:
        return StepFunction.constant(0.0)
    big = max(float(np.max(f.values, initial=0.0)), f.value_at_infinity, 1.0)
    return f.inf(StepFunction.indicator(window, big))


@prop("spectral", "uo_transfer", "f(x_n) converges to f(x) when x_n converges to x")
class UoTransfer:
    @staticmethod
    def generate(rng, cfg):
        x = _random_x(rng, cfg, dyadic=False)
        return {"x": x, "direction": rng.uniform(-1.0, 1.0, x.space.atom_count), "f": gen.random_recipe(rng)}

    @staticmethod
    def check(inst, cfg):
        x, d, f = inst["x"], inst["direction"], gen.build_function(inst["f"])
        fx = calc.compose_continuous(f, x)
        worst = 0.0
        r = float(np.max(np.abs(x.values))) + 1.0
        L = f.lipschitz_on(-r, r)
        for n in range(1, 31):
            delta = d * 2.0 ** -n
            fxn = calc.compose_continuous(f, x + lat.LatticeElement(x.space, delta))
            err = np.abs(fxn.values - fx.values)
            bound = L * np.abs(delta) + cfg.abs_tol + cfg.rel_tol * np.abs(fx.values)
            worst = max(worst, float(np.max(err - bound)))
            if np.any(err > bound):
                return _fail(f"|f(x_n) - f(x)| exceeds its schedule at n = {n}", worst)
        return Outcome(True, max(worst, 0.0))


EPS = 2.0 ** -20
CALCULUS_TOL = 2.0 ** -18


@prop("spectral", "functional_calculus", "I(f) = f o X through monotone step approximation")
class FunctionalCalculus:
    @staticmethod
    def generate(rng, cfg):
        return {"x": _random_x(rng, cfg, dyadic=rng.random() < 0.3), "f": gen.random_recipe(rng)}

    @staticmethod
    def check(inst, cfg):
        x, f = inst["x"], gen.build_function(inst["f"])
        via_steps = calc.daniell_continuous(f, x, EPS)
        direct = calc.compose_continuous(f, x)
        err = float(np.max(np.abs((via_steps - direct).values)))
        if err > CALCULUS_TOL:
            return _fail(f"daniell path off by {err}", err)
        return Outcome(True, err)


# == probability ================================================================


def _filtration(rng, cfg):
    space = gen.random_space(rng, cfg)
    return gen.random_filtration(rng, space, gen.random_horizon(rng, cfg))


@prop("probability", "ce_weighted_average_oracle", "conditional expectation as weighted block average")
class CeOracle:
    @staticmethod
    def generate(rng, cfg):
        filt = _filtration(rng, cfg)
        t = int(rng.integers(1, filt.horizon + 1))
        return {"filtration": filt, "stage": t, "x": gen.random_element(rng, filt.space),
                "f": gen.block_constant(rng, filt.stage(t))}

    @staticmethod
    def check(inst, cfg):
        F = inst["filtration"].stage(inst["stage"])
        x, f = inst["x"], inst["f"]
        got = F(x)
        oracle = exact_block_average(F, x.values)
        return _all([
            (all(Fraction(float(v)) == o for v, o in zip(got.values, oracle)), "differs from exact average"),
            (F(f * x) == f * F(x), "averaging property"),
        ])


@prop("probability", "strict_positivity", "conditional expectation is a strictly positive projection fixing E")
class StrictPositivity:
    @staticmethod
    def generate(rng, cfg):
        filt = _filtration(rng, cfg)
        x = gen.random_element(rng, filt.space, positive=True)
        if not np.any(x.values):
            x = x + filt.space.clopen([int(rng.integers(0, filt.space.atom_count))]).indicator()
        return {"filtration": filt, "stage": int(rng.integers(1, filt.horizon + 1)), "x": x}

    @staticmethod
    def check(inst, cfg):
        F = inst["filtration"].stage(inst["stage"])
        x = inst["x"]
        Fx = F(x)
        touched = {F.labels[a] for a in x.support()}
        return _all([
            (all(Fx.values[a] > 0 for a in range(len(Fx)) if F.labels[a] in touched), "strict positivity"),
            (Fx.is_positive, "positivity"),
            (F(Fx) == Fx, "idempotence"),
            (F(x.space.unit) == x.space.unit, "F E = E"),
        ])


@prop("probability", "tower", "tower property of a filtration")
class Tower:
    @staticmethod
    def generate(rng, cfg):
        filt = _filtration(rng, cfg)
        s, t = sorted(int(v) for v in rng.integers(1, filt.horizon + 1, size=2))
        return {"filtration": filt, "s": s, "t": t, "x": gen.random_element(rng, filt.space)}

    @staticmethod
    def check(inst, cfg):
        filt = inst["filtration"]
        Fs, Ft = filt.stage(inst["s"]), filt.stage(inst["t"])
        basis = [filt.space.clopen([a]).indicator() for a in filt.space.atoms] + [inst["x"]]
        return _all([
            (all(Fs(Ft(e)) == Fs(e) and Ft(Fs(e)) == Fs(e) for e in basis), "F_s F_t = F_t F_s = F_s"),
            (filt.tower_defect() == 0.0, "operator tower defect"),
        ])


@prop("probability", "range_regularity", "the range of a conditional expectation is a sublattice")
class RangeRegularity:
    @staticmethod
    def generate(rng, cfg):
        filt = _filtration(rng, cfg)
        stage = int(rng.integers(1, filt.horizon + 1))
        F = filt.stage(stage)
        return {"filtration": filt, "stage": stage,
                "family": [gen.block_constant(rng, F) for _ in range(int(rng.integers(1, 6)))]}

    @staticmethod
    def check(inst, cfg):
        F = inst["filtration"].stage(inst["stage"])
        fam = inst["family"]
        top, bottom = fam[0], fam[0]
        for g in fam[1:]:
            top, bottom = top | g, bottom & g
        return _all([(F.is_measurable(top) and F(top) == top, "sup leaves the range"),
                     (F.is_measurable(bottom) and F(bottom) == bottom, "inf leaves the range")])


CONVEX = {"max": prob.max_function, "l1": prob.l1_norm, "quadratic": prob.quadratic}


@prop("probability", "jensen", "conditional Jensen inequality for convex f of several variables")
class Jensen:
    @staticmethod
    def generate(rng, cfg):
        filt = _filtration(rng, cfg)
        n = int(rng.integers(1, 4))
        return {"filtration": filt, "stage": int(rng.integers(1, filt.horizon + 1)),
                "f": list(CONVEX)[int(rng.integers(0, 3))], "n": n,
                "xs": [gen.random_element(rng, filt.space) for _ in range(n)],
                "slope": gen.dyadic(rng, n, 2.0), "intercept": float(gen.dyadic(rng))}

    @staticmethod
    def check(inst, cfg):
        F = inst["filtration"].stage(inst["stage"])
        xs = inst["xs"]
        rec = prob.jensen(CONVEX[inst["f"]](inst["n"]), xs, F, strict=False)
        aff = prob.jensen(prob.affine_function(inst["slope"], inst["intercept"]), xs, F, strict=False)
        aff_dev = float(np.max(np.abs(aff.slack.values)))
        slack = max(-rec.min_slack, aff_dev, 0.0)
        return _all([
            (rec.min_slack >= -1e-12, f"{inst['f']}: slack {rec.min_slack}"),
            (rec.chain_defect <= 1e-12, "F(L(X)) != L(F X)"),
            (rec.chain_min_margin >= -1e-12, "F(f(X)) below a minorant at F X"),
            (aff_dev <= 1e-12, f"affine slack {aff_dev}"),
        ], slack)


@prop("probability", "martingale_classification", "Doob martingales and drifted processes classify correctly")
class MartingaleClassification:
    @staticmethod
    def generate(rng, cfg):
        filt = _filtration(rng, cfg)
        return {"filtration": filt, "martingale": gen.random_martingale(rng, filt),
                "drift": np.cumsum(rng.integers(1, 4, size=filt.horizon) / 4.0)}

    @staticmethod
    def check(inst, cfg):
        m, drift = inst["martingale"], inst["drift"]
        filt = m.filtration
        up = prob.AdaptedProcess(filt, [x + filt.space.constant(d) for x, d in zip(m.path, drift)])
        down = prob.AdaptedProcess(filt, [x - filt.space.constant(d) for x, d in zip(m.path, drift)])
        K = prob.ProcessKind
        single = filt.horizon == 1
        return _all([
            (prob.classify_process(m) is K.MARTINGALE, "Doob martingale"),
            (prob.classify_process(up) is (K.MARTINGALE if single else K.SUBMARTINGALE), "upward drift"),
            (prob.classify_process(down) is (K.MARTINGALE if single else K.SUPERMARTINGALE), "downward drift"),
        ])


@prop("probability", "convex_image_submartingale", "convex images of martingales are submartingales")
class ConvexImage:
    @staticmethod
    def generate(rng, cfg):
        filt = _filtration(rng, cfg)
        n = int(rng.integers(1, 3))
        return {"filtration": filt, "f": list(CONVEX)[int(rng.integers(0, 3))],
                "components": [gen.random_martingale(rng, filt) for _ in range(n)],
                "slope": gen.dyadic(rng, n, 2.0)}

    @staticmethod
    def check(inst, cfg):
        comps = inst["components"]
        n = len(comps)
        rec = prob.convex_image_submartingale(comps, CONVEX[inst["f"]](n))
        aff = prob.convex_image_submartingale(comps, prob.affine_function(inst["slope"], 0.5))
        return _all([(rec.is_submartingale, f"{inst['f']} image is {rec.kind.value}"),
                     (aff.kind is prob.ProcessKind.MARTINGALE, f"affine image is {aff.kind.value}")])


# == stopping ===================================================================


@prop("stopping", "representation", "stopping times correspond to increasing commuting band projections")
class Representation:
    @staticmethod
    def generate(rng, cfg):
        filt = _filtration(rng, cfg)
        length = filt.horizon + int(rng.integers(0, 3))
        # bands grown directly: W_n adds whole F_n blocks
        masks, w = [], np.zeros(filt.space.atom_count, dtype=bool)
        for n in range(1, length + 1):
            for b in filt.stage(n).blocks:
                if rng.random() < 0.3:
                    w[list(b)] = True
            masks.append(filt.space.clopen_from_mask(w).indicator())
        return {"filtration": filt, "tau": gen.random_stopping_time(rng, filt), "bands": masks}

    @staticmethod
    def check(inst, cfg):
        filt, tau = inst["filtration"], inst["tau"]
        bands = [lat.BandProjection(m.support()) for m in inst["bands"]]
        back = stp.from_projections(stp.to_projections(tau), filt)
        sigma = stp.from_projections(bands, filt)
        again = stp.to_projections(sigma, length=len(bands))
        return _all([(back == tau, "tau -> projections -> tau"),
                     (again == bands, "projections -> tau -> projections"),
                     (brute_measurable(sigma.values, filt), "recovered time not measurable")])


@prop("stopping", "level_set_recovery", "level sets of the time built from disjoint clopen sets")
class LevelSets:
    @staticmethod
    def generate(rng, cfg):
        filt = _filtration(rng, cfg)
        tau = gen.random_stopping_time(rng, filt)
        top = filt.horizon + 2
        return {"filtration": filt,
                "sets": [filt.space.clopen_from_mask(tau.values == n).indicator() for n in range(1, top + 1)]}

    @staticmethod
    def check(inst, cfg):
        filt = inst["filtration"]
        sets = [s.support() for s in inst["sets"]]
        tau = stp.from_level_sets(filt, sets)
        v = tau.values
        return _all([
            (all(tau.level_set(n) == u for n, u in enumerate(sets, start=1)), "{tau = n} != U_n"),
            (all(math.isinf(t) or (t >= 1 and t == int(t)) for t in v), "range outside N u {inf}"),
            (brute_measurable(v, filt), "not measurable"),
        ])


@prop("stopping", "closure_algebra", "stopping times are closed under join, meet, sum, sup, inf, time change")
class ClosureAlgebra:
    @staticmethod
    def generate(rng, cfg):
        filt = _filtration(rng, cfg)
        fam = [gen.random_stopping_time(rng, filt) for _ in range(int(rng.integers(1, 5)))]
        top = filt.horizon + 2
        return {"filtration": filt, "sigma": gen.random_stopping_time(rng, filt),
                "tau": gen.random_stopping_time(rng, filt), "family": fam,
                "nk": gen.random_increasing_naturals(rng, top)}

    @staticmethod
    def check(inst, cfg):
        filt, s, t, fam, nk = (inst[k] for k in ("filtration", "sigma", "tau", "family", "nk"))
        sv, tv = s.values.tolist(), t.values.tolist()
        results = {
            "join": (s | t, [max(a, b) for a, b in zip(sv, tv)]),
            "meet": (s & t, [min(a, b) for a, b in zip(sv, tv)]),
            "plus": (s + t, [a + b for a, b in zip(sv, tv)]),
            "sup": (stp.st_extremum(fam, "sup"), [max(col) for col in zip(*(f.values.tolist() for f in fam))]),
            "inf": (stp.st_extremum(fam, "inf"), [min(col) for col in zip(*(f.values.tolist() for f in fam))]),
            "time_change": (stp.time_change(t, nk), [nk[int(a) - 1] if math.isfinite(a) else math.inf for a in tv]),
        }
        checks = []
        for op, (got, oracle) in results.items():
            checks.append((got.values.tolist() == [float(v) for v in oracle], f"{op} differs from per-atom oracle"))
            checks.append((brute_measurable(got.values, filt), f"{op} result not measurable"))
        return _all(checks)


@prop("stopping", "stopped_element", "stopped elements and stopped processes")
class StoppedElement:
    @staticmethod
    def generate(rng, cfg):
        filt = _filtration(rng, cfg)
        return {"filtration": filt, "process": gen.random_process(rng, filt),
                "bounded": gen.random_stopping_time(rng, filt, max_value=filt.horizon, allow_inf=False),
                "tau": gen.random_stopping_time(rng, filt)}

    @staticmethod
    def check(inst, cfg):
        p, bounded, tau = inst["process"], inst["bounded"], inst["tau"]
        x = stp.stopped_element(p, bounded)
        sp = stp.stopped_process(p, tau)
        oracle_path = [stopped_oracle(p, [min(v, n) for v in tau.values]) for n in range(1, p.horizon + 1)]
        return _all([
            (x.values.tolist() == stopped_oracle(p, bounded.values), "X_tau differs from pointwise oracle"),
            (all(p.filtration.stage(n)(y) == y for n, y in enumerate(sp.path, start=1)), "stopped process not adapted"),
            ([y.values.tolist() for y in sp.path] == oracle_path, "stopped process differs from oracle"),
        ])


@prop("stopping", "increasing_process_identities", "stopping an increasing process commutes with sup and inf")
class IncreasingIdentities:
    @staticmethod
    def generate(rng, cfg):
        filt = _filtration(rng, cfg)
        T = filt.horizon

        def bounded():
            return gen.random_stopping_time(rng, filt, max_value=T, allow_inf=False)

        return {"filtration": filt, "process": gen.random_process(rng, filt, increasing=True),
                "sigma": bounded(), "tau": bounded(),
                "family": [bounded() for _ in range(int(rng.integers(1, 5)))]}

    @staticmethod
    def check(inst, cfg):
        p, s, t, fam = inst["process"], inst["sigma"], inst["tau"], inst["family"]
        rec = stp.increasing_process_identities(p, s, t, fam)
        oracle_join = [max(a, b) for a, b in zip(stopped_oracle(p, s.values), stopped_oracle(p, t.values))]
        return _all([(rec.join, "join"), (rec.meet, "meet"), (rec.sup, "sup"), (rec.inf, "inf"),
                     (stp.stopped_element(p, s | t).values.tolist() == oracle_join, "join vs per-atom oracle")])


@prop("stopping", "debut", "the debut of 1_{tau <= n} recovers tau")
class Debut:
    @staticmethod
    def generate(rng, cfg):
        filt = _filtration(rng, cfg)
        tau = gen.random_stopping_time(rng, filt)
        hit = gen.random_stopping_time(rng, filt, max_value=filt.horizon)
        return {"filtration": filt, "tau": tau,
                "indicators": prob.AdaptedProcess(filt, [hit.at_most(n).indicator()
                                                         for n in range(1, filt.horizon + 1)])}

    @staticmethod
    def check(inst, cfg):
        tau, ind = inst["tau"], inst["indicators"]
        process, recovered = stp.debut_roundtrip(tau)
        sigma = stp.hitting_time(ind)
        oracle = []
        for w in range(ind.filtration.space.atom_count):
            hits = [n for n in range(1, ind.horizon + 1) if ind.at(n).values[w] == 1]
            oracle.append(float(hits[0]) if hits else math.inf)
        rebuilt = [sigma.at_most(n).indicator() for n in range(1, ind.horizon + 1)]
        return _all([
            (recovered == tau, f"recovered {recovered.values.tolist()} != tau {tau.values.tolist()}"),
            (process.is_increasing(), "debut process not increasing"),
            (sigma.values.tolist() == oracle, "hitting time differs from first-hit oracle"),
            (rebuilt == list(ind.path), "indicator process not rebuilt"),
        ])


def by_name() -> dict[str, Property]:
    return {p.name: p for p in REGISTRY}


def suite_properties(suite: str) -> list[Property]:
    return [p for p in REGISTRY if p.suite == suite]


# names every run must report, kept separately from the registry on purpose
EXPECTED = {
    "core": ["lattice_laws", "f_algebra", "sup_completion_decomposition", "sup_infinite_criterion"],
    "spectral": ["step_integral", "lattice_homomorphism", "linearity_positivity", "daniell_axiom",
                 "uo_transfer", "functional_calculus"],
    "probability": ["ce_weighted_average_oracle", "strict_positivity", "tower", "range_regularity", "jensen",
                    "martingale_classification", "convex_image_submartingale"],
    "stopping": ["representation", "level_set_recovery", "closure_algebra", "stopped_element",
                 "increasing_process_identities", "debut"],
}
