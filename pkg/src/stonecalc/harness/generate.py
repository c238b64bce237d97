"""Seeded instance generation and the fixture codec.

Every trial draws from its own stream, keyed by ``(seed, suite, property,
trial)`` through :class:`numpy.random.SeedSequence` spawn keys, so any trial
can be regenerated on its own.  Scalars are dyadic rationals of modest size
and atom weights are powers of two whose block totals are powers of two;
sums, products and block averages are then exact in binary floating point,
which lets exact properties be checked with ``==``.
"""

from __future__ import annotations

from typing import Any

import numpy as np

from .._json import decode_array, decode_scalar, encode_array, encode_scalar
from ..errors import InvalidConfig
from ..lattice import LatticeElement, StoneSpace
from ..probability import AdaptedProcess, Filtration
from ..spectral import calculus as calc
from ..spectral.steps import StepFunction
from ..stopping import StoppingTime
from .config import SuiteConfig

ROOT_WEIGHT = 2.0 ** 20
MIN_WEIGHT = 2.0 ** 4


def stream(seed: int, suite: int, prop: int, trial: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed), spawn_key=(suite, prop, trial))))


# -- scalars and elements --------------------------------------------------------


def dyadic(rng: np.random.Generator, size=None, bound: float = 4.0, denom: int = 4) -> np.ndarray | float:
    n = int(bound * denom)
    return rng.integers(-n, n + 1, size=size) / denom


def random_space(rng: np.random.Generator, cfg: SuiteConfig) -> StoneSpace:
    lo, hi = cfg.atoms_range
    return StoneSpace(int(rng.integers(lo, hi + 1)))


def random_horizon(rng: np.random.Generator, cfg: SuiteConfig) -> int:
    lo, hi = cfg.horizon_range
    return int(rng.integers(lo, hi + 1))


def random_element(rng, space: StoneSpace, bound: float = 4.0, positive: bool = False) -> LatticeElement:
    v = dyadic(rng, space.atom_count, bound)
    if positive:
        v = np.abs(v)
    # repeated values make ties and coincidences likely
    if space.atom_count > 1 and rng.random() < 0.5:
        v[rng.integers(0, space.atom_count)] = v[rng.integers(0, space.atom_count)]
    return LatticeElement(space, v)


# -- partitions, weights, filtrations -------------------------------------------


def random_partition(rng, atoms) -> list[list[int]]:
    atoms = list(atoms)
    k = int(rng.integers(1, len(atoms) + 1))
    labels = rng.integers(0, k, size=len(atoms))
    return [sorted(a for a, l in zip(atoms, labels) if l == lab) for lab in np.unique(labels)]


def refine(rng, blocks, p_split: float = 0.5) -> list[list[int]]:
    out = []
    for b in blocks:
        out.extend(random_partition(rng, b) if len(b) > 1 and rng.random() < p_split else [list(b)])
    return sorted(out)


def _split_power_of_two(rng, total: float, k: int) -> list[float]:
    parts = [total]
    while len(parts) < k:
        big = [i for i, p in enumerate(parts) if p >= 2 * MIN_WEIGHT]
        i = int(rng.choice(big))
        half = parts.pop(i) / 2
        parts += [half, half]
    rng.shuffle(parts)
    return parts


def dyadic_weights(rng, n_atoms: int, partitions) -> np.ndarray:
    """Atom weights, powers of two, whose totals on every block are powers of two."""
    nodes = [(list(range(n_atoms)), ROOT_WEIGHT)]
    for part in list(partitions) + [[[a] for a in range(n_atoms)]]:
        children = []
        for members, weight in nodes:
            inside = [b for b in part if b[0] in members]
            for b, w in zip(inside, _split_power_of_two(rng, weight, len(inside))):
                children.append((b, w))
        nodes = children
    w = np.empty(n_atoms)
    for (a,), weight in nodes:
        w[a] = weight
    return w


def random_filtration(rng, space: StoneSpace, horizon: int) -> Filtration:
    parts = [random_partition(rng, space.atoms)]
    for _ in range(horizon - 1):
        parts.append(refine(rng, parts[-1]))
    return Filtration.from_partitions(space, parts, dyadic_weights(rng, space.atom_count, parts))


def block_constant(rng, ce, bound: float = 4.0, positive: bool = False) -> LatticeElement:
    per_block = dyadic(rng, len(ce.blocks), bound)
    if positive:
        per_block = np.abs(per_block)
    return LatticeElement(ce.space, per_block[ce.labels])


# -- processes and stopping times -----------------------------------------------


def random_process(rng, filt: Filtration, length: int | None = None, increasing: bool = False) -> AdaptedProcess:
    length = filt.horizon if length is None else length
    path = []
    for n in range(1, length + 1):
        step = block_constant(rng, filt.stage(n), bound=2.0, positive=increasing)
        path.append(step if not path or not increasing else path[-1] + step)
    return AdaptedProcess(filt, path)


def random_martingale(rng, filt: Filtration) -> AdaptedProcess:
    from ..probability import doob_martingale

    return doob_martingale(filt, block_constant(rng, filt.stage(filt.horizon)))


def random_stopping_values(rng, filt: Filtration, max_value: int, allow_inf: bool = True,
                           p_stop: float | None = None) -> np.ndarray:
    """Stop whole F_n blocks at level n; whatever survives is ``inf`` (or ``max_value``)."""
    p = rng.uniform(0.15, 0.6) if p_stop is None else p_stop
    values = np.full(filt.space.atom_count, np.inf)
    for n in range(1, max_value + 1):
        for b in filt.stage(n).blocks:
            if values[b[0]] == np.inf and rng.random() < p:
                values[list(b)] = n
    if not allow_inf or rng.random() < 0.3:
        values[values == np.inf] = max_value
    return values


def random_stopping_time(rng, filt: Filtration, max_value: int | None = None,
                         allow_inf: bool = True) -> StoppingTime:
    top = filt.horizon + 2 if max_value is None else max_value
    return StoppingTime(filt, random_stopping_values(rng, filt, top, allow_inf))


def random_increasing_naturals(rng, length: int) -> list[int]:
    out, cur = [], 0
    for k in range(1, length + 1):
        cur = max(cur + 1, k) + int(rng.integers(0, 3))
        out.append(cur)
    return out


# -- step functions and closed-form continuous functions ------------------------


def random_step(rng, near=(), n_max: int = 6, bound: float = 4.0) -> StepFunction:
    """A step function whose breakpoints often sit exactly on the points ``near``."""
    n = int(rng.integers(0, n_max + 1))
    pool = list(dyadic(rng, n, 6.0, 8))
    near = list(near)
    if near:
        pool += list(rng.choice(near, size=int(rng.integers(1, min(len(near), 4) + 1))))
    bps = np.unique(np.asarray(pool, dtype=float))
    vals = dyadic(rng, len(bps), bound)
    vals[rng.random(len(bps)) < 0.25] = 0.0
    at_inf = 0.0 if rng.random() < 0.5 else float(dyadic(rng, None, bound))
    return StepFunction(bps, vals, at_inf)


def random_recipe(rng, depth: int = 0) -> dict:
    """A closed-form continuous function, as a JSON recipe."""
    r = rng.random()
    if depth < 1 and r < 0.3:
        op = ["sup", "inf", "abs", "add"][int(rng.integers(0, 4))]
        args = [random_recipe(rng, depth + 1)] + ([] if op == "abs" else [random_recipe(rng, depth + 1)])
        return {"kind": op, "args": args}
    r = rng.random()
    if r < 0.4:
        deg = int(rng.integers(0, 4))
        return {"kind": "poly", "coeffs": dyadic(rng, deg + 1, 2.0).tolist()}
    if r < 0.8:
        k = int(rng.integers(2, 6))
        knots = np.unique(dyadic(rng, k, 6.0)).tolist()
        return {"kind": "pwl", "knots": knots, "values": dyadic(rng, len(knots), 4.0).tolist()}
    return {"kind": "bump", "center": float(dyadic(rng, None, 4.0)),
            "radius": float(rng.integers(1, 9) / 4), "height": float(dyadic(rng, None, 4.0))}


def build_function(recipe: dict) -> calc.ContinuousFunction:
    kind = recipe["kind"]
    if kind == "poly":
        return calc.polynomial(recipe["coeffs"])
    if kind == "pwl":
        return calc.piecewise_linear(recipe["knots"], recipe["values"])
    if kind == "bump":
        return calc.bump(recipe["center"], recipe["radius"], recipe["height"])
    args = [build_function(a) for a in recipe["args"]]
    if kind == "sup":
        return args[0].sup(args[1])
    if kind == "inf":
        return args[0].inf(args[1])
    if kind == "add":
        return args[0] + args[1]
    if kind == "abs":
        return abs(args[0])
    raise ValueError(f"unknown recipe kind {kind!r}")


# -- fixture codec --------------------------------------------------------------
#
# Instances are dicts.  Library objects travel in their module JSON forms
# under a one-key tag; stopping times and processes refer to the instance's
# single filtration, stored under the key "filtration".


def encode(obj: Any) -> Any:
    if isinstance(obj, LatticeElement):
        return {"$element": obj.to_json()}
    if isinstance(obj, Filtration):
        return {"$filtration": obj.to_json()}
    if isinstance(obj, StoppingTime):
        return {"$stopping_time": obj.to_json()}
    if isinstance(obj, AdaptedProcess):
        return {"$process": obj.to_json()}
    if isinstance(obj, StepFunction):
        return {"$step": obj.to_json()}
    if isinstance(obj, StoneSpace):
        return {"$space": obj.to_json()}
    if isinstance(obj, np.ndarray):
        return {"$array": encode_array(obj.reshape(-1))}
    if isinstance(obj, dict):
        return {str(k): encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [encode(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return encode_scalar(obj)
    if obj is None or isinstance(obj, str):
        return obj
    raise TypeError(f"cannot encode {type(obj).__name__}")


def decode(doc: Any, filtration: Filtration | None = None) -> Any:
    if isinstance(doc, dict):
        if filtration is None and "filtration" in doc and "$filtration" in doc["filtration"]:
            filtration = Filtration.from_json(doc["filtration"]["$filtration"])
        if len(doc) == 1:
            (tag, body), = doc.items()
            if tag == "$element":
                return LatticeElement.from_json(body)
            if tag == "$filtration":
                return Filtration.from_json(body)
            if tag == "$stopping_time":
                return StoppingTime.from_json(filtration, body)
            if tag == "$process":
                return AdaptedProcess.from_json(filtration, body)
            if tag == "$step":
                return StepFunction.from_json(body)
            if tag == "$space":
                return StoneSpace.from_json(body)
            if tag == "$array":
                return np.array(decode_array(body))
        return {k: decode(v, filtration) for k, v in doc.items()}
    if isinstance(doc, list):
        return [decode(v, filtration) for v in doc]
    if isinstance(doc, str) and doc in ("inf", "-inf"):
        return decode_scalar(doc)
    return doc


def check_kind(kind: str) -> None:
    if kind not in KINDS:
        raise InvalidConfig(f"unknown instance kind {kind!r}; expected one of {sorted(KINDS)}")


def generate_instance(cfg: SuiteConfig, kind: str, rng: np.random.Generator | None = None) -> dict:
    """A standalone fixture of the given kind: space, element, filtration, process or stopping time."""
    check_kind(kind)
    cfg.validate()
    rng = stream(cfg.seed, 0, 0, 0) if rng is None else rng
    space = random_space(rng, cfg)
    if kind == "space":
        return {"space": space}
    if kind == "element":
        return {"x": random_element(rng, space)}
    filt = random_filtration(rng, space, random_horizon(rng, cfg))
    if kind == "filtration":
        return {"filtration": filt}
    if kind == "process":
        return {"filtration": filt, "process": random_martingale(rng, filt)}
    return {"filtration": filt, "tau": random_stopping_time(rng, filt)}


KINDS = ("space", "element", "filtration", "process", "stopping_time")
