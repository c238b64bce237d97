"""Conditional expectations, filtrations, adapted processes and Jensen's inequality.

On a finite Stone space the conditional expectations (strictly positive,
order continuous projections fixing E with order complete range) are exactly
the weighted block-averaging operators: a partition of the atoms together
with strictly positive atom weights.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from ._json import decode_array, encode_array
from .errors import (
    ArityMismatch,
    ConsistencyError,
    InvalidFiltration,
    InvalidPartition,
    MinorantViolation,
    NotAdapted,
    SpaceMismatch,
)
from .lattice import ClopenSet, LatticeElement, StoneSpace
from .spectral.calculus import ContinuousFunction, compose_multivariate


def _block_average(labels: np.ndarray, weights: np.ndarray, values: np.ndarray, nblocks: int) -> np.ndarray:
    """Weighted block averages of ``values``, or of each row of a 2-d ``values``."""
    rows = np.atleast_2d(values)
    idx = (labels[None, :] + nblocks * np.arange(rows.shape[0])[:, None]).ravel()
    num = np.bincount(idx, weights=(weights * rows).ravel(), minlength=rows.shape[0] * nblocks)
    den = np.bincount(labels, weights=weights, minlength=nblocks)
    out = (num.reshape(-1, nblocks) / den)[:, labels]
    return out if np.ndim(values) == 2 else out[0]


class ConditionalExpectation:
    """Weighted block averaging: on each block B, ``Fx = sum_B w x / sum_B w``."""

    def __init__(self, space: StoneSpace, blocks: Sequence[Sequence[int]], weights=None):
        self.space = space
        blocks = [tuple(sorted(int(a) for a in b)) for b in blocks]
        if any(len(b) == 0 for b in blocks):
            raise InvalidPartition("blocks must be non-empty")
        seen = [a for b in blocks for a in b]
        if sorted(seen) != list(space.atoms):
            raise InvalidPartition(f"blocks {blocks} do not partition {space.atom_count} atoms")
        self.blocks = tuple(sorted(blocks))
        labels = np.empty(space.atom_count, dtype=np.int64)
        for i, b in enumerate(self.blocks):
            labels[list(b)] = i
        labels.setflags(write=False)
        self.labels = labels
        w = np.ones(space.atom_count) if weights is None else np.array(weights, dtype=float)
        if w.shape != (space.atom_count,) or not (np.isfinite(w).all() and (w > 0).all()):
            raise InvalidPartition("weights must be strictly positive and finite, one per atom")
        w.setflags(write=False)
        self.weights = w

    @classmethod
    def trivial(cls, space: StoneSpace, weights=None) -> ConditionalExpectation:
        return cls(space, [list(space.atoms)], weights)

    @classmethod
    def identity(cls, space: StoneSpace, weights=None) -> ConditionalExpectation:
        return cls(space, [[a] for a in space.atoms], weights)

    def __call__(self, x: LatticeElement) -> LatticeElement:
        return apply_ce(self, x)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ConditionalExpectation):
            return NotImplemented
        return (self.space == other.space and self.blocks == other.blocks
                and np.array_equal(self.weights, other.weights))

    def __hash__(self):
        return hash((self.space, self.blocks, self.weights.tobytes()))

    def __repr__(self):
        return f"ConditionalExpectation(blocks={[list(b) for b in self.blocks]})"

    def matrix(self) -> np.ndarray:
        """The operator as a matrix: column b is the image of the indicator of atom b."""
        m = getattr(self, "_matrix", None)
        if m is None:
            # row b of the batch is F applied to the indicator of atom b
            m = np.ascontiguousarray(
                _block_average(self.labels, self.weights, np.eye(self.space.atom_count), len(self.blocks)).T)
            m.setflags(write=False)
            self._matrix = m
        return m

    def block_of(self, atom: int) -> tuple[int, ...]:
        return self.blocks[self.labels[atom]]

    def is_measurable(self, x: LatticeElement) -> bool:
        """Whether x lies in the range, i.e. is constant on every block."""
        v = x.values
        return all(len(set(v[list(b)].tolist())) == 1 for b in self.blocks)

    def is_measurable_set(self, s: ClopenSet) -> bool:
        return all(set(b) <= s.members or not (set(b) & s.members) for b in self.blocks)

    def refines(self, coarser: ConditionalExpectation) -> bool:
        """Every block of self sits inside a block of ``coarser``."""
        return all(len({coarser.labels[a] for a in b}) == 1 for b in self.blocks)


def apply_ce(f: ConditionalExpectation, x: LatticeElement) -> LatticeElement:
    if x.space != f.space:
        raise SpaceMismatch(f"{f.space} vs {x.space}")
    x.require_finite("conditional expectation argument")
    out = np.array(_block_average(f.labels, f.weights, x.values, len(f.blocks)), dtype=float)
    return LatticeElement._wrap(f.space, out)


class Filtration:
    """Conditional expectations ``F_1, ..., F_T`` on one space with refining partitions.

    Indices are 1-based.  Beyond the horizon the filtration is held constant,
    ``F_n = F_T`` for ``n > T``, so stopping times may take values past T.
    """

    def __init__(self, stages: Sequence[ConditionalExpectation]):
        stages = list(stages)
        if not stages:
            raise InvalidFiltration("a filtration needs at least one stage")
        space = stages[0].space
        for n, st in enumerate(stages, start=1):
            if st.space != space:
                raise InvalidFiltration(f"stage {n} lives on another space")
            if not np.array_equal(st.weights, stages[0].weights):
                raise InvalidFiltration("all stages must share the atom weights")
            if n > 1 and not st.refines(stages[n - 2]):
                raise InvalidFiltration(f"stage {n} does not refine stage {n - 1}")
        self.space = space
        self.stages = tuple(stages)

    @classmethod
    def from_partitions(cls, space: StoneSpace, partitions, weights=None) -> Filtration:
        return cls([ConditionalExpectation(space, p, weights) for p in partitions])

    @property
    def horizon(self) -> int:
        return len(self.stages)

    @property
    def weights(self) -> np.ndarray:
        return self.stages[0].weights

    def __len__(self) -> int:
        return len(self.stages)

    def stage(self, n: int) -> ConditionalExpectation:
        if n < 1:
            raise IndexError(f"filtration indices start at 1, got {n}")
        return self.stages[min(n, len(self.stages)) - 1]

    __getitem__ = stage

    def tower_defect(self) -> float:
        """Largest deviation in ``F_s F_t = F_t F_s = F_s`` (s <= t) over atom indicators."""
        worst = 0.0
        for s, t in itertools.combinations_with_replacement(range(1, self.horizon + 1), 2):
            Ms, Mt = self.stage(s).matrix(), self.stage(t).matrix()
            for other in (Ms @ Mt, Mt @ Ms):
                worst = max(worst, float(np.max(np.abs(other - Ms))))
        return worst

    def __eq__(self, other) -> bool:
        if not isinstance(other, Filtration):
            return NotImplemented
        return self.stages == other.stages

    def __hash__(self):
        return hash(self.stages)

    def to_json(self) -> dict:
        return {"weights": encode_array(self.weights),
                "stages": [[list(b) for b in st.blocks] for st in self.stages]}

    @classmethod
    def from_json(cls, doc: dict) -> Filtration:
        weights = decode_array(doc["weights"])
        space = StoneSpace(len(weights))
        return cls.from_partitions(space, doc["stages"], weights)


class AdaptedProcess:
    """``(X_1, ..., X_T)`` with ``X_n`` in the range of ``F_n``; indices are 1-based."""

    def __init__(self, filtration: Filtration, path: Sequence[LatticeElement], check: bool = True):
        path = list(path)
        if not path:
            raise ValueError("a process needs at least one element")
        for n, x in enumerate(path, start=1):
            if x.space != filtration.space:
                raise SpaceMismatch(f"X_{n} lives on another space")
            x.require_finite(f"X_{n}")
            if check and not filtration.stage(n).is_measurable(x):
                raise NotAdapted(f"X_{n} is not measurable for F_{n}")
        self.filtration = filtration
        self.path = tuple(path)

    @property
    def horizon(self) -> int:
        return len(self.path)

    def __len__(self) -> int:
        return len(self.path)

    def at(self, n: int) -> LatticeElement:
        if not 1 <= n <= len(self.path):
            raise IndexError(f"process index {n} outside 1..{len(self.path)}")
        return self.path[n - 1]

    def is_increasing(self) -> bool:
        return all(a <= b for a, b in zip(self.path, self.path[1:]))

    def __eq__(self, other) -> bool:
        if not isinstance(other, AdaptedProcess):
            return NotImplemented
        return self.filtration == other.filtration and self.path == other.path

    def to_json(self) -> list:
        return [encode_array(x.values) for x in self.path]

    @classmethod
    def from_json(cls, filtration: Filtration, doc: list) -> AdaptedProcess:
        return cls(filtration, [LatticeElement(filtration.space, decode_array(v)) for v in doc])


def doob_martingale(filtration: Filtration, terminal: LatticeElement) -> AdaptedProcess:
    """``X_t = F_t X`` for ``t = 1 .. T``; X is first projected into the range of ``F_T``."""
    last = filtration.stage(filtration.horizon)(terminal)
    return AdaptedProcess(filtration, [filtration.stage(t)(last) for t in range(1, filtration.horizon + 1)])


class ProcessKind(str, Enum):
    MARTINGALE = "martingale"
    SUBMARTINGALE = "submartingale"
    SUPERMARTINGALE = "supermartingale"
    NONE = "none"


def classify_process(p: AdaptedProcess, atol: float = 0.0) -> ProcessKind:
    """Compare ``F_t X_s`` with ``X_t`` for every ``t <= s``.

    Comparisons are exact unless ``atol`` is given.
    """
    path = np.stack([x.values for x in p.path])
    sub = sup = True
    for t in range(1, p.horizon + 1):
        Ft = p.filtration.stage(t)
        d = _block_average(Ft.labels, Ft.weights, path[t - 1:], len(Ft.blocks)) - path[t - 1]
        sub = sub and bool((d >= -atol).all())
        sup = sup and bool((d <= atol).all())
    if sub and sup:
        return ProcessKind.MARTINGALE
    if sub:
        return ProcessKind.SUBMARTINGALE
    if sup:
        return ProcessKind.SUPERMARTINGALE
    return ProcessKind.NONE


# -- Jensen ---------------------------------------------------------------------


@dataclass(frozen=True)
class AffineMap:
    """``L(t) = <slope, t> + intercept``."""

    slope: tuple
    intercept: float

    def __post_init__(self):
        object.__setattr__(self, "slope", tuple(float(a) for a in self.slope))
        object.__setattr__(self, "intercept", float(self.intercept))

    @property
    def arity(self) -> int:
        return len(self.slope)

    def __call__(self, *t) -> float:
        return float(np.dot(self.slope, t)) + self.intercept

    def evaluate_rows(self, pts: np.ndarray) -> np.ndarray:
        return np.asarray(pts, dtype=float) @ np.asarray(self.slope) + self.intercept

    def of_elements(self, xs: Sequence[LatticeElement]) -> LatticeElement:
        if len(xs) != self.arity:
            raise ArityMismatch(f"affine map of arity {self.arity} applied to {len(xs)} elements")
        out = xs[0].space.constant(self.intercept)
        for a, x in zip(self.slope, xs):
            out = out + x.scale(a)
        return out


class ConvexFunction(ContinuousFunction):
    """A convex function that can produce affine minorants touching it at given points."""

    def __init__(self, fn, arity, minorant_rule, name=None, lipschitz=None, vectorized=True):
        super().__init__(fn, arity, lipschitz, name, vectorized)
        self._minorant_rule = minorant_rule

    def minorants(self, points) -> list[AffineMap]:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return self._minorant_rule(pts)


def max_function(n: int) -> ConvexFunction:
    """``max(t_1, ..., t_n)``; its minorants are the coordinate projections."""
    return ConvexFunction(lambda *t: np.maximum.reduce(np.broadcast_arrays(*t)), n,
                          lambda pts: [AffineMap(np.eye(n)[i], 0.0) for i in range(n)], f"max{n}")


def l1_norm(n: int) -> ConvexFunction:
    """``|t_1| + ... + |t_n|``; minorants ``<s, t>`` for the sign patterns s of the points."""

    def rule(pts):
        signs = {tuple(np.where(p >= 0, 1.0, -1.0).tolist()) for p in pts}
        return [AffineMap(s, 0.0) for s in sorted(signs)]

    return ConvexFunction(lambda *t: sum(np.abs(v) for v in t), n, rule, f"l1_{n}")


def quadratic(n: int) -> ConvexFunction:
    """``|t|^2``; minorants are the tangent planes ``2<c, t> - |c|^2`` at the points c."""

    def rule(pts):
        uniq = {tuple(p.tolist()) for p in pts}
        return [AffineMap(2.0 * np.asarray(c), -float(np.dot(c, c))) for c in sorted(uniq)]

    return ConvexFunction(lambda *t: sum(v * v for v in t), n, rule, f"sq{n}")


def affine_function(slope, intercept: float) -> ConvexFunction:
    L = AffineMap(slope, intercept)
    return ConvexFunction(lambda *t: sum(a * v for a, v in zip(L.slope, t)) + L.intercept, L.arity,
                          lambda pts: [L], f"affine{L.slope}")


@dataclass
class JensenRecord:
    lhs: LatticeElement            # F(f(X))
    rhs: LatticeElement            # f(F X)
    slack: LatticeElement          # lhs - rhs
    min_slack: float
    chain_defect: float            # max |F(L_m(X)) - L_m(F X)|
    chain_min_margin: float        # min over m of F(f(X)) - L_m(F X)
    envelope_gap: float            # max |f(F X) - max_m L_m(F X)|
    minorant_count: int
    tolerance: float
    f_of_X_in_lattice: bool = True
    holds: bool = field(init=False)

    def __post_init__(self):
        self.holds = self.min_slack >= -self.tolerance


def jensen(f: ConvexFunction, xs: Sequence[LatticeElement], ce: ConditionalExpectation,
           minorants: Sequence[AffineMap] | None = None, tol: float = 1e-12,
           strict: bool = True) -> JensenRecord:
    """Check ``F(f(X)) >= f(F X)`` through the affine-minorant chain.

    Minorants default to ``f.minorants`` at the needed points, the rows of X
    and of F X.  Raises :class:`MinorantViolation` if a supplied minorant
    exceeds f at one of those points, and :class:`ConsistencyError` (when
    ``strict``) if the inequality fails beyond ``tol``.
    """
    if len(xs) != f.arity:
        raise ArityMismatch(f"{f.name} takes {f.arity} elements, got {len(xs)}")
    Fxs = [ce(x) for x in xs]
    pts = np.concatenate([np.stack([x.values for x in xs], axis=1),
                          np.stack([x.values for x in Fxs], axis=1)])
    if minorants is None:
        minorants = f.minorants(pts)
    minorants = list(minorants)
    if not minorants:
        raise ValueError("need at least one minorant")
    slopes = np.array([L.slope for L in minorants])
    icpt = np.array([L.intercept for L in minorants])[:, None]
    f_pts = f.evaluate_columns(pts.T)
    over = slopes @ pts.T + icpt > f_pts + tol * (1.0 + np.abs(f_pts))
    if over.any():
        m, i = np.unravel_index(np.argmax(over), over.shape)
        raise MinorantViolation(f"{minorants[m]} exceeds {f.name} at {pts[i].tolist()}")

    fX = compose_multivariate(f, xs)
    lhs = ce(fX)
    rhs = compose_multivariate(f, Fxs)
    slack = lhs - rhs
    # every minorant at once: rows of L_m(X), L_m(F X) and F(L_m(X))
    L_X = slopes @ np.stack([x.values for x in xs]) + icpt
    L_FX = slopes @ np.stack([x.values for x in Fxs]) + icpt
    F_L_X = L_X @ ce.matrix().T
    record = JensenRecord(
        lhs=lhs, rhs=rhs, slack=slack,
        min_slack=float(np.min(slack.values)),
        chain_defect=float(np.max(np.abs(F_L_X - L_FX))),
        chain_min_margin=float(np.min(lhs.values[None, :] - L_FX)),
        envelope_gap=float(np.max(np.abs(rhs.values - L_FX.max(axis=0)))),
        minorant_count=len(minorants),
        tolerance=tol,
    )
    if strict and not record.holds:
        raise ConsistencyError(f"Jensen inequality fails: min slack {record.min_slack}")
    return record


class NotMartingale(ConsistencyError):
    pass


@dataclass
class SubmartingaleRecord:
    image: AdaptedProcess
    kind: ProcessKind
    jensen_records: dict
    is_submartingale: bool


def convex_image_submartingale(processes: Sequence[AdaptedProcess], g: ConvexFunction,
                               minorants: Sequence[AffineMap] | None = None,
                               atol: float = 0.0) -> SubmartingaleRecord:
    """Verify that ``g(X_t)`` is a submartingale for a vector of martingales X."""
    if len(processes) != g.arity:
        raise ArityMismatch(f"{g.name} takes {g.arity} processes, got {len(processes)}")
    filt = processes[0].filtration
    T = processes[0].horizon
    for i, p in enumerate(processes):
        if p.filtration != filt or p.horizon != T:
            raise InvalidFiltration("component processes must share filtration and horizon")
        kind = classify_process(p, atol)
        if kind is not ProcessKind.MARTINGALE:
            raise NotMartingale(f"component {i} is a {kind.value}, not a martingale")
    image = AdaptedProcess(filt, [compose_multivariate(g, [p.at(t) for p in processes])
                                  for t in range(1, T + 1)])
    # one-step records suffice: the tower property carries them to all t < s
    records = {}
    for t in range(1, T):
        records[(t, t + 1)] = jensen(g, [p.at(t + 1) for p in processes], filt.stage(t), minorants,
                                     strict=False)
    kind = classify_process(image, atol)
    return SubmartingaleRecord(image, kind, records,
                               kind in (ProcessKind.SUBMARTINGALE, ProcessKind.MARTINGALE))
