"""Step functions: the lattice of simple functions over F(R), and monotone sequences of them."""

from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np

from .._json import decode_array, decode_scalar, encode_array, encode_scalar
from ..errors import InvalidInterval, NotMonotone
from .intervals import INF, IntervalSet


class StepFunction:
    """``a_1 on (-inf, g_1], a_i on (g_{i-1}, g_i], a_inf on (g_n, inf)``.

    Stored canonically: neighbouring pieces with equal values are merged, so
    two step functions are equal exactly when they agree everywhere.
    """

    __slots__ = ("_bp", "_vals")

    def __init__(self, breakpoints, values, value_at_infinity: float):
        bp = np.array(breakpoints, dtype=float).reshape(-1)
        vals = np.append(np.array(values, dtype=float).reshape(-1), float(value_at_infinity))
        if len(vals) != len(bp) + 1:
            raise ValueError("need exactly one value per breakpoint plus the value at infinity")
        if not np.isfinite(bp).all() or not np.isfinite(vals).all():
            raise ValueError("breakpoints and values must be finite reals")
        if len(bp) > 1 and not (np.diff(bp) > 0).all():
            raise InvalidInterval("breakpoints must be strictly increasing")
        keep = vals[:-1] != vals[1:]
        bp, vals = bp[keep], np.append(vals[:-1][keep], vals[-1])
        bp.setflags(write=False)
        vals.setflags(write=False)
        self._bp = bp
        self._vals = vals

    # -- constructors ------------------------------------------------------

    @classmethod
    def constant(cls, c: float) -> StepFunction:
        return cls([], [], c)

    @classmethod
    def indicator(cls, s: IntervalSet, height: float = 1.0) -> StepFunction:
        return cls.from_pieces([(s, height)])

    @classmethod
    def from_pieces(cls, pieces: Sequence[tuple[IntervalSet, float]]) -> StepFunction:
        """Build ``sum a_i 1_{S_i}`` from disjoint sets; uncovered reals get the value 0."""
        covered = IntervalSet.empty()
        for s, _ in pieces:
            if not covered.isdisjoint(s):
                raise InvalidInterval("pieces must be pairwise disjoint")
            covered = covered | s
        cuts = sorted({e for s, _ in pieces for piece in s.pieces for e in piece if math.isfinite(e)})
        probes = np.append(np.asarray(cuts, dtype=float), cuts[-1] + 1.0 if cuts else 0.0)
        vals = np.zeros(len(probes))
        for s, a in pieces:
            vals[s.contains(probes)] = a
        return cls(cuts, vals[:-1], vals[-1])

    # -- accessors ---------------------------------------------------------

    @property
    def breakpoints(self) -> np.ndarray:
        return self._bp

    @property
    def values(self) -> np.ndarray:
        return self._vals[:-1]

    @property
    def value_at_infinity(self) -> float:
        return float(self._vals[-1])

    def piece_index(self, t):
        return np.searchsorted(self._bp, t, side="left")

    def __call__(self, t):
        out = self._vals[self.piece_index(t)]
        return float(out) if np.ndim(out) == 0 else out

    def pieces(self) -> list[tuple[float, float, float]]:
        """All pieces as ``(lo, hi, value)`` with the interval ``(lo, hi]``."""
        edges = np.concatenate(([-INF], self._bp, [INF]))
        return [(float(edges[i]), float(edges[i + 1]), float(self._vals[i])) for i in range(len(self._vals))]

    def integration_pieces(self, points) -> list[tuple[float, float, float]]:
        # explicit functions are integrated over every piece
        return self.pieces()

    def as_pieces(self) -> list[tuple[IntervalSet, float]]:
        return [(IntervalSet(((lo, hi),)), a) for lo, hi, a in self.pieces()]

    def witness_points(self) -> np.ndarray:
        """Finitely many reals on which the function's values determine it."""
        bp = self._bp
        if len(bp) == 0:
            return np.array([0.0])
        mids = (bp[:-1] + bp[1:]) / 2
        return np.concatenate(([bp[0] - 1.0], bp, mids, [bp[-1] + 1.0]))

    # -- lattice and vector operations ---------------------------------------

    def _combine(self, other: StepFunction, op) -> StepFunction:
        bp = np.union1d(self._bp, other._bp)
        probe = np.append(bp, bp[-1] + 1.0 if len(bp) else 0.0)
        vals = op(np.asarray(self(probe), dtype=float), np.asarray(other(probe), dtype=float))
        return StepFunction(bp, vals[:-1], vals[-1])

    def _lift(self, other) -> StepFunction:
        return other if isinstance(other, StepFunction) else StepFunction.constant(other)

    def __add__(self, other) -> StepFunction:
        return self._combine(self._lift(other), np.add)

    __radd__ = __add__

    def __sub__(self, other) -> StepFunction:
        return self._combine(self._lift(other), np.subtract)

    def __neg__(self) -> StepFunction:
        return StepFunction(self._bp, -self._vals[:-1], -self._vals[-1])

    def __mul__(self, c: float) -> StepFunction:
        c = float(c)
        return StepFunction(self._bp, c * self._vals[:-1], c * self._vals[-1])

    __rmul__ = __mul__

    def sup(self, other) -> StepFunction:
        return self._combine(self._lift(other), np.maximum)

    def inf(self, other) -> StepFunction:
        return self._combine(self._lift(other), np.minimum)

    __or__ = sup
    __and__ = inf

    def __abs__(self) -> StepFunction:
        return StepFunction(self._bp, np.abs(self._vals[:-1]), abs(self._vals[-1]))

    @property
    def positive_part(self) -> StepFunction:
        return self.sup(0.0)

    @property
    def negative_part(self) -> StepFunction:
        return (-self).sup(0.0)

    def __le__(self, other) -> bool:
        d = self._lift(other) - self
        return bool((d._vals >= 0).all())

    def __ge__(self, other) -> bool:
        return self._lift(other) <= self

    def __eq__(self, other) -> bool:
        if not isinstance(other, StepFunction):
            return NotImplemented
        return np.array_equal(self._bp, other._bp) and np.array_equal(self._vals, other._vals)

    def __hash__(self):
        return hash((self._bp.tobytes(), self._vals.tobytes()))

    def __repr__(self):
        return (f"StepFunction(breakpoints={self._bp.tolist()}, values={self.values.tolist()}, "
                f"value_at_infinity={self.value_at_infinity})")

    # -- serialisation ---------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "breakpoints": self._bp.tolist(),
            "values": self.values.tolist(),
            "value_at_infinity": encode_scalar(self.value_at_infinity),
        }

    @classmethod
    def from_json(cls, doc: dict) -> StepFunction:
        return cls(decode_array(doc["breakpoints"]), decode_array(doc["values"]),
                   decode_scalar(doc["value_at_infinity"]))


class DyadicGridStep:
    """A step function on a uniform dyadic grid, with values produced on demand.

    The cells are ``(lo + (j-1)h, lo + jh]`` for ``j = 1 .. 2**level`` with
    ``h = width / 2**level``; the function is 0 off ``(lo, lo + width]``.
    ``rule`` maps an integer array of cell indices to the cell values.  Grids
    at deeper levels contain the breakpoints of shallower ones exactly, because
    breakpoint ``j`` is computed as ``lo + ldexp(j * width, -level)``.
    """

    def __init__(self, lo: float, width: float, level: int, rule: Callable[[np.ndarray], np.ndarray]):
        if not (math.isfinite(lo) and math.isfinite(width) and width > 0):
            raise InvalidInterval("grid needs a finite left end and positive width")
        self.lo = float(lo)
        self.width = float(width)
        self.level = int(level)
        self.cells = 1 << self.level
        self.rule = rule

    def cell_values(self, j: np.ndarray) -> np.ndarray:
        """Rule values for in-grid cell indices; each distinct cell is evaluated once per call."""
        j = np.asarray(j, dtype=np.int64)
        if not len(j):
            return np.zeros(0)
        uniq, inverse = np.unique(j, return_inverse=True)
        return np.asarray(self.rule(uniq), dtype=float)[inverse]

    def breakpoint(self, j):
        j = np.asarray(j, dtype=float)
        return self.lo + np.ldexp(j * self.width, -self.level)

    def cell_index(self, t) -> np.ndarray:
        """Index of the cell containing ``t``: 0 below the grid, ``cells + 1`` above it."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        j = np.minimum(np.maximum(np.ceil(np.ldexp(t - self.lo, self.level) / self.width), 0), self.cells + 1)
        # float division can land one cell off; settle against the stored breakpoints
        for _ in range(3):
            lo, hi = self.breakpoint(np.stack((j - 1, j)))
            up = (t > hi) & (j <= self.cells)
            down = (t <= lo) & (j >= 1)
            if not (up.any() or down.any()):
                break
            j = j + up - down
        return j.astype(np.int64)

    def __call__(self, t):
        scalar = np.ndim(t) == 0
        j = self.cell_index(t)
        out = np.zeros(j.shape)
        inner = (j >= 1) & (j <= self.cells)
        if inner.any():
            out[inner] = self.cell_values(j[inner])
        return float(out[0]) if scalar else out

    def integration_pieces(self, points) -> list[tuple[float, float, float]]:
        """Pieces containing at least one of ``points``.

        A piece holding none of the jump points of a spectral system has
        measure zero, so these are the only pieces a Daniell sum needs.
        """
        js = np.unique(self.cell_index(points))
        inner = (js >= 1) & (js <= self.cells)
        lo = self.breakpoint(js - 1)
        hi = self.breakpoint(js)
        vals = np.zeros(len(js))
        vals[inner] = self.cell_values(js[inner])
        lo[js == 0] = -INF
        hi[js == 0] = self.lo
        lo[js == self.cells + 1] = self.breakpoint(self.cells)
        hi[js == self.cells + 1] = INF
        return list(zip(lo.tolist(), hi.tolist(), vals.tolist()))

    def witness_points(self, near=None) -> np.ndarray:
        """Breakpoints and midpoints of the cells around ``near`` (the whole grid if small)."""
        if near is None:
            if self.cells > 1 << 14:
                raise ValueError("grid too fine to enumerate; pass points to look near")
            js = np.arange(0, self.cells + 1)
        else:
            c = self.cell_index(near)
            js = np.unique(np.minimum(c, self.cells))
        bps = self.breakpoint(js)
        mids = self.breakpoint(js[js >= 1] - 0.5)
        return np.concatenate((bps, mids, [self.lo - 1.0, self.lo + self.width + 1.0]))

    def materialize(self) -> StepFunction:
        if self.cells > 1 << 16:
            raise ValueError("grid too fine to materialise")
        j = np.arange(1, self.cells + 1)
        bp = np.concatenate(([self.lo], self.breakpoint(j)))
        return StepFunction(bp, np.concatenate(([0.0], self.cell_values(j))), 0.0)


class MonotoneStepSequence:
    """An increasing sequence of step functions, given as a list or generated lazily.

    Indexing is zero-based: ``seq[0]`` is the first approximant.
    """

    def __init__(self, terms, length: int | None = None):
        if callable(terms):
            if length is None:
                raise ValueError("a lazily generated sequence needs a length")
            self._gen = terms
            self._cache: dict[int, object] = {}
            self._len = int(length)
        else:
            terms = list(terms)
            self._gen = terms.__getitem__
            self._cache = dict(enumerate(terms))
            self._len = len(terms)

    def __len__(self) -> int:
        return self._len

    def __getitem__(self, k: int):
        if not 0 <= k < self._len:
            raise IndexError(k)
        if k not in self._cache:
            self._cache[k] = self._gen(k)
        return self._cache[k]

    def __iter__(self):
        return (self[k] for k in range(self._len))

    def validate(self, points=None, upto: int | None = None) -> None:
        """Check ``seq[k] <= seq[k+1]`` on a witness set; raise :class:`NotMonotone` otherwise.

        For explicit step functions the witness set (all breakpoints, the
        midpoints between them and one point beyond each end) is exhaustive.
        Lazy grids are checked around ``points``.
        """
        n = self._len if upto is None else min(upto, self._len)
        if n < 2:
            return
        extra = [] if points is None else [np.asarray(points, dtype=float).reshape(-1)]
        own = [_witnesses(self[k], points) for k in range(n)]
        pair = [np.concatenate([own[k], own[k + 1]] + extra) for k in range(n - 1)]
        # evaluate each term once on the witness sets of both pairs it belongs to
        vals = []
        for k in range(n):
            left = pair[k - 1] if k > 0 else np.empty(0)
            right = pair[k] if k < n - 1 else np.empty(0)
            v = np.asarray(self[k](np.concatenate([left, right])), dtype=float)
            vals.append((v[:len(left)], v[len(left):]))
        for k in range(n - 1):
            bad = vals[k][1] > vals[k + 1][0]
            if bad.any():
                t = float(pair[k][np.argmax(bad)])
                raise NotMonotone(f"term {k} exceeds term {k + 1} at t={t}")


def _witnesses(f, points) -> np.ndarray:
    if isinstance(f, StepFunction):
        return f.witness_points()
    return f.witness_points(near=points)
