"""The algebra of finite unions of left-open, right-closed intervals of the real line."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .._json import decode_scalar, encode_scalar
from ..errors import InvalidInterval

INF = math.inf


def _check_piece(lo: float, hi: float) -> tuple[float, float]:
    lo, hi = float(lo), float(hi)
    if math.isnan(lo) or math.isnan(hi):
        raise InvalidInterval("NaN endpoint")
    if lo == INF or hi == -INF:
        raise InvalidInterval(f"({lo}, {hi}] is not an interval of the algebra")
    if not lo < hi:
        raise InvalidInterval(f"degenerate interval ({lo}, {hi}]")
    return lo, hi


def _canonical(pieces) -> tuple[tuple[float, float], ...]:
    out: list[list[float]] = []
    for lo, hi in sorted(pieces):
        if out and lo <= out[-1][1]:
            out[-1][1] = max(out[-1][1], hi)
        else:
            out.append([lo, hi])
    return tuple((lo, hi) for lo, hi in out)


@dataclass(frozen=True)
class IntervalSet:
    """A member of F(R), stored as sorted maximal pieces ``(lo, hi]``.

    ``hi == inf`` encodes the ray ``(lo, inf)`` and ``lo == -inf`` the ray
    ``(-inf, hi]``.  Adjacent pieces are merged, so equal sets compare equal.
    """

    pieces: tuple = ()

    def __post_init__(self):
        checked = [_check_piece(lo, hi) for lo, hi in self.pieces]
        object.__setattr__(self, "pieces", _canonical(checked))

    @classmethod
    def interval(cls, a: float, b: float) -> IntervalSet:
        if not (math.isfinite(a) and math.isfinite(b)):
            raise InvalidInterval("(a, b] needs finite endpoints")
        return cls(((a, b),))

    @classmethod
    def ray_up(cls, a: float) -> IntervalSet:
        return cls(((a, INF),))

    @classmethod
    def ray_down(cls, b: float) -> IntervalSet:
        return cls(((-INF, b),))

    @classmethod
    def real_line(cls) -> IntervalSet:
        return cls(((-INF, INF),))

    @classmethod
    def empty(cls) -> IntervalSet:
        return cls(())

    def __bool__(self) -> bool:
        return bool(self.pieces)

    def __or__(self, other: IntervalSet) -> IntervalSet:
        return IntervalSet(self.pieces + other.pieces)

    def __and__(self, other: IntervalSet) -> IntervalSet:
        out = []
        for a_lo, a_hi in self.pieces:
            for b_lo, b_hi in other.pieces:
                lo, hi = max(a_lo, b_lo), min(a_hi, b_hi)
                if lo < hi:
                    out.append((lo, hi))
        return IntervalSet(tuple(out))

    def __invert__(self) -> IntervalSet:
        out = []
        cur = -INF
        for lo, hi in self.pieces:
            if cur < lo:
                out.append((cur, lo))
            cur = hi
        if cur < INF:
            out.append((cur, INF))
        return IntervalSet(tuple(out))

    def __sub__(self, other: IntervalSet) -> IntervalSet:
        return self & ~other

    def isdisjoint(self, other: IntervalSet) -> bool:
        return not (self & other)

    def contains(self, t):
        """Membership of a scalar or array of reals."""
        t = np.asarray(t, dtype=float)
        hit = np.zeros(t.shape, dtype=bool)
        for lo, hi in self.pieces:
            hit |= (t > lo) & (t <= hi)
        return hit if hit.ndim else bool(hit)

    def __contains__(self, t: float) -> bool:
        return bool(self.contains(t))

    def to_json(self) -> list[dict]:
        doc = []
        for lo, hi in self.pieces:
            if lo == -INF and hi == INF:
                # the whole line has no single-piece form in the schema
                doc.append({"kind": "ray_down", "b": 0.0})
                doc.append({"kind": "ray_up", "a": 0.0})
            elif lo == -INF:
                doc.append({"kind": "ray_down", "b": encode_scalar(hi)})
            elif hi == INF:
                doc.append({"kind": "ray_up", "a": encode_scalar(lo)})
            else:
                doc.append({"kind": "left_open_right_closed", "a": lo, "b": hi})
        return doc

    @classmethod
    def from_json(cls, doc: list[dict]) -> IntervalSet:
        pieces = []
        for item in doc:
            kind = item["kind"]
            if kind == "left_open_right_closed":
                a, b = decode_scalar(item["a"]), decode_scalar(item["b"])
                if not (math.isfinite(a) and math.isfinite(b)):
                    raise InvalidInterval("(a, b] needs finite endpoints")
                pieces.append((a, b))
            elif kind == "ray_up":
                pieces.append((decode_scalar(item["a"]), INF))
            elif kind == "ray_down":
                pieces.append((-INF, decode_scalar(item["b"])))
            else:
                raise InvalidInterval(f"unknown interval kind {kind!r}")
        return cls(tuple(pieces))

    def __repr__(self):
        parts = []
        for lo, hi in self.pieces:
            parts.append(f"({lo}, {hi})" if hi == INF else f"({lo}, {hi}]")
        return "IntervalSet(" + " u ".join(parts) + ")" if parts else "IntervalSet(empty)"
