"""Spectral systems, the vector measure they induce, and the Daniell functional calculus.

For a finite element X the integral of a step function is computed from its
definition, ``I(f) = sum a_i mu_A(S_i)`` with ``mu_A(a, b] = A_b - A_a`` and
``A_t = E - P_{(X - tE)^+} E``.  For continuous f the calculus is pointwise
composition (:func:`compose_continuous`); :func:`daniell_continuous` rebuilds
the same element the long way, through monotone step approximations of
``f^+`` and ``f^-``, and serves as an independent check.
"""

from __future__ import annotations

import math
import warnings
from typing import Callable, Sequence

import numpy as np

from ..errors import (
    ArityMismatch,
    CallbackFailure,
    InvalidSupport,
    NotMonotone,
    SpaceMismatch,
)
from ..lattice import LatticeElement, band_projection_of
from .intervals import INF, IntervalSet
from .steps import DyadicGridStep, MonotoneStepSequence, StepFunction


class SpectralSystem:
    """The right-continuous spectral system ``t -> A_t`` of a finite element."""

    def __init__(self, x: LatticeElement):
        self.source = x.require_finite("spectral system source")
        self.breakpoints = np.unique(x.values)
        self.breakpoints.setflags(write=False)

    def _at(self, t) -> np.ndarray:
        """Raw values of ``A_t``; an array of levels gives one row per level."""
        t = np.asarray(t, dtype=float)
        # E - P_{(X - tE)^+} E, with P_Y E the indicator of {Y != 0}
        shifted = np.maximum(self.source.values - t[..., None], 0.0)
        return 1.0 - (shifted != 0.0)

    def at(self, t: float) -> LatticeElement:
        return LatticeElement(self.source.space, self._at(float(t)))

    __call__ = at

    def clopen_at(self, t: float):
        return self.source.space.clopen_from_mask(self._at(float(t)) == 1.0)

    def __repr__(self):
        return f"SpectralSystem(breakpoints={self.breakpoints.tolist()})"


def spectral_system(x: LatticeElement) -> SpectralSystem:
    return SpectralSystem(x)


def _system(a) -> SpectralSystem:
    return a if isinstance(a, SpectralSystem) else SpectralSystem(a)


def _piece_measure(a: SpectralSystem, lo, hi) -> np.ndarray:
    """``mu_A(lo, hi] = A_hi - A_lo``, one row per piece.

    ``A_inf = E`` and ``A_-inf = 0`` come out of the formula for ``A_t``.
    """
    return a._at(hi) - a._at(lo)


def mu_A(a: SpectralSystem | LatticeElement, s: IntervalSet) -> LatticeElement:
    """The E-valued measure of a set in F(R), additive over its pieces."""
    a = _system(a)
    total = np.zeros(a.source.space.atom_count)
    for lo, hi in s.pieces:
        total = total + _piece_measure(a, lo, hi)
    return LatticeElement(a.source.space, total)


def daniell_step(f, x: SpectralSystem | LatticeElement) -> LatticeElement:
    """``I(f) = sum_i a_i mu_A(S_i)`` for a step function f."""
    a = _system(x)
    pieces = [p for p in f.integration_pieces(a.breakpoints) if p[2] != 0.0]
    total = np.zeros(a.source.space.atom_count)
    if pieces:
        lo, hi, value = (np.array(col, dtype=float) for col in zip(*pieces))
        total = value @ _piece_measure(a, lo, hi)
    return LatticeElement(a.source.space, total)


def daniell_step_closed_form(f: StepFunction, x: LatticeElement) -> LatticeElement:
    """The band expression for ``I(f)`` written with band projections only.

    ``I(f) = a_inf 1_{X > g_n} + sum_i a_i (1_{X > g_(i-1)} - 1_{X > g_i})``
    with ``g_0 = -inf``, where ``1_{X > g} = P_{(X - gE)^+} E``.
    """
    x.require_finite("integrand argument")
    E = x.space.unit

    def above(gamma: float) -> LatticeElement:
        if gamma == -INF:
            return E
        return band_projection_of((x - E.scale(gamma)).positive_part)(E)

    gammas = [-INF] + f.breakpoints.tolist()
    result = above(gammas[-1]).scale(f.value_at_infinity)
    for i, a_i in enumerate(f.values.tolist(), start=1):
        result = result + (above(gammas[i - 1]) - above(gammas[i])).scale(a_i)
    return result


def daniell_monotone(seq: MonotoneStepSequence, x: LatticeElement, horizon: int | None = None) -> LatticeElement:
    """``sup_k I(f_k)`` over the first ``horizon`` terms of an increasing step sequence."""
    a = _system(x)
    n = len(seq) if horizon is None else min(int(horizon), len(seq))
    if n < 1:
        raise ValueError("horizon must be at least 1")
    seq.validate(points=a.breakpoints, upto=n)
    out = daniell_step(seq[0], a)
    for k in range(1, n):
        nxt = daniell_step(seq[k], a)
        if not out <= nxt:
            raise NotMonotone(f"I(f_{k}) is not above I(f_{k - 1})")
        out = nxt
    return out


# -- continuous functions -----------------------------------------------------


class ContinuousFunction:
    """A deterministic real function of ``arity`` real arguments.

    ``lipschitz(lo, hi)`` optionally returns a Lipschitz constant valid on the
    box ``[lo, hi]**arity`` (sup-norm); it is the uniform-continuity data used
    to size approximation grids.  Callbacks must be side-effect free.
    """

    def __init__(self, fn: Callable, arity: int = 1, lipschitz: Callable | None = None,
                 name: str | None = None, vectorized: bool = False):
        if arity < 1:
            raise ValueError("arity must be at least 1")
        self.fn = fn
        self.arity = int(arity)
        self.lipschitz = lipschitz
        self.name = name or getattr(fn, "__name__", "f")
        self.vectorized = vectorized

    def __call__(self, *t) -> float:
        if len(t) != self.arity:
            raise ArityMismatch(f"{self.name} takes {self.arity} arguments, got {len(t)}")
        try:
            v = float(self.fn(*t))
        except Exception as exc:  # noqa: BLE001 - any callback failure is surfaced
            raise CallbackFailure(f"{self.name}{t} raised {exc!r}") from exc
        if not math.isfinite(v):
            raise CallbackFailure(f"{self.name}{t} returned {v}")
        return v

    def evaluate_many(self, ts) -> np.ndarray:
        """Evaluate a univariate function on an array of reals."""
        ts = np.asarray(ts, dtype=float).reshape(-1)
        if not self.vectorized:
            return np.array([self(t) for t in ts.tolist()])
        try:
            v = np.asarray(self.fn(ts), dtype=float)
            if v.shape != ts.shape:
                v = np.broadcast_to(v, ts.shape)
        except Exception as exc:  # noqa: BLE001
            raise CallbackFailure(f"{self.name} raised {exc!r}") from exc
        if not np.isfinite(v).all():
            raise CallbackFailure(f"{self.name} returned non-finite values")
        return v

    def evaluate_columns(self, cols) -> np.ndarray:
        """Evaluate at the points whose coordinates are the given equal-length columns."""
        cols = [np.asarray(c, dtype=float).reshape(-1) for c in cols]
        if len(cols) != self.arity:
            raise ArityMismatch(f"{self.name} takes {self.arity} arguments, got {len(cols)}")
        if not self.vectorized:
            return np.array([self(*row) for row in zip(*(c.tolist() for c in cols))])
        try:
            v = np.asarray(self.fn(*cols), dtype=float)
            if v.shape != cols[0].shape:
                v = np.broadcast_to(v, cols[0].shape)
        except Exception as exc:  # noqa: BLE001
            raise CallbackFailure(f"{self.name} raised {exc!r}") from exc
        if not np.isfinite(v).all():
            raise CallbackFailure(f"{self.name} returned non-finite values")
        return v

    def lipschitz_on(self, lo: float, hi: float) -> float | None:
        return None if self.lipschitz is None else float(self.lipschitz(lo, hi))

    def modulus(self, lo: float, hi: float, eps: float) -> float | None:
        """A spacing ``delta`` so that points ``delta`` apart in the box differ by at most ``eps``."""
        L = self.lipschitz_on(lo, hi)
        if L is None:
            return None
        return math.inf if L == 0 else eps / L

    def __repr__(self):
        return f"ContinuousFunction({self.name}, arity={self.arity})"

    # -- pointwise combinations ------------------------------------------------

    def _binary(self, other, op, lip, label) -> ContinuousFunction:
        if not isinstance(other, ContinuousFunction):
            other = constant(other, self.arity)
        if other.arity != self.arity:
            raise ArityMismatch("cannot combine functions of different arity")
        f, g = self, other
        lipschitz = None
        if f.lipschitz is not None and g.lipschitz is not None:
            def lipschitz(lo, hi):
                return lip(f.lipschitz(lo, hi), g.lipschitz(lo, hi))
        return ContinuousFunction(lambda *t: op(f.fn(*t), g.fn(*t)), self.arity, lipschitz,
                                  f"({f.name} {label} {g.name})", f.vectorized and g.vectorized)

    def _unary(self, op, factor, label) -> ContinuousFunction:
        f = self
        lipschitz = None
        if f.lipschitz is not None:
            def lipschitz(lo, hi):
                return factor * f.lipschitz(lo, hi)
        return ContinuousFunction(lambda *t: op(f.fn(*t)), self.arity, lipschitz, f"{label}({f.name})",
                                  f.vectorized)

    def sup(self, other) -> ContinuousFunction:
        return self._binary(other, np.maximum, max, "v")

    def inf(self, other) -> ContinuousFunction:
        return self._binary(other, np.minimum, max, "^")

    __or__ = sup
    __and__ = inf

    def __add__(self, other) -> ContinuousFunction:
        return self._binary(other, lambda a, b: a + b, lambda a, b: a + b, "+")

    def __sub__(self, other) -> ContinuousFunction:
        return self._binary(other, lambda a, b: a - b, lambda a, b: a + b, "-")

    def __neg__(self) -> ContinuousFunction:
        return self._unary(lambda v: -v, 1.0, "-")

    def scale(self, c: float) -> ContinuousFunction:
        c = float(c)
        return self._unary(lambda v: c * v, abs(c), f"{c}*")

    def __abs__(self) -> ContinuousFunction:
        return self._unary(np.abs, 1.0, "abs")

    @property
    def positive_part(self) -> ContinuousFunction:
        return self._unary(lambda v: np.maximum(v, 0.0), 1.0, "pos")

    @property
    def negative_part(self) -> ContinuousFunction:
        return self._unary(lambda v: np.maximum(-v, 0.0), 1.0, "neg")


def constant(c: float, arity: int = 1) -> ContinuousFunction:
    c = float(c)
    return ContinuousFunction(lambda *t: c + 0.0 * t[0], arity, lambda lo, hi: 0.0, f"{c}", vectorized=True)


def identity() -> ContinuousFunction:
    return ContinuousFunction(lambda t: t, 1, lambda lo, hi: 1.0, "id", vectorized=True)


def polynomial(coeffs: Sequence[float]) -> ContinuousFunction:
    """``t -> sum_k coeffs[k] t**k``."""
    cs = [float(c) for c in coeffs]

    def fn(t):
        acc = 0.0
        for c in reversed(cs):
            acc = acc * t + c
        return acc

    def lipschitz(lo, hi):
        r = max(abs(lo), abs(hi))
        return sum(k * abs(c) * r ** (k - 1) for k, c in enumerate(cs) if k > 0)

    return ContinuousFunction(fn, 1, lipschitz, f"poly{cs}", vectorized=True)


def piecewise_linear(knots: Sequence[float], values: Sequence[float]) -> ContinuousFunction:
    """Linear interpolation through ``(knots[i], values[i])``, constant outside the knots."""
    ks = np.asarray(knots, dtype=float)
    vs = np.asarray(values, dtype=float)
    if len(ks) != len(vs) or len(ks) < 1:
        raise ValueError("need matching, non-empty knots and values")
    if len(ks) > 1 and not (np.diff(ks) > 0).all():
        raise ValueError("knots must be strictly increasing")
    slope = float(np.max(np.abs(np.diff(vs) / np.diff(ks)))) if len(ks) > 1 else 0.0

    return ContinuousFunction(lambda t: np.interp(t, ks, vs), 1, lambda lo, hi: slope,
                              f"pwl{ks.tolist()}", vectorized=True)


def bump(center: float, radius: float, height: float = 1.0) -> ContinuousFunction:
    """Tent of the given height supported on ``[center - radius, center + radius]``."""
    return piecewise_linear([center - radius, center, center + radius], [0.0, height, 0.0])


def cutoff(f: ContinuousFunction, n: float) -> ContinuousFunction:
    """f on ``[-n, n]``, zero off ``[-n-1, n+1]``, linearly damped in between."""
    n = float(n)

    def fn(t):
        return f.fn(t) * np.clip(n + 1.0 - np.abs(t), 0.0, 1.0)

    L = _lipschitz_or_estimate(f, -n - 1.0, n + 1.0)
    bound = abs(f(0.0)) + L * (n + 1.0)

    def lipschitz(lo, hi):
        return L + bound

    return ContinuousFunction(fn, 1, lipschitz, f"cutoff_{n:g}({f.name})", f.vectorized)


def _lipschitz_or_estimate(f: ContinuousFunction, a: float, b: float) -> float:
    L = f.lipschitz_on(a, b)
    if L is not None:
        return L
    warnings.warn(f"no uniform-continuity data for {f.name}; estimating a Lipschitz constant by sampling",
                  stacklevel=3)
    ts = np.linspace(a, b, 4097)
    vs = f.evaluate_many(ts)
    return 2.0 * float(np.max(np.abs(np.diff(vs)) / np.diff(ts)))


def step_approximation(f: ContinuousFunction, support: tuple[float, float], eps: float) -> MonotoneStepSequence:
    """Increasing step functions below f on ``(a, b]`` converging uniformly to it there.

    Term k (k = 1, 2, ...) lives on a dyadic grid whose spacing keeps the
    oscillation of f per cell under ``4**-k / 5``; each cell takes the smaller
    endpoint value of f minus ``0.8 * 4**-k``.  Term k then lies between
    ``f - 4**-k`` and ``f - 0.6 * 4**-k``, so the terms increase exactly, stay
    below f, and close the gap by a factor 4 per term.  The sequence stops at
    the first k with ``4**-k <= eps``.  Terms vanish off ``(a, b]``.  A
    function with Lipschitz constant 0 is constant there and is reproduced
    exactly.
    """
    a, b = float(support[0]), float(support[1])
    if not (math.isfinite(a) and math.isfinite(b)) or a >= b:
        raise InvalidSupport(f"support [{a}, {b}] must be a non-degenerate bounded interval")
    if not eps > 0:
        raise ValueError("eps must be positive")
    width = b - a
    L = _lipschitz_or_estimate(f, a, b)
    n_terms = max(1, math.ceil(-math.log2(eps) / 2))

    def level_for(tol: float) -> int:
        if L == 0:
            return 0
        m = max(0, math.ceil(math.log2(width * L / tol)))
        while width * L * 2.0 ** -m > tol:
            m += 1
        if m > 50:
            raise InvalidSupport("approximation grid would exceed float resolution")
        return m

    def term(k0: int) -> DyadicGridStep:
        tau = 4.0 ** -(k0 + 1)
        level = level_for(tau / 5)
        drop = 0.0 if L == 0 else 0.8 * tau  # a constant needs no slack
        grid = DyadicGridStep(a, width, level, rule=None)

        def rule(j):
            v = f.evaluate_many(grid.breakpoint(np.concatenate((j - 1, j))))
            return np.minimum(v[:len(j)], v[len(j):]) - drop

        grid.rule = rule
        return grid

    return MonotoneStepSequence(term, length=n_terms)


def compose_continuous(f: ContinuousFunction | Callable, x: LatticeElement) -> LatticeElement:
    """``I(f) = f o X``: apply f at every atom."""
    x.require_finite("functional calculus argument")
    f = f if isinstance(f, ContinuousFunction) else ContinuousFunction(f)
    if f.arity != 1:
        raise ArityMismatch(f"{f.name} has arity {f.arity}; use compose_multivariate")
    return LatticeElement(x.space, f.evaluate_many(x.values))


def compose_multivariate(f: ContinuousFunction | Callable, xs: Sequence[LatticeElement]) -> LatticeElement:
    """``f(X_1, ..., X_n)`` evaluated atom by atom."""
    if not isinstance(f, ContinuousFunction):
        f = ContinuousFunction(f, arity=len(xs))
    if len(xs) != f.arity:
        raise ArityMismatch(f"{f.name} takes {f.arity} elements, got {len(xs)}")
    space = xs[0].space
    for x in xs:
        if x.space != space:
            raise SpaceMismatch(f"{space} vs {x.space}")
        x.require_finite("functional calculus argument")
    return LatticeElement(space, f.evaluate_columns([x.values for x in xs]))


def daniell_continuous(f: ContinuousFunction, x: LatticeElement, eps: float = 2.0 ** -20) -> LatticeElement:
    """``I(f)`` built from step functions only: ``I(f^+) - I(f^-)``.

    Each part is cut off to bounded support around the range of X, approximated
    from below by :func:`step_approximation`, and integrated with
    :func:`daniell_monotone`.  Agrees with :func:`compose_continuous` to
    within ``2 * eps``.
    """
    x.require_finite("functional calculus argument")
    n = max(1.0, math.ceil(float(np.max(np.abs(x.values)))))
    box = (-n - 1.0, n + 1.0)
    a = SpectralSystem(x)
    parts = []
    for part in (f.positive_part, f.negative_part):
        seq = step_approximation(cutoff(part, n), box, eps)
        parts.append(daniell_monotone(seq, a))
    return parts[0] - parts[1]
