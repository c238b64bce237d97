"""Discrete stopping times, stopped elements and the hitting-time construction.

A stopping time is stored as its values on the atoms, entries in
``{1, 2, ...} ∪ {inf}``.  Equivalently it is the increasing sequence of band
projections ``P_n`` onto ``{tau <= n}`` commuting with the filtration; both
views are provided and converted exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._json import decode_array, encode_array
from .errors import (
    CommutationFailure,
    ConsistencyError,
    DomainViolation,
    EmptyFamily,
    FiltrationMismatch,
    InvalidStoppingTime,
    NotIncreasing,
    NotIndicatorProcess,
    SpaceMismatch,
    Unbounded,
)
from .lattice import BandProjection, ClopenSet, LatticeElement
from .probability import AdaptedProcess, Filtration

INF = math.inf


def _block_constant(labels: np.ndarray, mask: np.ndarray) -> bool:
    """Whether ``mask`` is a union of the blocks given by ``labels``."""
    nb = int(labels.max()) + 1
    hits = np.bincount(labels, weights=mask.astype(float), minlength=nb)
    sizes = np.bincount(labels, minlength=nb)
    return bool(np.all((hits == 0) | (hits == sizes)))


class StoppingTime:
    """A measurable map from the atoms to ``{1, 2, ...} ∪ {inf}``."""

    __slots__ = ("filtration", "_values")

    def __init__(self, filtration: Filtration, values, check: bool = True):
        v = np.array(values, dtype=float)
        if v.shape != (filtration.space.atom_count,):
            raise InvalidStoppingTime(f"expected {filtration.space.atom_count} values, got shape {v.shape}")
        finite = np.isfinite(v)
        if np.isnan(v).any() or (v == -INF).any():
            raise InvalidStoppingTime("values must be naturals or +inf")
        if not (np.all(v[finite] >= 1) and np.all(v[finite] == np.floor(v[finite]))):
            raise InvalidStoppingTime(f"finite values must be integers >= 1, got {v.tolist()}")
        v.setflags(write=False)
        self.filtration = filtration
        self._values = v
        if check:
            bad = self.unmeasurable_level()
            if bad is not None:
                raise InvalidStoppingTime(f"{{tau = {bad}}} is not measurable for F_{bad}")

    @classmethod
    def constant(cls, filtration: Filtration, n: float) -> StoppingTime:
        return cls(filtration, np.full(filtration.space.atom_count, float(n)))

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def space(self):
        return self.filtration.space

    def finite_levels(self) -> list[int]:
        v = self._values
        return sorted({int(a) for a in v[np.isfinite(v)]})

    def max_finite(self) -> int | None:
        levels = self.finite_levels()
        return levels[-1] if levels else None

    def unmeasurable_level(self) -> int | None:
        """The first n with ``{tau = n}`` not a union of ``F_n`` blocks, or None."""
        for n in self.finite_levels():
            if not _block_constant(self.filtration.stage(n).labels, self._values == n):
                return n
        return None

    def is_bounded(self, horizon: int | None = None) -> bool:
        T = self.filtration.horizon if horizon is None else horizon
        return bool(np.all(self._values <= T))

    def level_set(self, n: float) -> ClopenSet:
        return self.space.clopen_from_mask(self._values == n)

    def at_most(self, n: float) -> ClopenSet:
        return self.space.clopen_from_mask(self._values <= n)

    def _check_compatible(self, other: StoppingTime):
        if self.space != other.space:
            raise SpaceMismatch(f"{self.space} vs {other.space}")
        if self.filtration != other.filtration:
            raise FiltrationMismatch("stopping times refer to different filtrations")

    def __eq__(self, other) -> bool:
        if not isinstance(other, StoppingTime):
            return NotImplemented
        return self.filtration == other.filtration and np.array_equal(self._values, other._values)

    def __hash__(self):
        return hash(self._values.tobytes())

    def __or__(self, other: StoppingTime) -> StoppingTime:
        return st_algebra(self, other, "join")

    def __and__(self, other: StoppingTime) -> StoppingTime:
        return st_algebra(self, other, "meet")

    def __add__(self, other: StoppingTime) -> StoppingTime:
        return st_algebra(self, other, "plus")

    def truncate(self, n: int) -> StoppingTime:
        """``tau ∧ n``."""
        return st_algebra(self, StoppingTime.constant(self.filtration, n), "meet")

    def __repr__(self):
        return f"StoppingTime({self._values.tolist()})"

    def to_json(self) -> dict:
        return {"values": encode_array(self._values)}

    @classmethod
    def from_json(cls, filtration: Filtration, doc: dict) -> StoppingTime:
        return cls(filtration, decode_array(doc["values"]))


# -- representation by band projections ----------------------------------------


def _check_commutation(filtration: Filtration, bands: Sequence[BandProjection]) -> None:
    last = max(len(bands), filtration.horizon)
    for i, p in enumerate(bands, start=1):
        d = p.band_support.mask.astype(float)
        for j in range(i, last + 1):
            m = filtration.stage(j).matrix()
            if not np.array_equal(m * d[None, :], d[:, None] * m):
                raise CommutationFailure(f"P_{i} does not commute with F_{j}")


def to_projections(t: StoppingTime, length: int | None = None) -> list[BandProjection]:
    """``P_n`` = projection onto ``{tau <= n}`` for ``n = 1 .. length``.

    ``length`` defaults to the larger of the horizon and the largest finite value.
    """
    n_max = max(t.filtration.horizon, t.max_finite() or 1) if length is None else length
    bands = [BandProjection(t.at_most(n)) for n in range(1, n_max + 1)]
    _check_commutation(t.filtration, bands)
    return bands


def from_projections(bands: Sequence[BandProjection], filtration: Filtration) -> StoppingTime:
    """``tau = inf * 1_V + sup_n n * 1_{U_n}`` with ``U_n = W_n \\ W_{n-1}``."""
    space = filtration.space
    prev = BandProjection.zero(space)
    for n, p in enumerate(bands, start=1):
        if p.space != space:
            raise SpaceMismatch(f"P_{n} lives on another space")
        if not prev <= p:
            raise NotIncreasing(f"P_{n - 1} is not below P_{n}")
        prev = p
    _check_commutation(filtration, bands)
    return from_level_sets(filtration, level_sets(bands))


def level_sets(bands: Sequence[BandProjection]) -> list[ClopenSet]:
    """The disjoint sets ``U_n = W_n \\ W_{n-1}`` of an increasing band sequence."""
    out = []
    prev = None
    for p in bands:
        w = p.band_support
        out.append(w if prev is None else w - prev)
        prev = w
    return out


def from_level_sets(filtration: Filtration, sets: Sequence[ClopenSet]) -> StoppingTime:
    """``tau = n`` on ``U_n`` and ``inf`` off their union; the U_n must be disjoint."""
    space = filtration.space
    values = np.full(space.atom_count, INF)
    covered = space.empty
    for n, u in enumerate(sets, start=1):
        if u & covered:
            raise InvalidStoppingTime(f"U_{n} meets an earlier level set")
        covered = covered | u
        values[u.mask] = n
    return StoppingTime(filtration, values)


# -- closure algebra -----------------------------------------------------------


def _indicator_le(values: np.ndarray, n: int) -> np.ndarray:
    return (values <= n).astype(float)


def _check_levels(result: np.ndarray, parts: Sequence[np.ndarray], combine, what: str) -> None:
    finite = [v[np.isfinite(v)] for v in (result, *parts)]
    top = int(max((f.max() for f in finite if f.size), default=1))
    for n in range(1, top + 1):
        expect = combine([_indicator_le(p, n) for p in parts])
        if not np.array_equal(_indicator_le(result, n), expect):
            raise ConsistencyError(f"{what}: level identity fails at n = {n}")


def st_algebra(a: StoppingTime, b: StoppingTime, op: str) -> StoppingTime:
    """Pointwise join, meet or sum of two stopping times (``inf`` absorbs in sums)."""
    a._check_compatible(b)
    if op == "join":
        v = np.maximum(a.values, b.values)
        _check_levels(v, [a.values, b.values], lambda ind: np.minimum(*ind), "join")
    elif op == "meet":
        v = np.minimum(a.values, b.values)
        _check_levels(v, [a.values, b.values], lambda ind: np.maximum(*ind), "meet")
    elif op == "plus":
        v = a.values + b.values
    else:
        raise ValueError(f"unknown operation {op!r}")
    return StoppingTime(a.filtration, v)


def st_extremum(seq: Sequence[StoppingTime], which: str) -> StoppingTime:
    """Pointwise sup or inf of a finite family of stopping times."""
    if len(seq) == 0:
        raise EmptyFamily("extremum of an empty family of stopping times")
    for t in seq[1:]:
        seq[0]._check_compatible(t)
    stack = np.stack([t.values for t in seq])
    parts = list(stack)
    if which == "sup":
        v = stack.max(axis=0)
        _check_levels(v, parts, lambda ind: np.min(ind, axis=0), "sup")
    elif which == "inf":
        v = stack.min(axis=0)
        _check_levels(v, parts, lambda ind: np.max(ind, axis=0), "inf")
    else:
        raise ValueError(f"unknown extremum {which!r}")
    return StoppingTime(seq[0].filtration, v)


def time_change(t: StoppingTime, nk: Sequence[int]) -> StoppingTime:
    """Relabel ``tau = k`` as ``n_k``; ``inf`` stays ``inf``."""
    nk = [int(n) for n in nk]
    for k, (lo, hi) in enumerate(zip(nk, nk[1:]), start=1):
        if not lo < hi:
            raise NotIncreasing(f"n_{k} = {lo} is not below n_{k + 1} = {hi}")
    for k, n in enumerate(nk, start=1):
        if n < k:
            raise DomainViolation(f"n_{k} = {n} < {k}")
    top = t.max_finite()
    if top is not None and top > len(nk):
        raise DomainViolation(f"tau reaches {top} but only {len(nk)} relabels were given")
    table = np.array([INF] + [float(n) for n in nk])
    idx = np.where(np.isfinite(t.values), t.values, 0).astype(np.int64)
    v = np.where(np.isfinite(t.values), table[idx], INF)
    for k in t.finite_levels():
        if not np.array_equal(v == nk[k - 1], t.values == k):
            raise ConsistencyError(f"{{g(tau) = n_{k}}} differs from {{tau = {k}}}")
    return StoppingTime(t.filtration, v)


# -- stopped elements ----------------------------------------------------------


def _stopped_pointwise(p: AdaptedProcess, tau: np.ndarray) -> np.ndarray:
    path = np.stack([x.values for x in p.path])
    idx = tau.astype(np.int64) - 1
    return path[idx, np.arange(path.shape[1])]


def _stopped_band_sum(p: AdaptedProcess, t: StoppingTime) -> LatticeElement:
    # rows are the band supports W_n = {tau <= n}; their first differences are the P_n - P_(n-1)
    W = t.values[None, :] <= np.arange(p.horizon + 1)[:, None]
    bands = np.diff(W.astype(np.int8), axis=0)
    if (bands < 0).any():
        raise ConsistencyError("band projections of tau are not increasing")
    path = np.stack([x.values for x in p.path])
    return LatticeElement(t.space, (bands * path).sum(axis=0))


def stopped_element(p: AdaptedProcess, t: StoppingTime) -> LatticeElement:
    """``X_tau``, computed pointwise and as ``sum_n (P_n - P_{n-1}) X_n``; the two must agree."""
    if p.filtration != t.filtration:
        raise FiltrationMismatch("process and stopping time refer to different filtrations")
    if not t.is_bounded(p.horizon):
        raise Unbounded(f"tau exceeds the process horizon {p.horizon}: {t.values.tolist()}")
    pointwise = LatticeElement(t.space, _stopped_pointwise(p, t.values))
    band_sum = _stopped_band_sum(p, t)
    if pointwise != band_sum:
        raise ConsistencyError(f"pointwise {pointwise!r} != band sum {band_sum!r}")
    return pointwise


def stopped_process(p: AdaptedProcess, t: StoppingTime) -> AdaptedProcess:
    """``(X_{tau ∧ n})_n`` for ``n = 1 .. T``; adaptedness is re-checked."""
    return AdaptedProcess(p.filtration, [stopped_element(p, t.truncate(n)) for n in range(1, p.horizon + 1)])


@dataclass
class IdentityRecord:
    join: bool
    meet: bool
    sup: bool
    inf: bool

    @property
    def holds(self) -> bool:
        return self.join and self.meet and self.sup and self.inf


def increasing_process_identities(p: AdaptedProcess, sigma: StoppingTime, tau: StoppingTime,
                                  family: Sequence[StoppingTime] | None = None) -> IdentityRecord:
    """Check ``X_{σ∨τ} = X_σ ∨ X_τ``, the meet analogue, and the sup/inf of a family.

    ``family`` defaults to ``(σ, τ)``.  An unbounded supremum is rejected.
    """
    if not p.is_increasing():
        raise NotIncreasing("the process is not increasing")
    family = [sigma, tau] if family is None else list(family)
    Xs, Xt = stopped_element(p, sigma), stopped_element(p, tau)
    top = st_extremum(family, "sup")
    if not top.is_bounded(p.horizon):
        raise Unbounded("the supremum of the family is unbounded")
    stopped = [stopped_element(p, s) for s in family]
    sup_x = stopped[0]
    inf_x = stopped[0]
    for x in stopped[1:]:
        sup_x, inf_x = sup_x | x, inf_x & x
    return IdentityRecord(
        join=stopped_element(p, sigma | tau) == (Xs | Xt),
        meet=stopped_element(p, sigma & tau) == (Xs & Xt),
        sup=stopped_element(p, top) == sup_x,
        inf=stopped_element(p, st_extremum(family, "inf")) == inf_x,
    )


# -- début ---------------------------------------------------------------------


def _level_set(path: np.ndarray, n: int) -> np.ndarray:
    """``{X_{n-1} = 0} ∩ {X_n = 1}`` with ``X_0 = 0``; n is 1-based."""
    prev = path[n - 2] if n >= 2 else np.zeros(path.shape[1])
    return (prev == 0) & (path[n - 1] == 1)


def hitting_time(p: AdaptedProcess) -> StoppingTime:
    """First index at which an increasing {0,1}-valued process reaches 1; ``inf`` if never."""
    path = np.stack([x.values for x in p.path])
    if not np.all((path == 0) | (path == 1)):
        raise NotIndicatorProcess("process values must lie in {0, 1}")
    if not p.is_increasing():
        raise NotIndicatorProcess("process must be increasing")
    values = np.full(path.shape[1], INF)
    for n in range(1, p.horizon + 1):
        values[_level_set(path, n)] = n
    return StoppingTime(p.filtration, values)


def debut_roundtrip(t: StoppingTime, horizon: int | None = None) -> tuple[AdaptedProcess, StoppingTime]:
    """Build ``X_n = 1_{tau <= n}`` and recover tau from it as a hitting time.

    The process runs to the largest finite value of tau, or to ``horizon``
    (default: the filtration horizon) when tau is identically ``inf``.
    """
    top = t.max_finite()
    if top is None:
        top = t.filtration.horizon if horizon is None else horizon
    process = AdaptedProcess(t.filtration, [t.at_most(n).indicator() for n in range(1, top + 1)])
    return process, hitting_time(process)
