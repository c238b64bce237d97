"""Finite Stone-space model of an order complete vector lattice.

A finite discrete space K is extremally disconnected, compact and Hausdorff,
every subset of it is clopen, and C^inf(K) is simply the set of
extended-real functions on the atoms.  Elements are stored as read-only
float64 arrays; +inf/-inf are ordinary IEEE infinities.

Arithmetic follows the extended-real conventions used for sup-completions:

* ``inf - inf`` is an error (:class:`UndefinedArithmetic`), never NaN;
* ``0 * inf == 0``, so band projections annihilate infinite parts.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from ._json import decode_array, encode_array
from .errors import (
    EmptyFamily,
    NotFinite,
    NotMonotone,
    NotSupCompletion,
    SpaceMismatch,
    UndefinedArithmetic,
)

REL_TOL = 1e-9
ABS_TOL = 1e-12


@dataclass(frozen=True)
class StoneSpace:
    """The finite set of atoms ``0 .. atom_count-1``; its clopen algebra is the power set."""

    atom_count: int

    def __post_init__(self):
        if int(self.atom_count) != self.atom_count or self.atom_count < 1:
            raise ValueError(f"atom_count must be a positive integer, got {self.atom_count!r}")

    @property
    def atoms(self) -> range:
        return range(self.atom_count)

    def element(self, values) -> LatticeElement:
        return LatticeElement(self, values)

    def constant(self, c: float) -> LatticeElement:
        return LatticeElement(self, np.full(self.atom_count, float(c)))

    @property
    def unit(self) -> LatticeElement:
        """The weak unit E, i.e. the indicator of K."""
        return self.constant(1.0)

    @property
    def zero(self) -> LatticeElement:
        return self.constant(0.0)

    def clopen(self, members: Iterable[int]) -> ClopenSet:
        return ClopenSet(self, frozenset(int(m) for m in members))

    def clopen_from_mask(self, mask) -> ClopenSet:
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != (self.atom_count,):
            raise ValueError("mask length must equal atom_count")
        return ClopenSet(self, frozenset(np.flatnonzero(mask).tolist()))

    @property
    def full(self) -> ClopenSet:
        return ClopenSet(self, frozenset(self.atoms))

    @property
    def empty(self) -> ClopenSet:
        return ClopenSet(self, frozenset())

    def to_json(self) -> dict:
        return {"atoms": self.atom_count}

    @classmethod
    def from_json(cls, doc: dict) -> StoneSpace:
        return cls(int(doc["atoms"]))


@dataclass(frozen=True)
class ClopenSet:
    space: StoneSpace
    members: frozenset

    def __post_init__(self):
        bad = [m for m in self.members if not 0 <= m < self.space.atom_count]
        if bad:
            raise ValueError(f"atoms {sorted(bad)} are not in a space of {self.space.atom_count} atoms")

    def _check(self, other: ClopenSet):
        if self.space != other.space:
            raise SpaceMismatch(f"{self.space} vs {other.space}")

    def __or__(self, other: ClopenSet) -> ClopenSet:
        self._check(other)
        return ClopenSet(self.space, self.members | other.members)

    def __and__(self, other: ClopenSet) -> ClopenSet:
        self._check(other)
        return ClopenSet(self.space, self.members & other.members)

    def __sub__(self, other: ClopenSet) -> ClopenSet:
        self._check(other)
        return ClopenSet(self.space, self.members - other.members)

    def __invert__(self) -> ClopenSet:
        return ClopenSet(self.space, frozenset(self.space.atoms) - self.members)

    def __le__(self, other: ClopenSet) -> bool:
        self._check(other)
        return self.members <= other.members

    def __ge__(self, other: ClopenSet) -> bool:
        self._check(other)
        return self.members >= other.members

    def __contains__(self, atom: int) -> bool:
        return atom in self.members

    def __iter__(self):
        return iter(sorted(self.members))

    def __len__(self) -> int:
        return len(self.members)

    def __bool__(self) -> bool:
        return bool(self.members)

    @property
    def mask(self) -> np.ndarray:
        m = np.zeros(self.space.atom_count, dtype=bool)
        m[list(self.members)] = True
        return m

    def indicator(self) -> LatticeElement:
        return LatticeElement(self.space, self.mask.astype(float))

    def to_json(self) -> dict:
        return {"atoms": self.space.atom_count, "values": self.mask.astype(int).tolist()}

    @classmethod
    def from_json(cls, doc: dict) -> ClopenSet:
        space = StoneSpace(int(doc["atoms"]))
        values = decode_array(doc["values"])
        if any(v not in (0.0, 1.0) for v in values):
            raise ValueError("clopen set values must be 0 or 1")
        return space.clopen_from_mask(np.asarray(values) == 1.0)

    def __repr__(self):
        return f"ClopenSet({sorted(self.members)} of {self.space.atom_count})"


def _ext_add(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # operands are NaN-free, so a NaN in the sum marks exactly an inf - inf clash
    with np.errstate(invalid="ignore"):
        out = a + b
    clash = np.isnan(out)
    if clash.any():
        raise UndefinedArithmetic(f"inf - inf at atoms {np.flatnonzero(clash).tolist()}")
    return out


def _ext_mul(a, b) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    with np.errstate(invalid="ignore"):
        out = a * b
    # likewise a NaN product is exactly 0 * inf, which is 0 here
    zero_inf = np.isnan(out)
    if zero_inf.any():
        out = np.where(zero_inf, 0.0, out)
    return out


class LatticeElement:
    """An extended-real function on the atoms of a :class:`StoneSpace`.

    Immutable.  Equality is exact per-atom equality; use :meth:`isclose` for
    tolerance comparisons.  ``x | y`` and ``x & y`` are the lattice sup and inf.
    """

    __slots__ = ("space", "_values")

    def __init__(self, space: StoneSpace, values):
        arr = np.array(values, dtype=float)
        if arr.shape != (space.atom_count,):
            raise ValueError(
                f"expected {space.atom_count} values, got shape {arr.shape}"
            )
        if np.isnan(arr).any():
            raise ValueError("NaN is not an extended real")
        arr.setflags(write=False)
        self.space = space
        self._values = arr

    @property
    def values(self) -> np.ndarray:
        return self._values

    def __len__(self) -> int:
        return self.space.atom_count

    def __getitem__(self, atom: int) -> float:
        return float(self._values[atom])

    def __iter__(self):
        return iter(self._values.tolist())

    def __repr__(self):
        return f"LatticeElement({self._values.tolist()})"

    def _other(self, other) -> np.ndarray:
        if isinstance(other, LatticeElement):
            if other.space != self.space:
                raise SpaceMismatch(f"{self.space} vs {other.space}")
            return other._values
        return np.full(self.space.atom_count, float(other))

    @classmethod
    def _wrap(cls, space: StoneSpace, arr: np.ndarray) -> LatticeElement:
        """Adopt a freshly computed, NaN-free float array of the right shape without copying."""
        arr.setflags(write=False)
        out = object.__new__(cls)
        out.space = space
        out._values = arr
        return out

    def _new(self, arr) -> LatticeElement:
        return LatticeElement._wrap(self.space, arr)

    # -- membership ---------------------------------------------------------

    @property
    def is_finite(self) -> bool:
        return bool(np.isfinite(self._values).all())

    @property
    def in_sup_completion(self) -> bool:
        return not bool(np.isneginf(self._values).any())

    @property
    def is_positive(self) -> bool:
        return bool((self._values >= 0).all())

    def require_finite(self, what: str = "element") -> LatticeElement:
        if not self.is_finite:
            raise NotFinite(f"{what} has infinite values: {self._values.tolist()}")
        return self

    # -- vector lattice / f-algebra operations -------------------------------

    def __add__(self, other) -> LatticeElement:
        return self._new(_ext_add(self._values, self._other(other)))

    __radd__ = __add__

    def __neg__(self) -> LatticeElement:
        return self._new(-self._values)

    def __sub__(self, other) -> LatticeElement:
        return self._new(_ext_add(self._values, -self._other(other)))

    def __rsub__(self, other) -> LatticeElement:
        return self._new(_ext_add(self._other(other), -self._values))

    def __mul__(self, other) -> LatticeElement:
        return self._new(_ext_mul(self._values, self._other(other)))

    __rmul__ = __mul__

    def scale(self, c: float) -> LatticeElement:
        return self._new(_ext_mul(float(c), self._values))

    def sup(self, other) -> LatticeElement:
        return self._new(np.maximum(self._values, self._other(other)))

    def inf(self, other) -> LatticeElement:
        return self._new(np.minimum(self._values, self._other(other)))

    __or__ = sup
    __ror__ = sup
    __and__ = inf
    __rand__ = inf

    def __abs__(self) -> LatticeElement:
        return self._new(np.abs(self._values))

    @property
    def positive_part(self) -> LatticeElement:
        return self._new(np.maximum(self._values, 0.0))

    @property
    def negative_part(self) -> LatticeElement:
        return self._new(np.maximum(-self._values, 0.0))

    # -- order and equality -------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, LatticeElement):
            return NotImplemented
        return self.space == other.space and bool(np.array_equal(self._values, other._values))

    def __hash__(self):
        return hash((self.space.atom_count, self._values.tobytes()))

    def __le__(self, other) -> bool:
        return bool((self._values <= self._other(other)).all())

    def __ge__(self, other) -> bool:
        return bool((self._values >= self._other(other)).all())

    def __lt__(self, other) -> bool:
        return self <= other and self != other

    def __gt__(self, other) -> bool:
        return self >= other and self != other

    def isclose(self, other, rel: float = REL_TOL, abs_: float = ABS_TOL) -> bool:
        b = self._other(other)
        a = self._values
        same_inf = np.isinf(a) & (a == b)
        with np.errstate(invalid="ignore"):
            close = np.abs(a - b) <= abs_ + rel * np.maximum(np.abs(a), np.abs(b))
        return bool((same_inf | (np.isfinite(a) & np.isfinite(b) & close)).all())

    # -- sets attached to an element -----------------------------------------

    def support(self) -> ClopenSet:
        """``{x != 0}``; closure is a no-op on a discrete space."""
        return self.space.clopen_from_mask(self._values != 0)

    def where(self, mask) -> ClopenSet:
        return self.space.clopen_from_mask(mask)

    # -- serialisation --------------------------------------------------------

    def to_json(self) -> dict:
        return {"atoms": self.space.atom_count, "values": encode_array(self._values)}

    @classmethod
    def from_json(cls, doc: dict) -> LatticeElement:
        return cls(StoneSpace(int(doc["atoms"])), decode_array(doc["values"]))


def _same_space(*elements: LatticeElement) -> StoneSpace:
    space = elements[0].space
    for e in elements[1:]:
        if e.space != space:
            raise SpaceMismatch(f"{space} vs {e.space}")
    return space


def add(x: LatticeElement, y: LatticeElement) -> LatticeElement:
    return x + y


def subtract(x: LatticeElement, y: LatticeElement) -> LatticeElement:
    return x - y


def multiply(x: LatticeElement, y: LatticeElement) -> LatticeElement:
    return x * y


def sup(x: LatticeElement, y: LatticeElement) -> LatticeElement:
    return x.sup(y)


def inf(x: LatticeElement, y: LatticeElement) -> LatticeElement:
    return x.inf(y)


@dataclass(frozen=True)
class BandProjection:
    """Multiplication by the indicator of a clopen set."""

    band_support: ClopenSet

    @property
    def space(self) -> StoneSpace:
        return self.band_support.space

    @classmethod
    def identity(cls, space: StoneSpace) -> BandProjection:
        return cls(space.full)

    @classmethod
    def zero(cls, space: StoneSpace) -> BandProjection:
        return cls(space.empty)

    def __call__(self, x: LatticeElement) -> LatticeElement:
        return apply_projection(self, x)

    def compose(self, other: BandProjection) -> BandProjection:
        return BandProjection(self.band_support & other.band_support)

    __matmul__ = compose

    def complement(self) -> BandProjection:
        return BandProjection(~self.band_support)

    def minus(self, other: BandProjection) -> BandProjection:
        """``P - Q`` for ``Q <= P``; again a band projection."""
        if not other.band_support <= self.band_support:
            raise ValueError("P - Q is a band projection only when Q <= P")
        return BandProjection(self.band_support - other.band_support)

    def __le__(self, other: BandProjection) -> bool:
        return self.band_support <= other.band_support

    @property
    def is_zero(self) -> bool:
        return not self.band_support

    @property
    def is_identity(self) -> bool:
        return len(self.band_support) == self.space.atom_count


def band_projection_of(y: LatticeElement) -> BandProjection:
    """Projection onto the band generated by ``y``: support ``{y != 0}``."""
    return BandProjection(y.support())


def apply_projection(p: BandProjection, x: LatticeElement) -> LatticeElement:
    if p.space != x.space:
        raise SpaceMismatch(f"{p.space} vs {x.space}")
    return x * p.band_support.indicator()


def finite_infinite_decomposition(u: LatticeElement) -> tuple[LatticeElement, LatticeElement]:
    """Split ``u`` in the sup-completion into ``P_U u`` and ``P_{U^c} u``, U = {u < inf}."""
    if not u.in_sup_completion:
        raise NotSupCompletion(f"{u!r} takes the value -inf")
    finite_band = BandProjection(u.where(u.values < np.inf))
    return finite_band(u), finite_band.complement()(u)


def _check_sup_family(G: Sequence[LatticeElement]) -> StoneSpace:
    if len(G) == 0:
        raise EmptyFamily("supremum of an empty family")
    space = _same_space(*G)
    for g in G:
        if not g.is_positive:
            raise NotSupCompletion(f"{g!r} is not in the positive cone of the sup-completion")
    return space


def sup_family(G: Sequence[LatticeElement]) -> LatticeElement:
    """Pointwise supremum of a non-empty finite family in the positive sup-completion."""
    space = _check_sup_family(G)
    return LatticeElement(space, np.max(np.stack([g.values for g in G]), axis=0))


def sup_is_infinite(G: Sequence[LatticeElement]) -> bool:
    """Decide ``sup G == inf * 1`` through the open-set criterion rather than the supremum.

    The criterion asks, for every non-empty open U and every level n, for a
    non-empty open V inside U and some g exceeding n on V.  Every non-empty
    open set contains a singleton and singletons are open, so it suffices to
    test U = V = {atom}; with a finite family "g(atom) > n for every n" means
    some g is +inf at the atom.
    """
    space = _check_sup_family(G)
    for atom in space.atoms:
        if not any(g[atom] == np.inf for g in G):
            return False
    return True


def monotone_sup(seq: Sequence[LatticeElement]) -> LatticeElement:
    """Supremum of an increasing sequence, checking that it really increases."""
    if len(seq) == 0:
        raise EmptyFamily("supremum of an empty sequence")
    _same_space(*seq)
    for a, b in zip(seq, seq[1:]):
        if not a <= b:
            raise NotMonotone("sequence is not increasing")
    return LatticeElement(seq[0].space, np.max(np.stack([x.values for x in seq]), axis=0))
