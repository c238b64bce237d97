"""Deliberate single-line defects used to show that the suites can fail.

Each mutation swaps one module-level helper for a broken copy inside a
context manager; the original is restored on exit.
"""

from __future__ import annotations

import contextlib
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .. import probability, stopping
from ..spectral import calculus


def _closed_left_measure(a, lo, hi):
    # mu(lo, hi] computed as mu[lo, hi]: the left endpoint is wrongly included
    below = (a.source.values[None, :] < np.asarray(lo, dtype=float)[..., None]).astype(float)
    return a._at(hi) - below


def _unweighted_numerator(labels, weights, values, nblocks):
    rows = np.atleast_2d(values)
    idx = (labels[None, :] + nblocks * np.arange(rows.shape[0])[:, None]).ravel()
    num = np.bincount(idx, weights=rows.ravel(), minlength=rows.shape[0] * nblocks)  # weight dropped
    den = np.bincount(labels, weights=weights, minlength=nblocks)
    out = (num.reshape(-1, nblocks) / den)[:, labels]
    return out if np.ndim(values) == 2 else out[0]


def _shifted_level_set(path, n):
    prev = path[n - 1]  # should be path[n - 2]
    nxt = path[n] if n < len(path) else np.ones(path.shape[1])
    return (prev == 0) & (nxt == 1)


@dataclass(frozen=True)
class Mutation:
    name: str
    target_suite: str
    description: str
    module: object
    attribute: str
    replacement: Callable


MUTATIONS = {
    m.name: m
    for m in (
        Mutation("mu_off_by_one", "spectral", "spectral measure of (a, b] includes the point a",
                 calculus, "_piece_measure", _closed_left_measure),
        Mutation("ce_dropped_weight", "probability", "block average drops the atom weight from the numerator",
                 probability, "_block_average", _unweighted_numerator),
        Mutation("hitting_level_shift", "stopping", "hitting time level set {X_n = 0, X_(n+1) = 1}",
                 stopping, "_level_set", _shifted_level_set),
    )
}


@contextlib.contextmanager
def applied(name: str | None):
    """Run the body with the named mutation in place (no-op for None)."""
    if name is None:
        yield None
        return
    if name not in MUTATIONS:
        raise KeyError(f"unknown mutation {name!r}; expected one of {sorted(MUTATIONS)}")
    m = MUTATIONS[name]
    original = getattr(m.module, m.attribute)
    setattr(m.module, m.attribute, m.replacement)
    try:
        yield m
    finally:
        setattr(m.module, m.attribute, original)
