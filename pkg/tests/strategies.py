"""Hypothesis strategies shared by the unit tests.

Scalars are small dyadic rationals so that exact identities can be checked
with ``==`` without floating point noise.
"""

from __future__ import annotations

import numpy as np
from hypothesis import strategies as st

from stonecalc.harness import generate as gen
from stonecalc.lattice import LatticeElement, StoneSpace
from stonecalc.spectral.steps import StepFunction

dyadics = st.integers(-64, 64).map(lambda k: k / 8)
atom_counts = st.integers(1, 8)


@st.composite
def elements(draw, n: int | None = None, count: int = 1, allow_inf: bool = False):
    """``count`` elements on one random space."""
    n = draw(atom_counts) if n is None else n
    space = StoneSpace(n)
    scalar = dyadics | st.just(np.inf) if allow_inf else dyadics
    out = [LatticeElement(space, draw(st.lists(scalar, min_size=n, max_size=n))) for _ in range(count)]
    return out[0] if count == 1 else out


@st.composite
def step_functions(draw, near=()):
    pool = draw(st.lists(dyadics, max_size=6)) + list(near)
    bps = sorted(set(pool))
    vals = draw(st.lists(dyadics, min_size=len(bps), max_size=len(bps)))
    return StepFunction(bps, vals, draw(dyadics))


@st.composite
def seeded_rng(draw):
    return np.random.default_rng(draw(st.integers(0, 2 ** 32 - 1)))


@st.composite
def filtrations(draw, max_atoms: int = 8, max_horizon: int = 5):
    rng = draw(seeded_rng())
    space = StoneSpace(draw(st.integers(1, max_atoms)))
    return gen.random_filtration(rng, space, draw(st.integers(1, max_horizon))), rng
