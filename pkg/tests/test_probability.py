from __future__ import annotations

import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stonecalc.errors import (
    ArityMismatch,
    ConsistencyError,
    InvalidFiltration,
    InvalidPartition,
    MinorantViolation,
    NotAdapted,
    NotFinite,
    SpaceMismatch,
)
from stonecalc.harness import generate as gen
from stonecalc.lattice import LatticeElement, StoneSpace
from stonecalc.probability import (
    AdaptedProcess,
    AffineMap,
    ConditionalExpectation,
    ConvexFunction,
    Filtration,
    ProcessKind,
    affine_function,
    apply_ce,
    classify_process,
    convex_image_submartingale,
    doob_martingale,
    jensen,
    l1_norm,
    max_function,
    quadratic,
)

from strategies import filtrations, seeded_rng

S2 = StoneSpace(2)


def el(*values):
    return LatticeElement(StoneSpace(len(values)), values)


def fraction_average(ce: ConditionalExpectation, x: LatticeElement) -> list[Fraction]:
    """Independent oracle: exact rational block averages."""
    out = [Fraction(0)] * ce.space.atom_count
    for b in ce.blocks:
        num = sum(Fraction(ce.weights[a]) * Fraction(x[a]) for a in b)
        den = sum(Fraction(ce.weights[a]) for a in b)
        for a in b:
            out[a] = num / den
    return out


@st.composite
def ce_and_rng(draw, max_atoms: int = 8):
    rng = draw(seeded_rng())
    space = StoneSpace(draw(st.integers(1, max_atoms)))
    parts = [gen.random_partition(rng, space.atoms)]
    return ConditionalExpectation(space, parts[0], gen.dyadic_weights(rng, space.atom_count, parts)), rng


class TestConditionalExpectation:
    def test_plain_average(self):
        assert apply_ce(ConditionalExpectation.trivial(S2), el(1, 3)) == el(2, 2)

    def test_singletons_give_identity(self):
        F = ConditionalExpectation(StoneSpace(3), [[0], [1], [2]], [1, 2, 4])
        assert F(el(5, -1, 2)) == el(5, -1, 2)
        assert np.array_equal(F.matrix(), np.eye(3))

    def test_weighted_average(self):
        F = ConditionalExpectation(StoneSpace(3), [[0, 1], [2]], [1, 3, 1])
        assert F(el(4, 0, 7)) == el(1, 1, 7)

    def test_errors(self):
        F = ConditionalExpectation.trivial(S2)
        with pytest.raises(NotFinite):
            F(el(1, np.inf))
        with pytest.raises(SpaceMismatch):
            F(el(1, 2, 3))
        with pytest.raises(InvalidPartition):
            ConditionalExpectation(S2, [[0]])
        with pytest.raises(InvalidPartition):
            ConditionalExpectation(S2, [[0, 1], [1]])
        with pytest.raises(InvalidPartition):
            ConditionalExpectation(S2, [[0, 1]], [1, 0])

    @given(ce_and_rng())
    def test_matches_fraction_oracle(self, data):
        F, rng = data
        x = gen.random_element(rng, F.space)
        assert F(x).values.tolist() == [float(q) for q in fraction_average(F, x)]

    @settings(max_examples=1000)
    @given(ce_and_rng())
    def test_averaging_property(self, data):
        F, rng = data
        f = gen.block_constant(rng, F)
        g = gen.random_element(rng, F.space)
        assert F(f * g) == f * F(g)

    @given(ce_and_rng())
    def test_projection_and_unit(self, data):
        F, rng = data
        x = gen.random_element(rng, F.space)
        assert F(F(x)) == F(x)
        assert F(F.space.unit) == F.space.unit
        assert F.is_measurable(F(x))

    @given(ce_and_rng())
    def test_strictly_positive(self, data):
        F, rng = data
        x = gen.random_element(rng, F.space, positive=True)
        y = F(x)
        assert y.is_positive
        for a in F.space.atoms:
            if x[a] > 0:
                assert all(y[b] > 0 for b in F.block_of(a))

    @given(ce_and_rng())
    def test_linear(self, data):
        F, rng = data
        x, y = gen.random_element(rng, F.space), gen.random_element(rng, F.space)
        assert F(x.scale(2.0) + y) == F(x).scale(2.0) + F(y)

    @given(ce_and_rng())
    def test_range_is_sublattice(self, data):
        F, rng = data
        fam = [gen.block_constant(rng, F) for _ in range(4)]
        top, bottom = fam[0], fam[0]
        for g in fam[1:]:
            top, bottom = top | g, bottom & g
        assert F.is_measurable(top) and F.is_measurable(bottom)


class TestFiltration:
    def test_tower_and_constant_extension(self):
        S = StoneSpace(4)
        filt = Filtration.from_partitions(S, [[[0, 1, 2, 3]], [[0, 1], [2, 3]]])
        x = el(1, 3, 5, 9)
        assert filt.stage(1)(filt.stage(2)(x)) == filt.stage(1)(x) == el(4.5, 4.5, 4.5, 4.5)
        assert filt.stage(7) == filt.stage(2)
        assert filt.tower_defect() == 0.0

    def test_non_refining_rejected(self):
        with pytest.raises(InvalidFiltration):
            Filtration.from_partitions(StoneSpace(3), [[[0, 1], [2]], [[0], [1, 2]]])

    def test_weights_must_be_shared(self):
        S = StoneSpace(2)
        with pytest.raises(InvalidFiltration):
            Filtration([ConditionalExpectation(S, [[0, 1]], [1, 1]), ConditionalExpectation(S, [[0], [1]], [1, 2])])

    @given(filtrations())
    def test_tower_on_indicators(self, data):
        filt, _ = data
        for s in range(1, filt.horizon + 1):
            for t in range(s, filt.horizon + 1):
                for a in filt.space.atoms:
                    e = filt.space.clopen([a]).indicator()
                    assert filt.stage(s)(filt.stage(t)(e)) == filt.stage(s)(e)
                    assert filt.stage(t)(filt.stage(s)(e)) == filt.stage(s)(e)

    @given(filtrations())
    def test_json_roundtrip(self, data):
        filt, _ = data
        doc = json.loads(json.dumps(filt.to_json()))
        assert set(doc) == {"weights", "stages"}
        assert Filtration.from_json(doc) == filt


class TestProcesses:
    filt = Filtration.from_partitions(S2, [[[0, 1]], [[0], [1]], [[0], [1]]])

    def test_adaptedness_enforced(self):
        with pytest.raises(NotAdapted):
            AdaptedProcess(self.filt, [el(1, 2)])

    def test_constant_is_martingale(self):
        p = AdaptedProcess(self.filt, [S2.constant(3.0)] * 3)
        assert classify_process(p) is ProcessKind.MARTINGALE

    def test_increasing_scalar_is_submartingale(self):
        filt = Filtration.from_partitions(S2, [[[0, 1]]] * 3)
        p = AdaptedProcess(filt, [S2.constant(float(t)) for t in (1, 2, 3)])
        assert classify_process(p) is ProcessKind.SUBMARTINGALE
        q = AdaptedProcess(filt, [S2.constant(float(-t)) for t in (1, 2, 3)])
        assert classify_process(q) is ProcessKind.SUPERMARTINGALE

    def test_neither(self):
        p = AdaptedProcess(self.filt, [S2.constant(0.0), el(1, 1), el(2, -4)])
        assert classify_process(p) is ProcessKind.NONE

    def test_json_roundtrip(self):
        p = doob_martingale(self.filt, el(2, 6))
        assert AdaptedProcess.from_json(self.filt, json.loads(json.dumps(p.to_json()))) == p

    @settings(max_examples=500)
    @given(filtrations())
    def test_doob_martingale_is_martingale(self, data):
        filt, rng = data
        p = gen.random_martingale(rng, filt)
        assert classify_process(p) is ProcessKind.MARTINGALE


class TestJensen:
    def test_square_two_atoms(self):
        F = ConditionalExpectation.trivial(S2)
        rec = jensen(quadratic(1), [el(0, 2)], F)
        assert rec.lhs == el(2, 2) and rec.rhs == el(1, 1)
        assert rec.slack == el(1, 1)
        assert rec.holds and rec.chain_defect == 0.0

    def test_affine_is_equality(self):
        F = ConditionalExpectation(StoneSpace(3), [[0, 1], [2]], [1, 1, 1])
        rec = jensen(affine_function([2.0, -1.0], 0.5), [el(1, 3, 2), el(0, 4, -2)], F)
        assert rec.slack == StoneSpace(3).zero

    def test_bad_minorant(self):
        F = ConditionalExpectation.trivial(S2)
        with pytest.raises(MinorantViolation):
            jensen(quadratic(1), [el(0, 2)], F, minorants=[AffineMap([0.0], 1.0)])

    def test_arity(self):
        with pytest.raises(ArityMismatch):
            jensen(max_function(2), [el(0, 1)], ConditionalExpectation.trivial(S2))

    def test_strict_mode_raises_on_violation(self):
        concave = ConvexFunction(lambda t: -t * t, 1, lambda pts: [AffineMap([0.0], -100.0)], "neg_sq")
        F = ConditionalExpectation.trivial(S2)
        with pytest.raises(ConsistencyError):
            jensen(concave, [el(0, 2)], F)
        assert not jensen(concave, [el(0, 2)], F, strict=False).holds

    @settings(max_examples=1000)
    @given(ce_and_rng(), st.sampled_from([max_function, l1_norm, quadratic]), st.integers(1, 3))
    def test_builtin_families(self, data, family, n):
        F, rng = data
        xs = [gen.random_element(rng, F.space) for _ in range(n)]
        rec = jensen(family(n), xs, F)
        assert rec.min_slack >= -1e-12
        assert rec.chain_defect <= 1e-12
        assert rec.chain_min_margin >= -1e-12
        # the touching minorants recover f at the averaged points
        assert rec.envelope_gap <= 1e-12


class TestConvexImage:
    filt = Filtration.from_partitions(StoneSpace(4), [[[0, 1, 2, 3]], [[0, 1], [2, 3]], [[0], [1], [2], [3]]])

    def test_abs_of_martingale(self):
        p = doob_martingale(self.filt, el(-3, 1, 2, -4))
        rec = convex_image_submartingale([p], l1_norm(1))
        assert rec.is_submartingale
        assert rec.image.at(1) == StoneSpace(4).constant(1.0)

    def test_affine_image_is_martingale(self):
        p = doob_martingale(self.filt, el(-3, 1, 2, -4))
        rec = convex_image_submartingale([p], affine_function([3.0], 1.0))
        assert rec.kind is ProcessKind.MARTINGALE

    def test_rejects_non_martingale(self):
        p = AdaptedProcess(self.filt, [StoneSpace(4).constant(float(t)) for t in (1, 2, 3)])
        with pytest.raises(ConsistencyError):
            convex_image_submartingale([p], l1_norm(1))

    @settings(max_examples=500)
    @given(filtrations())
    def test_max_of_two_martingales(self, data):
        filt, rng = data
        p, q = gen.random_martingale(rng, filt), gen.random_martingale(rng, filt)
        rec = convex_image_submartingale([p, q], max_function(2))
        assert rec.is_submartingale
        assert all(r.holds for r in rec.jensen_records.values())
