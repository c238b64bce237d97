from __future__ import annotations

import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stonecalc.errors import (
    CommutationFailure,
    DomainViolation,
    EmptyFamily,
    FiltrationMismatch,
    InvalidStoppingTime,
    NotIncreasing,
    NotIndicatorProcess,
    Unbounded,
)
from stonecalc.harness import generate as gen
from stonecalc.lattice import BandProjection, LatticeElement, StoneSpace
from stonecalc.probability import AdaptedProcess, Filtration
from stonecalc.stopping import (
    StoppingTime,
    debut_roundtrip,
    from_level_sets,
    from_projections,
    hitting_time,
    increasing_process_identities,
    level_sets,
    st_algebra,
    st_extremum,
    stopped_element,
    stopped_process,
    time_change,
    to_projections,
)

from strategies import filtrations

INF = math.inf
S2 = StoneSpace(2)
# two atoms, revealed at time 2
F2 = Filtration.from_partitions(S2, [[[0, 1]], [[0], [1]], [[0], [1]]])


def el(*values):
    return LatticeElement(StoneSpace(len(values)), values)


def brute_measurable(t: StoppingTime) -> bool:
    """Independent oracle: every level set is a union of blocks of the matching stage."""
    for n in t.finite_levels():
        level = {a for a in t.space.atoms if t.values[a] == n}
        for block in t.filtration.stage(n).blocks:
            inside = {a for a in block if a in level}
            if inside and inside != set(block):
                return False
    return True


@st.composite
def filtration_and_tau(draw):
    filt, rng = draw(filtrations())
    return filt, gen.random_stopping_time(rng, filt), rng


class TestStoppingTime:
    def test_values_and_levels(self):
        t = StoppingTime(F2, [2, INF])
        assert t.finite_levels() == [2]
        assert t.max_finite() == 2
        assert not t.is_bounded(3)
        assert t.level_set(2).members == {0}
        assert t.at_most(5).members == {0}

    def test_must_be_measurable(self):
        with pytest.raises(InvalidStoppingTime):
            StoppingTime(F2, [1, 2])
        StoppingTime(F2, [2, 3])

    def test_rejects_zero_and_fractions(self):
        for bad in ([0, 1], [1.5, 1.5], [-INF, 1]):
            with pytest.raises(InvalidStoppingTime):
                StoppingTime(F2, bad)

    def test_json(self):
        t = StoppingTime(F2, [2, INF])
        doc = json.loads(json.dumps(t.to_json()))
        assert doc == {"values": [2, "inf"]} or doc == {"values": [2.0, "inf"]}
        assert StoppingTime.from_json(F2, doc) == t

    @given(filtration_and_tau())
    def test_generated_times_are_measurable(self, data):
        _, t, _ = data
        assert brute_measurable(t)


class TestRepresentation:
    def test_full_first_projection(self):
        assert from_projections([BandProjection(S2.full)], F2) == StoppingTime.constant(F2, 1)

    def test_zero_projections(self):
        zero = BandProjection.zero(S2)
        assert from_projections([zero, zero, zero], F2) == StoppingTime.constant(F2, INF)

    def test_to_projections_of_constants(self):
        assert all(P.band_support == S2.full for P in to_projections(StoppingTime.constant(F2, 1)))
        assert all(P.is_zero for P in to_projections(StoppingTime.constant(F2, INF)))

    def test_not_increasing(self):
        with pytest.raises(NotIncreasing):
            from_projections([BandProjection(S2.full), BandProjection.zero(S2)], F2)

    def test_commutation_failure(self):
        with pytest.raises(CommutationFailure):
            from_projections([BandProjection(S2.clopen([0]))], F2)

    @settings(max_examples=300)
    @given(filtration_and_tau())
    def test_roundtrips(self, data):
        filt, t, _ = data
        bands = to_projections(t)
        assert from_projections(bands, filt) == t
        assert [P.band_support for P in to_projections(from_projections(bands, filt), len(bands))] == \
            [P.band_support for P in bands]

    @given(filtration_and_tau())
    def test_level_sets_recovered(self, data):
        filt, t, _ = data
        sets = level_sets(to_projections(t))
        for n, u in enumerate(sets, start=1):
            assert u == t.level_set(n)
        assert from_level_sets(filt, sets) == t


class TestAlgebra:
    s1, s2 = StoppingTime.constant(F2, 1), StoppingTime.constant(F2, 2)

    def test_constants(self):
        assert st_algebra(self.s1, self.s2, "join") == self.s2
        assert st_algebra(self.s1, self.s2, "meet") == self.s1
        assert st_algebra(self.s1, self.s2, "plus") == StoppingTime.constant(F2, 3)
        assert (self.s1 | self.s2, self.s1 & self.s2) == (self.s2, self.s1)

    def test_infinity_absorbs_in_sums(self):
        t = StoppingTime(F2, [2, INF])
        assert (t + self.s1).values.tolist() == [3, INF]
        assert (t & self.s2).values.tolist() == [2, 2]
        assert (t | self.s1).values.tolist() == [2, INF]

    def test_idempotent(self):
        t = StoppingTime(F2, [2, INF])
        assert t | t == t and t & t == t

    def test_filtration_mismatch(self):
        other = Filtration.from_partitions(S2, [[[0], [1]]])
        with pytest.raises(FiltrationMismatch):
            self.s1 | StoppingTime.constant(other, 1)

    def test_extremum(self):
        t = StoppingTime(F2, [2, 3])
        assert st_extremum([t.truncate(n) for n in range(1, 5)], "sup") == t
        assert st_extremum([t, t + self.s1], "inf") == t
        with pytest.raises(EmptyFamily):
            st_extremum([], "sup")

    @settings(max_examples=300)
    @given(filtrations())
    def test_results_are_measurable(self, data):
        filt, rng = data
        fam = [gen.random_stopping_time(rng, filt) for _ in range(3)]
        a, b = fam[0], fam[1]
        for r in (a | b, a & b, a + b, st_extremum(fam, "sup"), st_extremum(fam, "inf")):
            assert brute_measurable(r)
        assert st_extremum(fam, "sup").values.tolist() == np.max([t.values for t in fam], axis=0).tolist()
        nk = gen.random_increasing_naturals(rng, max(a.max_finite() or 1, 1))
        assert brute_measurable(time_change(a, nk))


class TestTimeChange:
    def test_identity(self):
        t = StoppingTime(F2, [2, INF])
        assert time_change(t, [1, 2, 3]) == t

    def test_doubling(self):
        t = StoppingTime.constant(F2, 3)
        assert time_change(t, [2, 4, 6]) == StoppingTime.constant(F2, 6)

    def test_errors(self):
        t = StoppingTime.constant(F2, 2)
        with pytest.raises(NotIncreasing):
            time_change(t, [2, 2])
        with pytest.raises(DomainViolation):
            time_change(t, [0, 2])
        with pytest.raises(DomainViolation):
            time_change(t, [1])


class TestStopped:
    X = AdaptedProcess(F2, [el(5, 5), el(7, -1), el(8, 0)])

    def test_constant_stopping(self):
        for k in (1, 2, 3):
            assert stopped_element(self.X, StoppingTime.constant(F2, k)) == self.X.at(k)

    def test_two_atoms(self):
        assert stopped_element(self.X, StoppingTime(F2, [3, 2])) == el(8, -1)

    def test_unbounded(self):
        with pytest.raises(Unbounded):
            stopped_element(self.X, StoppingTime(F2, [2, INF]))
        with pytest.raises(Unbounded):
            stopped_element(self.X, StoppingTime.constant(F2, 4))

    def test_stopped_process(self):
        assert stopped_process(self.X, StoppingTime.constant(F2, INF)) == self.X
        assert list(stopped_process(self.X, StoppingTime.constant(F2, 1)).path) == [self.X.at(1)] * 3
        assert list(stopped_process(self.X, StoppingTime(F2, [2, INF])).path) == [el(5, 5), el(7, -1), el(7, 0)]

    @settings(max_examples=500)
    @given(filtration_and_tau())
    def test_matches_pointwise_oracle(self, data):
        filt, t, rng = data
        p = gen.random_process(rng, filt)
        sp = stopped_process(p, t)
        for n in range(1, p.horizon + 1):
            expect = [p.at(int(min(t.values[a], n))).values[a] for a in filt.space.atoms]
            assert sp.at(n).values.tolist() == expect
            assert filt.stage(n).is_measurable(sp.at(n))


class TestIncreasingIdentities:
    def test_sigma_equals_tau(self):
        p = AdaptedProcess(F2, [el(1, 1), el(1, 3), el(4, 3)])
        t = StoppingTime(F2, [3, 2])
        assert increasing_process_identities(p, t, t).holds

    def test_scalar_ramp(self):
        p = AdaptedProcess(F2, [S2.constant(float(n)) for n in (1, 2, 3)])
        s, t = StoppingTime(F2, [3, 2]), StoppingTime(F2, [2, 3])
        assert stopped_element(p, s | t) == el(3, 3)
        assert increasing_process_identities(p, s, t).holds

    def test_not_increasing(self):
        p = AdaptedProcess(F2, [el(1, 1), el(0, 0), el(0, 0)])
        with pytest.raises(NotIncreasing):
            increasing_process_identities(p, StoppingTime.constant(F2, 1), StoppingTime.constant(F2, 2))

    @settings(max_examples=300)
    @given(filtrations())
    def test_random(self, data):
        filt, rng = data
        p = gen.random_process(rng, filt, increasing=True)
        fam = [gen.random_stopping_time(rng, filt, filt.horizon, allow_inf=False) for _ in range(3)]
        assert increasing_process_identities(p, fam[0], fam[1], fam).holds


class TestDebut:
    def test_stop_at_once(self):
        X, back = debut_roundtrip(StoppingTime.constant(F2, 1))
        assert list(X.path) == [S2.unit]
        assert back == StoppingTime.constant(F2, 1)

    def test_never(self):
        X, back = debut_roundtrip(StoppingTime.constant(F2, INF))
        assert list(X.path) == [S2.zero] * F2.horizon
        assert back == StoppingTime.constant(F2, INF)

    def test_not_indicator(self):
        with pytest.raises(NotIndicatorProcess):
            hitting_time(AdaptedProcess(F2, [el(0.5, 0.5)]))
        with pytest.raises(NotIndicatorProcess):
            hitting_time(AdaptedProcess(F2, [el(1, 1), el(0, 0)]))

    @settings(max_examples=500)
    @given(filtration_and_tau())
    def test_roundtrip(self, data):
        _, t, _ = data
        X, back = debut_roundtrip(t)
        assert back == t
        assert X.is_increasing()
        assert all(set(x.values.tolist()) <= {0.0, 1.0} for x in X.path)
