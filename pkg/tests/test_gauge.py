"""Tests for certified gauge bounds and pairing witnesses."""

from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trigauge.core import (
    DEFAULT_P,
    TriVector,
    l2_norm_sq,
    lorentz_l2_constant,
    row_norm_sq,
    row_pairing,
)
from trigauge.decompose import make_disjoint_rep
from trigauge.gauge import (
    GaugeCertificate,
    GaugeLowerWitness,
    element_smallness_sq,
    gauge_interval,
    gauge_lower,
    gauge_upper,
    gauge_upper_from_average,
    pairing_witness,
)
from trigauge.generators import GridSeq, HullCertificate

P = DEFAULT_P
C_HI = lorentz_l2_constant(P).hi


def full_row(i):
    return GridSeq.make(0 if r != i else i for r in range(1, i + 1)).indicator()


class TestGaugeUpper:
    def test_zero(self):
        cert = gauge_upper(TriVector(), P)
        assert cert.scale == 0
        cert.validate(TriVector())

    def test_generator_indicator_is_unit(self):
        # any generator's indicator lies in U, so the bound is exactly 1
        x = GridSeq.make((0, 2)).indicator()
        cert = gauge_upper(x, P)
        assert cert.scale == 1
        cert.validate(x)

    def test_single_cell(self):
        cert = gauge_upper(TriVector({(1, 1): 1}), P)
        assert cert.scale == 1

    def test_scaled_cell_exact(self):
        x = TriVector({(2, 1): F(1, 2)})
        assert gauge_upper(x, P).scale == F(1, 2)

    def test_row_split_beats_single_hull(self):
        # three half cells on separate rows: pieces e_{i,1}/2 give scale 1/2,
        # while one hull piece would cost more than the generator budget allows
        x = TriVector({(1, 1): F(1, 2), (2, 1): F(1, 2), (3, 1): F(1, 2)})
        cert = gauge_upper(x, P)
        assert cert.scale == F(1, 2)
        cert.validate(x)

    def test_negative_entries_use_modulus(self):
        x = TriVector({(2, 1): F(-1, 2), (2, 2): F(1, 2)})
        cert = gauge_upper(x, P)
        assert cert.scale == F(1, 2)
        cert.validate(x)

    def test_rescaling_is_exact(self):
        x = TriVector({(2, 1): F(1, 3), (3, 2): F(2, 3)})
        cert = gauge_upper(x, P)
        for c in (F(1, 7), F(3), F(5, 2)):
            scaled = cert.rescale(c)
            assert scaled.scale == c * cert.scale
            scaled.validate(x.scale(c))

    def test_solidity_certificate_transfers(self):
        y = TriVector({(2, 1): F(3, 4), (2, 2): F(1, 2)})
        x = TriVector({(2, 1): F(1, 4)})
        cert = gauge_upper(y, P)
        cert.validate(x)  # |x| <= |y| pointwise, same certificate works

    def test_large_support_fallback(self):
        # 8 active rows: partition search is skipped, row split still certifies
        x = TriVector({(i, 1): F(1, 10) for i in range(1, 9)})
        cert = gauge_upper(x, P)
        cert.validate(x)
        assert cert.scale >= F(1, 10)


class TestGaugeUpperFromAverage:
    SEQS = [
        GridSeq.make((1,)),
        GridSeq.make((0, 2)),
        GridSeq.make((0, 0, 3)),
        GridSeq.make((0, 0, 0, 4)),
    ]

    def test_four_rows_matches_decomposition_scale(self):
        cert, dec = gauge_upper_from_average(self.SEQS, F(1, 4), P)
        assert cert.scale == dec.scale
        assert cert.scale**4 <= 625 * F(1, 4)
        cert.validate(dec.average())

    def test_zero_average(self):
        cert, dec = gauge_upper_from_average([GridSeq.make(())] * 4, F(1, 2), P)
        assert cert.scale == 0


class TestGaugeLower:
    def test_zero(self):
        assert gauge_lower(TriVector(), P).value == 0

    def test_single_cell_sup(self):
        w = gauge_lower(TriVector({(1, 1): 1}), P)
        assert w.value == 1 and w.kind == "sup"

    def test_unit_generator_reaches_inverse_constant(self):
        # the pairing route alone already reaches the 1/C_hi floor
        x = GridSeq.make((0, 2)).indicator()
        w = gauge_lower(x, P, directions=[(F(0), F(1))])
        assert w.value >= 1 / C_HI
        w.validate(x)

    def test_seminorm_route_beats_sup(self):
        # all ones on rows 1..4: row seminorm 2 > C, so that route wins
        x = TriVector({(i, j): 1 for i in range(1, 5) for j in range(1, i + 1)})
        w = gauge_lower(x, P)
        assert w.kind == "seminorm"
        assert w.value == 2 / C_HI  # sqrt(4) encloses exactly
        w.validate(x)

    def test_parallel_pairing_matches_seminorm(self):
        x = TriVector({(i, j): 1 for i in range(1, 5) for j in range(1, i + 1)})
        b = (F(1, 2), F(1, 2), F(1, 2), F(1, 2))
        w = gauge_lower(x, P, directions=[b])
        assert w.value == 2 / C_HI

    def test_non_unit_direction_rejected(self):
        with pytest.raises(ValueError):
            gauge_lower(TriVector({(1, 1): 1}), P, directions=[(F(1, 2),)])

    def test_rescaling_is_exact(self):
        x = TriVector({(i, j): 1 for i in range(1, 5) for j in range(1, i + 1)})
        w = gauge_lower(x, P)
        scaled = w.rescale(F(2, 3))
        assert scaled.value == F(2, 3) * w.value
        scaled.validate(x.scale(F(2, 3)))

    def test_tampered_witness_caught(self):
        x = TriVector({(1, 1): F(1, 2)})
        w = gauge_lower(x, P)
        bad = GaugeLowerWitness(w.value * 2, w.kind, w.detail, w.ceiling)
        with pytest.raises(AssertionError):
            bad.validate(x)


class TestGaugeInterval:
    def test_ordering_on_samples(self):
        samples = [
            TriVector(),
            TriVector({(1, 1): F(3, 7)}),
            GridSeq.make((0, 1, 2)).indicator(),
            TriVector({(2, 2): F(1, 3), (5, 1): F(4, 5)}),
        ]
        for x in samples:
            iv = gauge_interval(x, P)
            assert iv.lo <= iv.hi
            iv.upper.validate(x)
            iv.lower.validate(x)

    def test_indicator_interval_is_point(self):
        iv = gauge_interval(GridSeq.make((0, 1)).indicator(), P)
        assert iv.lo == iv.hi == 1

    @settings(max_examples=40, deadline=None)
    @given(
        st.dictionaries(
            st.tuples(st.integers(1, 4), st.integers(1, 4)).filter(
                lambda ij: ij[0] >= ij[1]
            ),
            st.fractions(min_value=F(-2), max_value=F(2), max_denominator=16),
            max_size=5,
        )
    )
    def test_sound_on_random_vectors(self, entries):
        x = TriVector(entries)
        iv = gauge_interval(x, P)
        assert iv.lo <= iv.hi
        iv.upper.validate(x)
        iv.lower.validate(x)


class TestSmallness:
    def element(self):
        return TriVector(
            {(1, 1): F(3, 10), (2, 1): F(2, 5), (2, 2): F(2, 5)}
        )

    def rep_split(self):
        x = self.element()
        return make_disjoint_rep(
            [x.restrict_rows([1]), x.restrict_rows([2])], P
        )

    def rep_merged(self):
        x = self.element()
        cert = HullCertificate(
            (GridSeq.make((1,)), GridSeq.make((0, 2))),
            (F(3, 10), F(2, 5)),
            F(1),
        )
        return make_disjoint_rep([x], P, certs=[cert])

    def test_single_rep_takes_max(self):
        assert element_smallness_sq([self.rep_split()]) == F(16, 100)

    def test_min_over_reps(self):
        reps = [self.rep_split(), self.rep_merged()]
        assert element_smallness_sq(reps) == F(16, 100)
        assert element_smallness_sq([self.rep_merged()]) == F(1, 4)

    def test_empty_rep_is_zero(self):
        assert element_smallness_sq([make_disjoint_rep([], P)]) == 0

    def test_disagreeing_reps_rejected(self):
        other = make_disjoint_rep([TriVector({(1, 1): 1})], P)
        with pytest.raises(ValueError):
            element_smallness_sq([self.rep_split(), other])

    def test_no_reps_rejected(self):
        with pytest.raises(ValueError):
            element_smallness_sq([])


class TestRepExamples:
    def test_single_generator_piece_accepted(self):
        rep = make_disjoint_rep([GridSeq.make((0, 1)).indicator()], P)
        assert rep.is_unit_member()

    def test_two_full_norm_pieces_rejected(self):
        # two pieces of squared seminorm 1 violate the rank-2 budget at p = 3/2
        with pytest.raises(ValueError):
            make_disjoint_rep([full_row(1), full_row(2)], P)


class TestPairingWitness:
    def test_basis_head(self):
        w = pairing_witness((F(1),), P)
        assert w.branch == 1
        assert w.vector == TriVector({(1, 1): 1})
        assert w.pairing == 1

    def test_basis_tail(self):
        w = pairing_witness((0, 0, 0, 0, F(1)), P)
        assert w.branch == 2
        assert w.vector == full_row(5)
        assert w.pairing == 1

    def test_three_four_five(self):
        w = pairing_witness((F(3, 5), F(4, 5)), P)
        assert w.branch == 1
        assert w.pairing == F(4, 5)
        assert w.vector == TriVector({(2, 1): 1, (2, 2): 1})

    def test_branch_one_sign(self):
        w = pairing_witness((F(-4, 5), F(3, 5)), P)
        assert w.branch == 1
        assert w.vector == TriVector({(1, 1): -1})
        assert w.pairing == F(4, 5)

    def test_branch_one_tie_takes_first(self):
        b = (F(1, 2), F(1, 2), F(1, 2), F(1, 2))
        w = pairing_witness(b, P)
        assert w.vector == TriVector({(1, 1): 1})
        assert w.pairing == F(1, 2)

    def test_branch_two_frozen(self):
        # m_5 = floor(5/3) = 1, m_6 = floor(4) = 4, m_7 = floor(14/3) = 4
        # pairing = (1/3)/5 + 4(2/3)/6 + 4(2/3)/7 = 281/315
        b = (0, 0, 0, 0, F(1, 3), F(2, 3), F(2, 3))
        w = pairing_witness(b, P)
        assert w.branch == 2
        assert w.pairing == F(281, 315)
        assert w.pairing >= F(2, 9)

    def test_branch_two_signs(self):
        b = (0, 0, 0, 0, F(-1, 3), F(2, 3), F(-2, 3))
        w = pairing_witness(b, P)
        assert w.pairing == F(281, 315)
        assert w.vector.entry(5, 1) == -1 and w.vector.entry(7, 1) == -1

    def test_certificate_validates(self):
        for b in [(F(3, 5), F(4, 5)), (0, 0, 0, 0, F(1, 3), F(2, 3), F(2, 3))]:
            w = pairing_witness(b, P)
            w.validate(b)
            w.certificate.validate(w.vector)

    def test_non_unit_rejected(self):
        with pytest.raises(ValueError):
            pairing_witness((F(1, 2), F(1, 2)), P)

    def test_pairing_bounded_by_constant(self):
        # the same functional is bounded by C on the body: check on the witness
        for b in [(F(3, 5), F(4, 5)), (0, 0, 0, 0, F(1, 3), F(2, 3), F(2, 3))]:
            w = pairing_witness(b, P)
            assert row_pairing(w.vector, b) <= C_HI

    def test_body_elements_have_small_seminorm(self):
        # certified combinations keep the row seminorm at most C
        reps = [
            make_disjoint_rep([GridSeq.make((0, 2)).indicator()], P),
            make_disjoint_rep(
                [full_row(1).scale(F(1, 2)), full_row(3).scale(F(1, 3))], P
            ),
        ]
        cert = GaugeCertificate((F(1, 2), F(1, 2)), tuple(reps), F(1))
        v = cert.combination()
        assert row_norm_sq(v) <= C_HI**2


UNIT_TUPLES = [
    (F(3, 5), F(4, 5)),
    (F(1, 3), F(2, 3), F(2, 3)),
    (F(2, 7), F(3, 7), F(6, 7)),
    (F(1, 9), F(4, 9), F(8, 9)),
]


class TestUnitDirections:
    @settings(max_examples=30, deadline=None)
    @given(st.sampled_from(UNIT_TUPLES), st.permutations(range(7)))
    def test_embedded_units_stay_above_floor(self, base, perm):
        # scatter a unit tuple into 7 slots, preserving exact unit norm
        slots = [F(0)] * 7
        for v, pos in zip(base, perm):
            slots[pos] = v
        assert l2_norm_sq(slots) == 1
        w = pairing_witness(slots, P)
        assert w.pairing >= F(2, 9)
        w.validate(tuple(slots))
