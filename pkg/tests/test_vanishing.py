"""Order-of-vanishing bounds: flagship values, monotonicity, sweeps."""

from fractions import Fraction as F

import pytest

from splitmoments import vanishing as vb
from splitmoments.errors import DomainError
from splitmoments.testfn import fejer


class TestFlagshipValues:
    def test_r5_bound(self):
        q = vb.VanishingQuery(r=5, n=4, sigma=F(1, 2), sign="minus")
        assert vb.vanishing_bound(q) == F(496, 65625)

    def test_r5_threshold(self):
        assert vb.vanishing_threshold(fejer(F(1, 2)), 5) == F(5, 2)

    def test_beats_prior_bounds(self):
        b = vb.vanishing_bound(vb.VanishingQuery(r=5, n=4, sigma=F(1, 2), sign="minus"))
        assert b < vb.PRIOR_BOUNDS["prior-second-moment"] < vb.PRIOR_BOUNDS["prior-one-level"]
        assert vb.PRIOR_BOUNDS["prior-second-moment"] == F(1, 49)
        assert vb.PRIOR_BOUNDS["prior-one-level"] == F(1, 32)

    def test_n2_bound_is_worse(self):
        b4 = vb.vanishing_bound(vb.VanishingQuery(r=5, n=4, sigma=F(1, 2), sign="minus"))
        b2 = vb.vanishing_bound(vb.VanishingQuery(r=5, n=2, sigma=F(1, 2), sign="minus"))
        from splitmoments import moments as mo

        tf = fejer(F(1, 2))
        expected = (F(1, 3) - mo.S_correction(tf, 2, 1)) * F(2, 5) ** 2
        assert b2 == expected
        assert b2 > b4


@pytest.mark.slow
class TestR19:
    def test_r19_three_sig_figs(self):
        q = vb.VanishingQuery(r=19, n=20, sigma=F(1, 10), sign="minus")
        b = vb.vanishing_bound(q)
        assert F(280, 100) / 10**15 <= b <= F(292, 100) / 10**15
        assert f"{float(b):.3g}" == "2.86e-15"


class TestValidation:
    def test_odd_n_rejected(self):
        with pytest.raises(DomainError):
            vb.VanishingQuery(r=5, n=3, sigma=F(1, 2), sign="minus")

    def test_nonpositive_threshold(self):
        # r = 2 with sigma = 1/2: threshold 2 - 2 - 1/2 < 0
        q = vb.VanishingQuery(r=2, n=4, sigma=F(1, 2), sign="minus")
        with pytest.raises(DomainError, match="not positive"):
            vb.vanishing_bound(q)

    def test_sigma_cap(self):
        with pytest.raises(DomainError):
            vb.VanishingQuery(r=5, n=4, sigma=F(3, 5), sign="minus")


class TestMonotonicity:
    def test_decreasing_in_r(self):
        prev = None
        for r in range(5, 12):
            b = vb.vanishing_bound(vb.VanishingQuery(r=r, n=4, sigma=F(1, 2), sign="minus"))
            if prev is not None:
                assert b < prev
            prev = b


class TestSweep:
    def test_r5_grid(self):
        rows, best = vb.bound_sweep(5, [2, 4], [F(1, 4), F(1, 3), F(1, 2)])
        assert best is not None
        assert (best.n, best.sigma) == (4, F(1, 2))
        assert best.bound == F(496, 65625)

    def test_all_entries_positive(self):
        rows, _ = vb.bound_sweep(6, [2, 4], [F(1, 4), F(1, 2)])
        for row in rows:
            if row.bound is not None:
                assert row.bound > 0

    def test_invalid_points_skipped_with_reason(self):
        rows, _ = vb.bound_sweep(5, [4], [F(3, 5)])
        assert rows[0].bound is None
        assert rows[0].skipped

    def test_positive_sign_flagged(self):
        q = vb.VanishingQuery(r=5, n=4, sigma=F(1, 2), sign="plus")
        notes = vb.assumptions_for(q)
        assert any("positive-sign" in s for s in notes)
        b = vb.vanishing_bound(q)
        assert b > 0
