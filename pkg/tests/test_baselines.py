import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate, stats

from bhchaos.baselines import (
    EULER_GAMMA, GoeBaseline, digamma, goe_d1_stats, goe_d2_stats, goe_dinf_cdf, goe_dinf_moment, goe_dinf_pdf,
    goe_dinf_stats, harmonic_number, harmonic_real, trigamma,
)
from bhchaos.chaos import gfd_columns, moment_stats
from bhchaos.egoe import sample_goe

# Frozen from a 30-digit mpmath evaluation (h_63 as an exact rational sum; the Erf-power integral
# by mpmath.quad in the exponential variable)
D1_MEAN_126 = 0.85076931907371971897
D2_TILDE_126 = 0.77609577925068733923
DINF_MOMENTS = {
    10: (0.48493574454133233852, 0.29177396988675951907),
    126: (0.57475085577353868365, 0.33347856400273265729),
    1024: (0.64467401943831304900, 0.41635021398173932394),
}


class TestHarmonic:
    @pytest.mark.parametrize("n,expected", [(1, 1.0), (3, 11 / 6)])
    def test_small(self, n, expected):
        assert harmonic_number(n) == pytest.approx(expected, rel=1e-15)

    def test_exact_rational_oracle(self):
        exact = sum(Fraction(1, k) for k in range(1, 64))
        assert harmonic_number(63) == pytest.approx(float(exact), rel=1e-12)

    @pytest.mark.parametrize("n", [10_001, 250_000, 2_000_000, 10**9])
    def test_large(self, n):
        assert harmonic_number(n) == pytest.approx(float(mpmath.harmonic(n)), rel=1e-12)

    @pytest.mark.parametrize("n", [0, -3, 2.5])
    def test_invalid(self, n):
        with pytest.raises(ValueError):
            harmonic_number(n)

    def test_real_continuation(self):
        assert harmonic_real(40) == harmonic_number(40)
        assert harmonic_real(0.5) == pytest.approx(2 - 2 * math.log(2), rel=1e-12)
        assert EULER_GAMMA == pytest.approx(float(mpmath.euler), rel=1e-16)


class TestPolygamma:
    def test_identities(self):
        assert trigamma(1) == pytest.approx(math.pi**2 / 6, rel=1e-12)
        assert trigamma(2) == pytest.approx(math.pi**2 / 6 - 1, rel=1e-12)

    def test_central_difference_of_digamma(self):
        h = 1e-4
        x = 34.5
        with mpmath.workdps(40):
            oracle = (mpmath.digamma(x + h) - mpmath.digamma(x - h)) / (2 * h)
        assert trigamma(x) == pytest.approx(float(oracle), rel=1e-8)

    @pytest.mark.parametrize("x", [0.01, 0.7, 3.3, 9.99, 10.0, 57.0, 1e6])
    def test_against_mpmath(self, x):
        assert trigamma(x) == pytest.approx(float(mpmath.psi(1, x)), rel=1e-10)
        assert digamma(x) == pytest.approx(float(mpmath.digamma(x)), rel=1e-10, abs=1e-14)

    @pytest.mark.parametrize("x", [0.0, -1.5])
    def test_domain(self, x):
        with pytest.raises(ValueError):
            trigamma(x)

    @pytest.mark.property
    @given(st.floats(0.05, 500.0))
    def test_recurrence(self, x):
        assert trigamma(x + 1) == pytest.approx(trigamma(x) - 1 / x**2, rel=1e-10, abs=1e-13)


class TestD1D2:
    def test_d1_mean_at_126(self):
        assert goe_d1_stats(126)[0] == pytest.approx(D1_MEAN_126, rel=1e-12)

    def test_d1_asymptote(self):
        # (1 - <D1>) ln N -> 2 - ln 2 - gamma: the 1/ln N decay
        limit = 2 - math.log(2) - EULER_GAMMA
        gaps = [abs((1 - goe_d1_stats(2**p)[0]) * p * math.log(2) - limit) for p in (10, 20, 40)]
        assert gaps[0] > gaps[1] > gaps[2] and gaps[2] < 1e-6

    def test_odd_dimension_uses_continuation(self):
        lo, mid, hi = (goe_d1_stats(n)[0] for n in (846, 847, 848))
        assert lo < mid < hi

    def test_d2_at_126(self):
        assert goe_d2_stats(126)[0] == pytest.approx(D2_TILDE_126, rel=1e-14)

    @pytest.mark.parametrize("fn", [goe_d1_stats, goe_d2_stats, goe_dinf_stats])
    def test_dimension_one(self, fn):
        with pytest.raises(ValueError):
            fn(1)

    def test_var_d2_scaling(self):
        scaled = [goe_d2_stats(2**p)[1] * 2**p * (p * math.log(2)) ** 2 for p in range(8, 15)]
        assert max(scaled) / min(scaled) < 1.1 and max(scaled) < 3

    @pytest.mark.parametrize("dim", [
        pytest.param(2, marks=pytest.mark.xfail(strict=False, reason="the asymptotic D-infinity mean is 1.37 at dim 2")),
        3, 126, 1024, 10**6,
    ])
    def test_ranges(self, dim):
        b = GoeBaseline.compute(dim)
        for mean in (b.mean_d1, b.d2_tilde, b.dinf_moments[1]):
            assert 0 < mean <= 1
        assert b.var_d1 > 0 and b.var_d2 > 0


class TestDinf:
    @pytest.mark.parametrize("dim", sorted(DINF_MOMENTS))
    def test_moments_against_oracle(self, dim):
        m1, m2 = DINF_MOMENTS[dim]
        assert goe_dinf_moment(dim, 1) == pytest.approx(m1, rel=1e-8)
        assert goe_dinf_moment(dim, 2) == pytest.approx(m2, rel=1e-8)

    def test_invalid_order(self):
        with pytest.raises(ValueError):
            goe_dinf_moment(100, 0)

    @pytest.mark.xfail(strict=False, reason="the Erf-power formula is asymptotic: about 0.046 high at dim 10")
    def test_small_dimension_monte_carlo(self):
        means = np.array([gfd_columns(np.linalg.eigh(sample_goe(10, 0, r).matrix)[1], math.inf).mean()
                          for r in range(5000)])
        se = means.std(ddof=1) / math.sqrt(means.size)
        assert abs(means.mean() - goe_dinf_moment(10, 1)) < 3 * se

    def test_mean_trend(self):
        ratios = [(1 - goe_dinf_moment(2**p, 1)) * p * math.log(2) / math.log(p * math.log(2)) for p in range(8, 15)]
        assert np.all(np.diff(ratios) < 0)
        assert 1.2 < min(ratios) and max(ratios) < 1.35

    def test_variance_slope(self):
        p = np.arange(8, 15)
        var = np.array([goe_dinf_stats(2**k)[1] for k in p])
        slope = np.polyfit(np.log(p * math.log(2)), np.log(var), 1)[0]
        assert abs(slope + 4) < 0.3

    @pytest.mark.parametrize("dim", [126, 1024])
    def test_pdf_normalization(self, dim):
        total, _ = integrate.quad(goe_dinf_pdf, 0, 1.5, args=(dim,), limit=400, points=[0.5, 0.6, 0.7])
        assert total == pytest.approx(1.0, abs=1e-3)

    def test_cdf_is_the_pdf_integral(self):
        x = np.linspace(0.3, 1.2, 7)
        num = [integrate.quad(goe_dinf_pdf, 0, v, args=(512,), limit=400)[0] for v in x]
        assert np.allclose(goe_dinf_cdf(x, 512), num, atol=1e-9)

    def test_mode_matches_first_moment(self):
        x = np.linspace(0.3, 1.0, 70001)
        mode = x[np.argmax(goe_dinf_pdf(x, 1024))]
        assert abs(mode - goe_dinf_moment(1024, 1)) < 0.05 * goe_dinf_moment(1024, 1)

    def test_ks_against_sampled_goe(self):
        x = np.concatenate([gfd_columns(np.linalg.eigh(sample_goe(512, 0, r).matrix)[1], math.inf) for r in range(20)])
        assert stats.kstest(x, lambda v: goe_dinf_cdf(v, 512)).statistic < 0.05


class TestGaussianity:
    @pytest.mark.xfail(strict=False, reason="sampled skew decays like dim^-1/2 and is still about -0.1 to -0.26 at "
                                            "dim 1024; see decisions ledger")
    @pytest.mark.parametrize("q", ["d1", "r2"])
    def test_skew_below_tenth(self, goe1024, q):
        x = goe1024[q].ravel()
        if q == "r2":
            x = -np.log(x) / math.log(1024)
        assert abs(moment_stats(x).skew) < 0.1


class TestTable:
    def test_rows(self):
        b = GoeBaseline.compute(126, dinf_orders=(1, 2, 3))
        rows = b.rows()
        assert [r[1] for r in rows] == ["mean_d1", "var_d1", "d2_tilde", "var_d2",
                                        "dinf_moment_1", "dinf_moment_2", "dinf_moment_3"]
        assert all(r[0] == 126 for r in rows)
        assert rows[0][2] == pytest.approx(D1_MEAN_126, rel=1e-12)
