"""Exact finite-N oracles: moments, determinants, polynomials, dualities."""

import json
import pathlib
from fractions import Fraction

import pytest
from mpmath import mp

from coulombgas import exactfiniten, geometry, opasymp
from coulombgas.errors import DomainError

FIXTURES = pathlib.Path(__file__).parent / "fixtures"


class TestCalibration:
    def test_frozen_rational_values(self):
        """Pinned logZ values from the one-time normalization calibration."""
        entries = json.loads(
            (FIXTURES / "exact_logz_calibration.json").read_text())["entries"]
        assert len(entries) == 5
        for entry in entries:
            ctx = exactfiniten.ExactContext(
                N=entry["N"], m=entry["m"], a=Fraction(entry["a"]))
            got = exactfiniten.exact_logZ(ctx)
            with mp.workprec(256):
                want = mp.log(mp.mpf(Fraction(entry["Z"]).numerator)
                              / Fraction(entry["Z"]).denominator)
                assert abs(got - want) < mp.mpf(10) ** -60


class TestContourMoment:
    def test_pure_gaussian(self):
        ctx = exactfiniten.ExactContext(N=1, m=0, a=0.7)
        assert exactfiniten.contour_moment(ctx, 0) == 1
        with pytest.warns(UserWarning):
            assert exactfiniten.contour_moment(ctx, 1) == 0

    def test_against_contour_quadrature(self):
        # independent oracle: adaptive quadrature of z^k omega(z) on |z|=2
        ctx = exactfiniten.ExactContext(N=2, m=2, a=0.5)
        with mp.workprec(256):
            for k in range(3):
                closed = exactfiniten.contour_moment(ctx, k)

                def integrand(theta, k=k):
                    z = 2 * mp.e ** (1j * theta)
                    omega = ((z - mp.mpf(1) / 2) ** 2
                             * mp.e ** (-z) / z ** 4)
                    return z ** (k + 1) * omega / (2 * mp.pi)

                quad = mp.quad(integrand, [0, 2 * mp.pi], maxdegree=10)
                assert abs(closed - quad.real) + abs(quad.imag) < mp.mpf(10) ** -20

    def test_origin_weight_is_kronecker(self):
        ctx = exactfiniten.ExactContext(N=3, m=2, a=0.0)
        for k in range(5):
            assert exactfiniten.contour_moment(ctx, k) == (1 if k == 2 else 0)


class TestExactLogZ:
    def test_precision_doubling_stable(self):
        lz256 = exactfiniten.exact_logZ(
            exactfiniten.ExactContext(N=6, m=6, a=0.8))
        lz512 = exactfiniten.exact_logZ(
            exactfiniten.ExactContext(N=6, m=6, a=0.8, precision_bits=512))
        assert float(abs(lz256 - lz512) / abs(lz512)) < 2.0 ** -128

    def test_even_in_a(self):
        plus = exactfiniten.exact_logZ(exactfiniten.ExactContext(N=4, m=4, a=0.4))
        minus = exactfiniten.exact_logZ(exactfiniten.ExactContext(N=4, m=4, a=-0.4))
        assert abs(plus - minus) < mp.mpf(10) ** -70

    def test_moment_index_cap(self):
        with pytest.raises(DomainError):
            exactfiniten.ExactContext(N=100, m=50, a=0.1)


class TestOrthogonalPolynomial:
    def test_radial_case_is_monomial(self):
        ctx = exactfiniten.ExactContext(N=4, m=4, a=0.0)
        coeffs = exactfiniten.exact_op(ctx)
        assert coeffs[-1] == 1
        assert all(c == 0 for c in coeffs[:-1])
        assert exactfiniten.exact_A11(ctx) == 0

    def test_contour_orthogonality(self):
        ctx = exactfiniten.ExactContext(N=4, m=4, a=0.7)
        coeffs = exactfiniten.exact_op(ctx)
        with mp.workprec(256):
            nu = [exactfiniten.contour_moment(ctx, k) for k in range(8)]
            worst = max(abs(sum(coeffs[j] * nu[i + j]
                                for j in range(len(coeffs))))
                        for i in range(4))
        assert float(worst) < 1e-70

    def test_a11_post_superpolynomial(self):
        # A11 - caN decays exponentially (measured ~e^(-1.04 N) at a=0.2):
        # 2.2e-4, 2.9e-6, 7.5e-10 at N = 4, 8, 16
        err = {}
        for n in (4, 8, 16):
            a11 = exactfiniten.exact_A11(
                exactfiniten.ExactContext(N=n, m=n, a=0.2))
            err[n] = abs(float(a11) - 0.2 * n)
        assert err[4] / err[8] > 30      # faster than any N^-4 ratio of 16
        assert err[8] / err[16] > 1000
        assert err[16] < 1e-8

    def test_a11_pre_correction_pattern(self):
        # remainder after the N and 1/N terms is O(N^-3): N^2 x diff shrinks
        scaled = []
        for n in (4, 8, 16):
            a11 = float(exactfiniten.exact_A11(
                exactfiniten.ExactContext(N=n, m=n, a=1.2)))
            asymp = opasymp.a11_asymp(n, 1.2, 1.0, geometry.Regime.PRE)
            scaled.append(abs(n * n * (a11 - asymp)))
        assert all(s < 0.01 for s in scaled)
        assert scaled[0] > scaled[1] > scaled[2]

    def test_polynomial_evaluation(self):
        ctx = exactfiniten.ExactContext(N=3, m=3, a=0.5)
        coeffs = exactfiniten.exact_op(ctx)
        z = 2.0 + 1.0j
        direct = sum(complex(c) * z ** k for k, c in enumerate(coeffs))
        assert abs(complex(exactfiniten.eval_polynomial(coeffs, z)) - direct) < 1e-12


class TestLUEGap:
    def test_no_wall(self):
        assert exactfiniten.lue_gap_probability(3, 2, Fraction(0), 3) == 1

    def test_single_exponential(self):
        with mp.workprec(256):
            got = exactfiniten.lue_gap_probability(1, 0, Fraction(7, 10), 1)
            assert abs(got - mp.e ** (-mp.mpf(7) / 10)) < mp.mpf(10) ** -70

    def test_monotone_survival(self):
        vals = [exactfiniten.lue_gap_probability(3, 2, Fraction(k, 5), 3)
                for k in range(11)]
        assert all(a >= b for a, b in zip(vals, vals[1:]))
        assert vals[-1] < vals[0]


class TestDuality:
    def test_exact_at_origin(self):
        assert exactfiniten.duality_residual(2, 2, 0.0) == 0

    @pytest.mark.parametrize("n,m,x,bound", [
        (2, 2, 0.5, 1e-30),
        (4, 4, 1.0, 1e-25),
    ])
    def test_residuals(self, n, m, x, bound):
        assert float(exactfiniten.duality_residual(n, m, x)) < bound


class TestCharpolyMoment:
    def test_empty_insertion(self):
        assert exactfiniten.exact_charpoly_moment(4, 0, 1.3) == 1

    def test_origin_product_form(self):
        with mp.workprec(256):
            got = exactfiniten.exact_charpoly_moment(3, 3, 0.0)
            want = mp.mpf(1)
            for k in range(3):
                want *= mp.factorial(3 + k) / (mp.factorial(k) * mp.mpf(3) ** 3)
            assert abs(got - want) < mp.mpf(10) ** -70
