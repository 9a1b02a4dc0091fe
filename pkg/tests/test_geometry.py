"""Droplet geometry: phase classification, the q-cubic, and the conformal pair."""

import cmath
import math

import pytest
from hypothesis import given, settings, strategies as st

from coulombgas import geometry
from coulombgas.errors import BranchCutError, DomainError
from coulombgas.geometry import Regime


def cubic_residual(a: float, c: float, q: float) -> float:
    # normalized by the dominant coefficient so small-a cases stay comparable
    scale = max(1.0, (a * a + 4 * c + 2) / (2 * a * a), 1 / (2 * a**4))
    return abs(q**6 - ((a * a + 4 * c + 2) / (2 * a * a)) * q**4
               + 1 / (2 * a**4)) / scale


class TestCriticalValues:
    def test_known_point(self):
        cv = geometry.critical_values(9 / 16)
        assert cv.a_cri == pytest.approx(0.5, abs=1e-15)

    def test_small_c_limit(self):
        assert geometry.critical_values(1e-12).a_cri == pytest.approx(1.0, abs=1e-5)

    def test_c_cri_at_inverts(self):
        cv = geometry.critical_values(9 / 16)
        assert cv.c_cri_at(0.5) == pytest.approx(9 / 16, abs=1e-15)
        # and the two maps are inverse along the phase boundary
        for c in (0.25, 1.0, 4.0):
            a = geometry.critical_values(c).a_cri
            assert geometry.critical_values(c).c_cri_at(a) == pytest.approx(c, rel=1e-12)


class TestClassify:
    @pytest.mark.parametrize("a,c,expected", [
        (0.25, 9 / 16, Regime.POST),
        (1.0, 9 / 16, Regime.PRE),
        (0.5, 9 / 16, Regime.AT_CRITICALITY),
    ])
    def test_regimes(self, a, c, expected):
        assert geometry.classify(a, c) is expected

    @pytest.mark.parametrize("a,c", [(-0.1, 1.0), (0.5, 0.0), (0.5, -1.0)])
    def test_domain_errors(self, a, c):
        with pytest.raises(DomainError):
            geometry.classify(a, c)

    def test_monotone_in_a(self):
        c = 1.0
        a_cri = geometry.critical_values(c).a_cri
        seq = [geometry.classify(a, c)
               for a in (0.1, 0.5 * a_cri, a_cri, 2 * a_cri, 5.0)]
        assert seq == [Regime.POST, Regime.POST, Regime.AT_CRITICALITY,
                       Regime.PRE, Regime.PRE]


class TestSolveQ:
    def test_transition_root_is_one(self):
        # at a = a_cri the cubic degenerates so that q = 1 solves it
        for c in (0.25, 9 / 16, 1.0, 4.0):
            a = geometry.critical_values(c).a_cri
            assert cubic_residual(a, c, 1.0) < 1e-14
            assert geometry.solve_q(a * (1 + 1e-7), c) == pytest.approx(1.0, abs=1e-3)

    def test_far_field(self):
        q = geometry.solve_q(100.0, 1.0)
        assert abs(100.0 * q - 1.0) < 2e-4

    def test_reference_point(self):
        a, c = 1.0, 9 / 16
        q = geometry.solve_q(a, c)
        assert 0.0 < q < 1.0
        assert abs(q**6 - ((a * a + 4 * c + 2) / (2 * a * a)) * q**4
                   + 1 / (2 * a**4)) < 1e-14
        g = geometry.pre_geometry(a, c)
        assert geometry.conformal_f(g, 1.0 / q) == pytest.approx(a, abs=1e-12)


class TestPreGeometry:
    def test_defining_formulas(self):
        g = geometry.pre_geometry(1.0, 9 / 16)
        a, q = g.a, g.q
        assert g.R == pytest.approx((1 + a * a * q * q) / (2 * a * q), abs=1e-14)
        assert g.kappa == pytest.approx(
            (1 - q * q) * (1 - a * a * q * q) / (2 * a * q), abs=1e-14)
        assert g.kappa > 0
        assert g.z_plus == pytest.approx(q + 1j * math.sqrt(g.kappa / g.R), abs=1e-14)

    def test_branch_point_image(self):
        for a, c in ((1.0, 9 / 16), (1.2, 1.0), (3.0, 0.25)):
            g = geometry.pre_geometry(a, c)
            assert abs(geometry.conformal_f(g, g.z_plus) - g.beta) < 1e-12
            assert g.beta_bar == complex(g.beta).real - 1j * complex(g.beta).imag

    def test_boundary_winding(self):
        # the curve encloses the origin; the insertion point stays outside,
        # consistent with a = f(1/q) being the image of an exterior point
        g = geometry.pre_geometry(1.2, 1.0)
        n = 2048
        pts = [geometry.conformal_f(g, cmath.exp(2j * math.pi * k / n))
               for k in range(n)]

        def winding(center: complex) -> int:
            total = sum(cmath.phase((pts[(k + 1) % n] - center)
                                    / (pts[k] - center)) for k in range(n))
            return round(total / (2 * math.pi))

        assert winding(0j) == 1
        assert winding(g.a + 0j) == 0


class TestConformalPair:
    def test_round_trip_on_circle(self):
        g = geometry.pre_geometry(1.2, 1.0)
        for k in range(8):
            w = 2.0 * cmath.exp(2j * math.pi * k / 8)
            z = geometry.conformal_f(g, w)
            assert abs(geometry.inverse_F(g, z) - w) < 1e-12
            assert abs(geometry.conformal_f(g, geometry.inverse_F(g, z)) - z) < 1e-12

    def test_far_field_expansion(self):
        g = geometry.pre_geometry(1.2, 1.0)
        z = 1e4 + 0j
        model = z / g.R + g.kappa / (g.R * g.q) + g.kappa / z
        assert abs(geometry.inverse_F(g, z) - model) < 1e-6  # O(z^-2) leftover

    def test_insertion_point_preimage(self):
        for a, c in ((1.0, 9 / 16), (1.2, 1.0), (2.0, 1.0)):
            g = geometry.pre_geometry(a, c)
            assert geometry.inverse_F(g, a + 0j) == pytest.approx(1 / g.q, abs=1e-12)

    def test_cut_rejection(self):
        g = geometry.pre_geometry(1.2, 1.0)
        with pytest.raises(BranchCutError):
            geometry.inverse_F(g, complex((g.beta + g.beta_bar) / 2))


class TestDropletBoundary:
    def test_post_two_components(self):
        boundary = geometry.droplet_boundary(
            geometry.ModelParams.resolve(0.25, 9 / 16), 64)
        assert boundary.chi == 0
        assert [comp.label for comp in boundary.components] == ["outer", "inner"]
        assert all(comp.closed for comp in boundary.components)
        assert all(len(comp.points) == 64 for comp in boundary.components)

    def test_pre_single_component(self):
        boundary = geometry.droplet_boundary(
            geometry.ModelParams.resolve(1.0, 9 / 16), 64)
        assert boundary.chi == 1
        assert len(boundary.components) == 1

    def test_post_strict_separation(self):
        boundary = geometry.droplet_boundary(
            geometry.ModelParams.resolve(0.25, 9 / 16), 128)
        outer, inner = boundary.components
        gap = min(abs(p - q) for p in outer.points for q in inner.points)
        assert gap > 0

    def test_preconditions(self):
        with pytest.raises(DomainError):
            geometry.droplet_boundary(geometry.ModelParams.resolve(0.25, 9 / 16), 4)
        with pytest.raises(DomainError):
            geometry.droplet_boundary(geometry.ModelParams.resolve(0.5, 9 / 16), 64)


@st.composite
def pre_critical_params(draw):
    c = draw(st.floats(0.1, 4.0))
    factor = draw(st.floats(1.02, 4.0))
    return geometry.critical_values(c).a_cri * factor, c


@settings(derandomize=True, max_examples=40, deadline=None)
@given(pre_critical_params())
def test_pre_invariants_property(params):
    a, c = params
    g = geometry.pre_geometry(a, c)
    assert 0.0 < g.q < 1.0
    assert g.kappa > 0.0
    assert cubic_residual(a, c, g.q) < 1e-14
    assert abs(geometry.conformal_f(g, 1.0 / g.q) - a) < 1e-12
    w = 1.7 + 0.9j
    assert abs(geometry.inverse_F(g, geometry.conformal_f(g, w)) - w) < 1e-12


@settings(derandomize=True, max_examples=40, deadline=None)
@given(st.floats(0.01, 0.99), st.floats(0.05, 4.0))
def test_post_existence_property(a, c):
    # the annular phase exists exactly when the inner disk fits, a in (0,1)
    fits = (1 - a * a) ** 2 - 4 * a * a * c > 0
    regime = geometry.classify(a, c)
    if fits and abs(a - geometry.critical_values(c).a_cri) > 1e-9:
        assert regime is Regime.POST
        post = geometry.post_geometry(a, c)
        assert post.inner_center + post.inner_radius < post.outer_radius
    elif not fits:
        assert regime is not Regime.POST
