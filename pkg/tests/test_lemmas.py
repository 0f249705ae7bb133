"""Lemma-lab tests: midchords, iterated bisection, excess splitting, comparisons."""

import math

import numpy as np
import pytest

from curvchain.errors import DomainError
from curvchain.kernel import (
    FLAT,
    UNIT_SPHERE,
    Curvature,
    Triangle,
    solve_sas,
    solve_sss,
)
from curvchain.lemmas import (
    compare_angles_two_spheres,
    iterated_midchord,
    legendre_order_fit,
    legendre_planar_angles,
    midchord_length,
    thin_triangle_check,
)

PI = math.pi

# arccos(cos 1 / (1 + cos 1)), mpmath at 50 digits.
EQUILATERAL_ANGLE = 1.2123958497745860
# Apex angles of (0.05, 1, 1) on kappa=1 and kappa=0.25, mpmath at 50 digits.
THIN_APEX_K1 = 0.05942230807217684
THIN_APEX_K025 = 0.05215029253354664


def spherical_triangles(rng, count, max_side=1.5):
    out = []
    while len(out) < count:
        x, y, z = rng.uniform(0.05, max_side / 2.0, size=3)
        sides = (y + z, x + z, x + y)
        if max(sides) <= max_side:
            out.append(sides)
    return out


class TestMidchord:
    def test_planar_345(self):
        tri = Triangle((5.0, 3.0, 4.0), FLAT)
        assert midchord_length(tri) == pytest.approx(2.5, abs=1e-12)

    def test_octant(self):
        tri = Triangle((PI / 2, PI / 2, PI / 2), UNIT_SPHERE)
        assert midchord_length(tri) == pytest.approx(PI / 3, abs=1e-12)

    def test_flat_limit(self):
        tri = Triangle((1.0, 1.0, 1.0), Curvature(1e-10))
        assert midchord_length(tri) == pytest.approx(0.5, abs=1e-6)

    def test_matches_sas_closed_form(self):
        # Independent route: half the adjacent sides around the same apex angle.
        rng = np.random.default_rng(21)
        for sides in spherical_triangles(rng, 30):
            tri = Triangle(sides, UNIT_SPHERE)
            alpha = solve_sss(tri).alpha
            direct = solve_sas(sides[1] / 2, sides[2] / 2, alpha, UNIT_SPHERE)
            assert midchord_length(tri) == pytest.approx(direct, abs=1e-12)

    def test_strictly_longer_on_sphere(self):
        rng = np.random.default_rng(4)
        for sides in spherical_triangles(rng, 200):
            tri = Triangle(sides, UNIT_SPHERE)
            assert midchord_length(tri) > sides[0] / 2 + 1e-9

    def test_exactly_half_in_plane(self):
        rng = np.random.default_rng(5)
        for sides in spherical_triangles(rng, 50):
            tri = Triangle(sides, FLAT)
            assert abs(midchord_length(tri) - sides[0] / 2) < 1e-12


class TestIteratedMidchord:
    def test_converges_to_sss_angle(self):
        tri = Triangle((1.0, 1.0, 1.0), UNIT_SPHERE)
        seq = iterated_midchord(tri, 20)
        assert not seq.truncated
        assert seq.angle_estimates[-1] == pytest.approx(EQUILATERAL_ANGLE, abs=1e-6)

    def test_first_chord_is_midchord(self):
        tri = Triangle((0.9, 1.1, 1.2), UNIT_SPHERE)
        seq = iterated_midchord(tri, 1)
        assert float(seq.chords[0]) == pytest.approx(midchord_length(tri), abs=1e-10)

    def test_octant_first_step(self):
        tri = Triangle((PI / 2, PI / 2, PI / 2), UNIT_SPHERE)
        seq = iterated_midchord(tri, 3)
        assert float(seq.scaled_chords[0]) == pytest.approx(2 * PI / 3, abs=1e-10)
        assert float(seq.scaled_chords[0]) > PI / 2

    def test_scaled_chords_strictly_increase(self):
        tri = Triangle((0.8, 1.0, 1.3), UNIT_SPHERE)
        seq = iterated_midchord(tri, 25)
        assert not seq.truncated
        prev = tri.sides[0]
        for scaled in seq.scaled_chords:
            assert scaled > prev
            prev = scaled
        first_gain = seq.scaled_chords[0] - tri.sides[0]
        assert first_gain > 0
        for scaled in seq.scaled_chords[1:]:
            assert scaled - tri.sides[0] >= first_gain

    def test_planar_sequence_constant(self):
        tri = Triangle((1.0, 1.2, 0.9), FLAT)
        seq = iterated_midchord(tri, 10)
        alpha = solve_sss(tri).alpha
        for est, scaled in zip(seq.angle_estimates, seq.scaled_chords):
            assert est == pytest.approx(alpha, abs=1e-12)
            assert float(scaled) == pytest.approx(tri.sides[0], abs=1e-12)

    def test_truncates_when_signal_exhausted(self):
        tri = Triangle((1.0, 1.0, 1.0), UNIT_SPHERE)
        seq = iterated_midchord(tri, 150)
        assert seq.truncated
        assert len(seq) < 150

    def test_rejects_zero_iters(self):
        with pytest.raises(DomainError):
            iterated_midchord(Triangle((1.0, 1.0, 1.0), UNIT_SPHERE), 0)


class TestExcessSplit:
    def test_small_equilateral_reproduces_planar(self):
        split = legendre_planar_angles(Triangle((0.1, 0.1, 0.1), UNIT_SPHERE))
        for approx in split.approx_angles:
            assert approx == pytest.approx(PI / 3, abs=1e-9)
        assert split.max_residual < 1e-6

    def test_equilateral_residuals_equal(self):
        split = legendre_planar_angles(Triangle((0.4, 0.4, 0.4), UNIT_SPHERE))
        assert split.residuals[0] == pytest.approx(split.residuals[1], abs=1e-12)
        assert split.residuals[1] == pytest.approx(split.residuals[2], abs=1e-12)

    def test_residuals_sum_to_zero(self):
        rng = np.random.default_rng(17)
        for sides in spherical_triangles(rng, 50):
            split = legendre_planar_angles(Triangle(sides, UNIT_SPHERE))
            assert math.fsum(split.residuals) == pytest.approx(0.0, abs=1e-9)

    def test_octant_residual_vanishes_by_symmetry(self):
        # Equal residuals plus a zero sum force every equilateral residual to
        # zero, octant included; the asymptotic breakdown needs a scalene.
        split = legendre_planar_angles(Triangle((PI / 2,) * 3, UNIT_SPHERE))
        assert split.max_residual < 1e-12

    def test_large_scalene_residual_large(self):
        # The approximation is asymptotic; at unit-sphere scale it is far off.
        split = legendre_planar_angles(Triangle((1.8, 1.5, 0.9), UNIT_SPHERE))
        assert split.max_residual > 1e-2

    def test_rejects_flat_source(self):
        with pytest.raises(DomainError):
            legendre_planar_angles(Triangle((1.0, 1.0, 1.0), FLAT))


class TestOrderFit:
    def test_generic_family_slope_near_four(self):
        tri = Triangle((1.0, 1.2, 1.5), UNIT_SPHERE)
        scales = np.geomspace(0.2, 0.02, 8)
        fit = legendre_order_fit(tri, scales)
        assert fit.conclusive
        assert 3.5 <= fit.slope <= 4.6

    def test_near_equilateral_family(self):
        tri = Triangle((1.0, 1.0, 1.001), UNIT_SPHERE)
        fit = legendre_order_fit(tri, np.geomspace(0.2, 0.02, 8))
        assert fit.slope >= 3.5

    def test_shape_invariance_keeps_residual_constant(self):
        # Shrinking the sides while growing kappa to hold sqrt(k)*side fixed
        # leaves the spherical shape, hence the residual, unchanged.
        base = np.array([1.0, 1.2, 1.5])
        res = []
        for t in (1.0, 0.5, 0.2, 0.1):
            tri = Triangle(tuple(base * t * 0.2), Curvature(1.0 / t**2))
            res.append(legendre_planar_angles(tri).max_residual)
        assert max(res) - min(res) < 1e-12 * max(res) + 1e-15

    def test_noise_floor_flags_inconclusive(self):
        tri = Triangle((1.0, 1.2, 1.5), UNIT_SPHERE)
        fit = legendre_order_fit(tri, np.geomspace(1e-4, 1e-5, 5))
        assert not fit.conclusive

    def test_rejects_narrow_span(self):
        tri = Triangle((1.0, 1.2, 1.5), UNIT_SPHERE)
        with pytest.raises(DomainError):
            legendre_order_fit(tri, [0.1, 0.12, 0.15])


class TestAngleComparison:
    def test_octant_vs_plane(self):
        cmp = compare_angles_two_spheres((PI / 2,) * 3, UNIT_SPHERE, FLAT)
        for d in cmp.deltas:
            assert d == pytest.approx(PI / 6, abs=1e-12)
        assert cmp.excess_pair[0] == pytest.approx(PI / 2, abs=1e-12)
        assert cmp.excess_pair[1] == 0.0

    def test_unit_equilateral_delta(self):
        cmp = compare_angles_two_spheres((1.0, 1.0, 1.0), UNIT_SPHERE, FLAT)
        expected = EQUILATERAL_ANGLE - PI / 3
        for d in cmp.deltas:
            assert d == pytest.approx(expected, abs=1e-12)

    def test_rejects_equal_curvatures(self):
        with pytest.raises(DomainError):
            compare_angles_two_spheres((1.0, 1.0, 1.0), UNIT_SPHERE, UNIT_SPHERE)

    def test_deltas_positive_and_sum_matches_excess_gap(self):
        rng = np.random.default_rng(12)
        for sides in spherical_triangles(rng, 100):
            cmp = compare_angles_two_spheres(sides, UNIT_SPHERE, Curvature(0.25))
            assert cmp.min_delta > 0.0
            d, dp = cmp.excess_pair
            assert d > dp >= 0.0
            assert math.fsum(cmp.deltas) == pytest.approx(d - dp, abs=1e-9)


class TestThinTriangle:
    def test_frozen_apex_values(self):
        tri = Triangle((0.05, 1.0, 1.0), UNIT_SPHERE)
        report = thin_triangle_check(0.2, tri, Curvature(0.25))
        assert report.passed
        assert report.apex_hi == pytest.approx(THIN_APEX_K1, abs=1e-12)
        assert report.apex_lo == pytest.approx(THIN_APEX_K025, abs=1e-12)
        assert report.margin > 0

    def test_epsilon_gate(self):
        tri = Triangle((0.05, 1.0, 1.0), UNIT_SPHERE)
        thin_triangle_check(0.5, tri, Curvature(0.25))
        with pytest.raises(DomainError, match="epsilon"):
            thin_triangle_check(0.01, tri, Curvature(0.25))

    def test_agrees_with_angle_comparison(self):
        rng = np.random.default_rng(31)
        for _ in range(50):
            short = rng.uniform(0.01, 0.08)
            leg = rng.uniform(0.5, 1.2)
            tri = Triangle((short, leg, leg + short * rng.uniform(0.0, 0.5)), UNIT_SPHERE)
            lo = Curvature(rng.uniform(0.05, 0.8))
            report = thin_triangle_check(0.5, tri, lo)
            cmp = compare_angles_two_spheres(tri.sides, UNIT_SPHERE, lo)
            assert report.passed == (cmp.deltas[report.apex_index] > 0)
            assert report.margin == pytest.approx(
                cmp.deltas[report.apex_index], abs=1e-12
            )

    def test_rejects_non_shrinking_curvature(self):
        tri = Triangle((0.05, 1.0, 1.0), UNIT_SPHERE)
        with pytest.raises(DomainError):
            thin_triangle_check(0.2, tri, Curvature(1.0))
        with pytest.raises(DomainError):
            thin_triangle_check(0.2, tri, Curvature(2.0))
