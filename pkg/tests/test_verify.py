"""Harness tests: generators, pipeline checks, sweeps, suite plumbing."""

import math

import numpy as np
import pytest

from curvchain.chains import ConvexChain, endpoint_distance, is_convex
from curvchain.errors import DomainError, GeneratorError
from curvchain.kernel import FLAT, UNIT_SPHERE, Curvature, Triangle
from curvchain.lemmas import thin_triangle_check
from curvchain.verify import (
    GeneratorConfig,
    SweepPoint,
    check_all_angles,
    check_cauchy_arm,
    check_growing_sphere,
    check_sphere_to_plane,
    random_convex_chain,
    random_increments,
    random_thin_triangle,
    replay_lemma5_pipeline,
    run_suite,
    sweep_radius,
)

PI = math.pi

PLANAR_OCTANT_LIMIT = PI / 2 * math.sqrt(2.0)  # 2.2214414690791831


def octant_chain():
    return ConvexChain((PI / 2, PI / 2), (PI / 2,))


class TestGenerator:
    def test_deterministic(self):
        cfg = GeneratorConfig(seed=42)
        a = random_convex_chain(cfg)
        b = random_convex_chain(cfg)
        assert a.edge_lengths == b.edge_lengths
        assert a.interior_angles == b.interior_angles

    def test_two_edge_chains_accepted(self):
        cfg = GeneratorConfig(n_edges=(2, 2), seed=1)
        chain = random_convex_chain(cfg)
        assert chain.n_edges == 2

    def test_self_check_convexity(self):
        for i in range(300):
            cfg = GeneratorConfig(n_edges=(3, 8), seed=9000 + i)
            chain = random_convex_chain(cfg)
            assert is_convex(chain, Curvature(1.0))

    def test_budget_respected_on_binding_surface(self):
        for i in range(100):
            cfg = GeneratorConfig(
                n_edges=(4, 8), length_scale=(0.5, 1.5), curvature_pair=(4.0, 1.0),
                seed=i,
            )
            chain = random_convex_chain(cfg)
            assert chain.total_length <= Curvature(4.0).length_cap

    def test_config_validation(self):
        with pytest.raises(DomainError):
            GeneratorConfig(curvature_pair=(0.5, 0.5))
        with pytest.raises(DomainError):
            GeneratorConfig(n_edges=(0, 3))
        with pytest.raises(DomainError):
            GeneratorConfig(length_scale=(-1.0, 1.0))


class TestCauchyArm:
    def test_planar_anchor(self):
        chain = ConvexChain((1.0, 1.0), (PI / 2,))
        report = check_cauchy_arm(chain, FLAT, (PI / 4,), seed=7)
        assert report.verdict
        assert report.quantities["d_before"] == pytest.approx(math.sqrt(2.0), abs=1e-9)
        assert report.quantities["d_after"] == pytest.approx(
            2.0 * math.cos(PI / 8), abs=1e-9
        )

    def test_octant_anchor(self):
        report = check_cauchy_arm(octant_chain(), UNIT_SPHERE, (PI / 4,), seed=0)
        assert report.verdict
        assert report.quantities["d_after"] == pytest.approx(3 * PI / 4, abs=1e-9)

    def test_report_line_format(self):
        report = check_cauchy_arm(octant_chain(), UNIT_SPHERE, (PI / 4,), seed=3)
        line = report.to_line()
        assert line.startswith("theorem_id=cauchy_arm seed=3 margin=")
        assert line.endswith("verdict=pass")


class TestSphereToPlane:
    def test_octant_anchor(self):
        report = check_sphere_to_plane(octant_chain(), UNIT_SPHERE, seed=0)
        assert report.verdict
        assert report.quantities["d_source"] == pytest.approx(PI / 2, abs=1e-6)
        assert report.quantities["d_target"] == pytest.approx(
            PLANAR_OCTANT_LIMIT, abs=1e-6
        )

    def test_near_degenerate_margin_scaled(self):
        chain = ConvexChain((0.003, 0.003), (2.0,))
        report = check_sphere_to_plane(chain, UNIT_SPHERE, seed=0)
        assert report.verdict
        assert 0.0 < report.margin < 1e-8

    def test_two_chain_consistent_with_planar_law_of_cosines(self):
        e1, e2, theta = 0.7, 0.9, 2.2
        chain = ConvexChain((e1, e2), (theta,))
        report = check_sphere_to_plane(chain, UNIT_SPHERE, seed=0)
        closing = report.quantities["d_source"]
        planar_angle = math.acos(
            (e1 * e1 + e2 * e2 - closing * closing) / (2 * e1 * e2)
        )
        assert theta - report.quantities["min_angle_drop"] == pytest.approx(
            planar_angle, abs=1e-9
        )

    def test_rejects_flat_source(self):
        with pytest.raises(DomainError):
            check_sphere_to_plane(octant_chain(), FLAT)

    def test_random_chains_pass(self):
        for i in range(40):
            chain = random_convex_chain(GeneratorConfig(seed=500 + i))
            report = check_sphere_to_plane(chain, UNIT_SPHERE, seed=500 + i)
            assert report.verdict, report.quantities


class TestGrowingSphere:
    def test_octant_to_quarter(self):
        report = check_growing_sphere(
            octant_chain(), UNIT_SPHERE, Curvature(0.25), seed=0
        )
        assert report.verdict
        assert report.quantities["d_target"] == pytest.approx(2 * PI / 3, abs=1e-9)

    def test_flat_limit_matches_sphere_to_plane(self):
        chain = random_convex_chain(GeneratorConfig(seed=77))
        tiny = check_growing_sphere(chain, UNIT_SPHERE, Curvature(1e-10), seed=0)
        flat = check_sphere_to_plane(chain, UNIT_SPHERE, seed=0)
        assert tiny.quantities["d_target"] == pytest.approx(
            flat.quantities["d_target"], abs=1e-6
        )

    def test_rejects_bad_pair(self):
        with pytest.raises(DomainError):
            check_growing_sphere(octant_chain(), UNIT_SPHERE, UNIT_SPHERE)
        with pytest.raises(DomainError):
            check_growing_sphere(octant_chain(), UNIT_SPHERE, Curvature(0.0))

    def test_random_chains_pass(self):
        for i, kp in zip(range(30), (0.5, 0.25, 0.1) * 10):
            chain = random_convex_chain(
                GeneratorConfig(curvature_pair=(1.0, kp), seed=800 + i)
            )
            report = check_growing_sphere(
                chain, UNIT_SPHERE, Curvature(kp), seed=800 + i
            )
            assert report.verdict, report.quantities


class TestLemma5Replay:
    def test_spec_anchor_instance(self):
        tri = Triangle((0.05, 1.0, 1.0), UNIT_SPHERE)
        report = replay_lemma5_pipeline(tri, 0.2, Curvature(0.25), ell=0.05, seed=0)
        assert report.verdict
        assert report.quantities["stage_mechanism_matches_oracle"] == 1.0
        assert report.margin > 0  # apex shrinks on the larger sphere

    def test_identity_curvature_no_change(self):
        tri = Triangle((0.05, 1.0, 1.0), UNIT_SPHERE)
        report = replay_lemma5_pipeline(tri, 0.2, UNIT_SPHERE, ell=0.05, seed=0)
        assert report.verdict
        assert report.quantities["max_angle_change"] < 1e-10

    def test_coarse_ell_no_subdivision_still_agrees(self):
        tri = Triangle((0.01, 0.15, 0.15), UNIT_SPHERE)
        report = replay_lemma5_pipeline(tri, 0.2, Curvature(0.25), ell=0.2, seed=0)
        assert report.verdict

    def test_agreement_on_random_thin_triangles(self):
        for i in range(50):
            rng = np.random.default_rng(4000 + i)
            tri = random_thin_triangle(rng)
            kp = Curvature(float(rng.uniform(0.05, 0.8)))
            report = replay_lemma5_pipeline(tri, 0.5, kp, ell=min(tri.sides), seed=i)
            oracle = thin_triangle_check(0.5, tri, kp)
            assert report.verdict
            mechanism = report.margin > report.quantities["tolerance"]
            assert mechanism == oracle.passed


class TestSweep:
    def test_octant_grid(self):
        points = sweep_radius(octant_chain(), (1.0, 0.5, 0.25, 0.0))
        distances = [p.distance for p in points]
        assert distances[0] == pytest.approx(PI / 2, abs=1e-12)
        assert distances[-1] == pytest.approx(PLANAR_OCTANT_LIMIT, abs=1e-12)
        assert all(b > a for a, b in zip(distances, distances[1:]))

    def test_single_edge_constant(self):
        points = sweep_radius(ConvexChain((0.8,), ()), (1.0, 0.5, 0.0))
        assert all(p.distance == pytest.approx(0.8, abs=1e-15) for p in points)

    def test_empty_grid(self):
        assert sweep_radius(octant_chain(), ()) == []

    def test_infeasible_points_reported_not_fatal(self):
        points = sweep_radius(octant_chain(), (16.0, 1.0))
        assert points[0].distance is None and "budget" in points[0].error
        assert points[1].distance == pytest.approx(PI / 2, abs=1e-12)


class TestAllAngles:
    def test_octant_sides(self):
        report = check_all_angles((PI / 2,) * 3, UNIT_SPHERE, FLAT, seed=0)
        assert report.verdict
        assert report.margin == pytest.approx(PI / 6, abs=1e-12)

    def test_rejects_equal(self):
        with pytest.raises(DomainError):
            check_all_angles((1.0, 1.0, 1.0), UNIT_SPHERE, UNIT_SPHERE)


class TestSuites:
    @pytest.mark.parametrize(
        "name", ["cauchy", "sphere-to-plane", "growing-sphere", "lemma5", "all-angles"]
    )
    def test_small_runs_pass(self, name):
        reports = run_suite(name, count=8, seed=123)
        assert len(reports) == 8
        assert all(r.verdict for r in reports)

    def test_deterministic_lines(self):
        lines1 = [r.to_line() for r in run_suite("cauchy", 5, seed=9)]
        lines2 = [r.to_line() for r in run_suite("cauchy", 5, seed=9)]
        assert lines1 == lines2

    def test_unknown_suite(self):
        with pytest.raises(DomainError):
            run_suite("nope", 1, 0)
