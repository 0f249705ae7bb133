"""Randomized generators and end-to-end theorem checks.

Each check replays a proof pipeline (triangulate, redraw, read the boundary
back, open the arm) and renders a verdict with an explicit margin.  All
randomness is seed-deterministic and the seed is carried in every report, so
failures replay exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .chains import ConvexChain, endpoint_distance, is_convex, open_arm
from .errors import DomainError, EmbeddabilityError, GeneratorError
from .kernel import Curvature, Triangle, geodesic_distance, solve_sas, solve_sss, strict_margin
from .lemmas import compare_angles_two_spheres, thin_triangle_check
from .triangulation import boundary_chain, fan_triangulate, layout, redraw, steiner_subdivide

THEOREM_IDS = (
    "cauchy_arm",
    "sphere_to_plane",
    "growing_sphere",
    "thin_triangle",
    "all_angles",
)

_REJECTION_LIMIT = 10_000


@dataclass(frozen=True)
class TheoremReport:
    """Outcome of one theorem instance: verdict, margin, named quantities."""

    theorem_id: str
    instance_seed: int
    quantities: dict = field(default_factory=dict)
    verdict: bool = False
    margin: float = 0.0

    def to_line(self) -> str:
        """One-line machine-readable rendering for report streams."""
        status = "pass" if self.verdict else "fail"
        return (
            f"theorem_id={self.theorem_id} seed={self.instance_seed} "
            f"margin={self.margin:.12e} verdict={status}"
        )


@dataclass(frozen=True)
class GeneratorConfig:
    """Ranges for random chain instances plus the curvature pair under test."""

    n_edges: tuple[int, int] = (2, 8)
    length_scale: tuple[float, float] = (0.1, 0.6)
    curvature_pair: tuple[float, float] = (1.0, 0.0)
    seed: int = 0

    def __post_init__(self):
        lo, hi = self.n_edges
        if not 1 <= lo <= hi:
            raise DomainError(f"bad edge-count range {self.n_edges}")
        slo, shi = self.length_scale
        if not 0 < slo <= shi:
            raise DomainError(f"bad length-scale range {self.length_scale}")
        k, kp = self.curvature_pair
        if not k > kp >= 0:
            raise DomainError(
                f"curvature pair must satisfy kappa > kappa' >= 0, got {self.curvature_pair}"
            )


def random_convex_chain(cfg: GeneratorConfig) -> ConvexChain:
    """Rejection-sample a convex chain feasible on the higher curvature.

    Angles are drawn near pi (shallow turning opens the closure) and lengths
    log-uniform in the configured scale; the total is rescaled into the
    embeddability budget of the smaller-radius surface, which is the binding
    constraint.
    """
    rng = np.random.default_rng(cfg.seed)
    curv = Curvature(cfg.curvature_pair[0])
    lo, hi = cfg.n_edges
    slo, shi = cfg.length_scale
    for attempt in range(_REJECTION_LIMIT):
        n = int(rng.integers(lo, hi + 1))
        lengths = np.exp(rng.uniform(math.log(slo), math.log(shi), size=n))
        total = float(lengths.sum())
        budget = 0.92 * curv.length_cap
        if math.isfinite(budget) and total > budget:
            lengths *= budget / total
        if n == 1:
            return ConvexChain(tuple(lengths), ())
        turn_budget = rng.uniform(0.25, 1.45) * math.pi
        turns = rng.uniform(0.2, 1.0, size=n - 1)
        turns *= turn_budget / turns.sum()
        angles = math.pi - turns
        if angles.min() <= 1e-3:
            continue
        chain = ConvexChain(tuple(lengths), tuple(angles))
        try:
            if is_convex(chain, curv):
                return chain
        except EmbeddabilityError:
            continue
    raise GeneratorError(
        f"no convex chain after {_REJECTION_LIMIT} attempts (config {cfg})"
    )


def random_increments(chain: ConvexChain, rng: np.random.Generator):
    """Valid opening increments: nonnegative, capped at pi, one forced positive."""
    caps = np.array([math.pi - t for t in chain.interior_angles])
    incs = rng.uniform(0.0, 0.85, size=len(caps)) * caps
    incs *= rng.random(size=len(caps)) < 0.7
    forced = int(rng.integers(0, len(caps)))
    if incs[forced] == 0.0:
        incs[forced] = 0.5 * caps[forced]
    return tuple(float(x) for x in incs)


def random_thin_triangle(rng: np.random.Generator, kappa: float = 1.0) -> Triangle:
    """Thin spherical triangle: short base, two long near-equal legs."""
    short = rng.uniform(0.02, 0.08)
    leg = rng.uniform(0.4, 1.1)
    other = leg + rng.uniform(0.0, 0.6) * short
    return Triangle((float(short), float(leg), float(other)), Curvature(kappa))


# ---------------------------------------------------------------------------
# Theorem checks
# ---------------------------------------------------------------------------

def check_cauchy_arm(chain: ConvexChain, curv: Curvature, increments, seed: int = 0) -> TheoremReport:
    """Endpoint distance strictly increases when angles are opened."""
    d0 = endpoint_distance(chain, curv)
    d1 = endpoint_distance(open_arm(chain, increments), curv)
    tol = strict_margin(chain.total_length)
    return TheoremReport(
        theorem_id="cauchy_arm",
        instance_seed=seed,
        quantities={"d_before": d0, "d_after": d1, "tolerance": tol},
        verdict=d1 - d0 > tol,
        margin=d1 - d0,
    )


def _redraw_pipeline(chain: ConvexChain, source: Curvature, target: Curvature):
    """Shared fan/redraw/boundary stages; returns stage quantities."""
    fan = fan_triangulate(chain, source)
    moved = redraw(fan, target)
    extracted = boundary_chain(moved, raw=True)
    pos = layout(moved)
    d_layout = geodesic_distance(pos[moved.start], pos[moved.end], target)
    return fan, moved, extracted, d_layout


def _pipeline_report(theorem_id, chain, source, target, seed, limit_tol=None) -> TheoremReport:
    tol = strict_margin(chain.total_length)
    d_source = endpoint_distance(chain, source)
    fan, moved, extracted, d_layout = _redraw_pipeline(chain, source, target)

    checks = {}
    checks["boundary_convex"] = extracted.convex
    angle_drops = [
        t - tp for t, tp in zip(chain.interior_angles, extracted.interior_angles)
    ]
    checks["angles_strictly_smaller"] = all(d > tol for d in angle_drops)

    quantities = {"d_source": d_source, "tolerance": tol}
    verdict = all(checks.values())
    d_target = math.nan
    if extracted.convex:
        redrawn_chain = extracted.to_chain()
        d_redrawn = endpoint_distance(redrawn_chain, target)
        # The closing edge is a copied length, so the redrawn boundary keeps
        # the original endpoint separation.
        checks["separation_preserved"] = abs(d_redrawn - d_source) <= 1e-9 * max(
            1.0, d_source
        )
        checks["layout_agrees"] = abs(d_redrawn - d_layout) <= 1e-9 * max(1.0, d_source)
        opened = open_arm(redrawn_chain, angle_drops)
        d_target = endpoint_distance(opened, target)
        checks["arm_opening_increases"] = d_target - d_redrawn > tol
        checks["headline"] = d_target - d_source > tol
        quantities.update(
            d_redrawn=d_redrawn,
            d_layout=d_layout,
            d_target=d_target,
            min_angle_drop=min(angle_drops),
        )
        verdict = all(checks.values())
    quantities.update({f"stage_{k}": float(v) for k, v in checks.items()})
    return TheoremReport(
        theorem_id=theorem_id,
        instance_seed=seed,
        quantities=quantities,
        verdict=verdict,
        margin=(d_target - d_source) if math.isfinite(d_target) else -math.inf,
    )


def check_sphere_to_plane(chain: ConvexChain, kappa: Curvature, seed: int = 0) -> TheoremReport:
    """Redrawing a spherical convex chain in the plane moves its endpoints apart.

    Replays the proof: fan-triangulate on the sphere, redraw flat (angles all
    shrink, separation preserved), then open the arm back to the original
    angles and watch the distance grow.
    """
    if kappa.is_flat:
        raise DomainError("source surface must be a sphere")
    return _pipeline_report("sphere_to_plane", chain, kappa, Curvature(0.0), seed)


def check_growing_sphere(chain: ConvexChain, kappa: Curvature, kappa_prime: Curvature,
                         seed: int = 0) -> TheoremReport:
    """Same pipeline with a larger sphere as the target surface."""
    if not (kappa.kappa > kappa_prime.kappa > 0.0):
        raise DomainError(
            f"need kappa > kappa' > 0, got {kappa.kappa}, {kappa_prime.kappa}"
        )
    return _pipeline_report("growing_sphere", chain, kappa, kappa_prime, seed)


def replay_lemma5_pipeline(tri: Triangle, epsilon: float, kappa_prime: Curvature,
                           ell: float, seed: int = 0) -> TheoremReport:
    """Thin-triangle pipeline: subdivide, redraw, compare the boundary 2-chain.

    Mechanism: on the larger sphere the subdivided base arrives bent, and
    opening the legs chain back to straight legs with the original apex angle
    pushes the endpoints to solve_sas(leg, leg, apex).  The apex must shrink
    exactly when that opened distance exceeds the base length.  The verdict
    records whether this mechanism-level conclusion matches the direct
    SSS-on-both-spheres oracle.
    """
    source = tri.curvature
    base = min(tri.sides)
    tol = strict_margin(tri.perimeter)

    subdivided = steiner_subdivide(tri, ell)
    moved = redraw(subdivided, kappa_prime)
    legs_before = boundary_chain(subdivided, raw=True)
    legs_after = boundary_chain(moved, raw=True)

    quantities = {"base": base, "ell": ell, "tolerance": tol}

    if kappa_prime == source:
        unchanged = max(
            abs(a - b)
            for a, b in zip(legs_before.interior_angles, legs_after.interior_angles)
        )
        quantities["max_angle_change"] = unchanged
        return TheoremReport(
            theorem_id="thin_triangle",
            instance_seed=seed,
            quantities=quantities,
            verdict=unchanged < 1e-10,
            margin=-unchanged,
        )

    angles = solve_sss(tri)
    apex_idx = min(range(3), key=lambda i: angles[i])
    apex = angles[apex_idx]
    legs = [tri.sides[i] for i in range(3) if i != apex_idx]

    checks = {}
    drops = [
        b - a for b, a in zip(legs_before.interior_angles, legs_after.interior_angles)
    ]
    checks["legs_angles_strictly_smaller"] = all(d > 0.0 for d in drops)
    checks["legs_convex_after"] = legs_after.convex

    d_bent = endpoint_distance(legs_after.to_chain(), kappa_prime)
    checks["bent_base_not_longer"] = d_bent <= base + 1e-9

    increments = drops
    opened = open_arm(legs_after.to_chain(), increments)
    d_opened = endpoint_distance(opened, kappa_prime)
    checks["cauchy_opening_increases"] = d_opened - d_bent > tol
    sas_reference = solve_sas(legs[0], legs[1], apex, kappa_prime)
    checks["opened_matches_sas"] = abs(d_opened - sas_reference) <= 1e-9

    mechanism_shrinks = d_opened > base + tol
    oracle = thin_triangle_check(epsilon, tri, kappa_prime)
    checks["mechanism_matches_oracle"] = mechanism_shrinks == oracle.passed

    quantities.update(
        apex_angle=apex,
        apex_angle_target=oracle.apex_lo,
        d_bent=d_bent,
        d_opened=d_opened,
        sas_reference=sas_reference,
    )
    quantities.update({f"stage_{k}": float(v) for k, v in checks.items()})
    return TheoremReport(
        theorem_id="thin_triangle",
        instance_seed=seed,
        quantities=quantities,
        verdict=all(checks.values()),
        margin=d_opened - base,
    )


@dataclass(frozen=True)
class SweepPoint:
    kappa: float
    distance: float | None
    error: str | None = None


def sweep_radius(chain: ConvexChain, kappa_grid) -> list[SweepPoint]:
    """Endpoint distance of the same intrinsic chain across a curvature grid.

    Infeasible grid points are reported in place, not fatally.
    """
    out = []
    for k in kappa_grid:
        try:
            curv = Curvature(float(k))
            d = endpoint_distance(chain, curv)
            out.append(SweepPoint(float(k), d))
        except (DomainError, EmbeddabilityError) as exc:
            out.append(SweepPoint(float(k), None, error=str(exc)))
    return out


def check_all_angles(sides, kappa: Curvature, kappa_prime: Curvature, seed: int = 0) -> TheoremReport:
    """All three angles strictly shrink from the smaller to the larger surface."""
    cmp = compare_angles_two_spheres(sides, kappa, kappa_prime)
    tol = strict_margin(sum(sides))
    return TheoremReport(
        theorem_id="all_angles",
        instance_seed=seed,
        quantities={
            "delta_1": cmp.deltas[0],
            "delta_2": cmp.deltas[1],
            "delta_3": cmp.deltas[2],
            "excess_gap": cmp.excess_pair[0] - cmp.excess_pair[1],
        },
        verdict=cmp.min_delta > tol,
        margin=cmp.min_delta,
    )


# ---------------------------------------------------------------------------
# Named suites (consumed by the CLI)
# ---------------------------------------------------------------------------

def run_suite(name: str, count: int, seed: int) -> list[TheoremReport]:
    """Run count seeded instances of a named verification suite."""
    if count < 1:
        raise DomainError(f"count must be positive, got {count}")
    reports = []
    if name == "cauchy":
        for i in range(count):
            inst = seed + i
            kappa = 1.0 if i % 2 == 0 else 0.0
            cfg = GeneratorConfig(
                n_edges=(2, 8), curvature_pair=(max(kappa, 1.0), 0.0), seed=inst
            )
            chain = random_convex_chain(cfg)
            rng = np.random.default_rng(inst + 1_000_003)
            curv = Curvature(kappa)
            reports.append(
                check_cauchy_arm(chain, curv, random_increments(chain, rng), seed=inst)
            )
    elif name == "sphere-to-plane":
        for i in range(count):
            inst = seed + i
            chain = random_convex_chain(GeneratorConfig(seed=inst))
            reports.append(check_sphere_to_plane(chain, Curvature(1.0), seed=inst))
    elif name == "growing-sphere":
        targets = (0.5, 0.25, 0.1)
        for i in range(count):
            inst = seed + i
            kp = targets[i % 3]
            chain = random_convex_chain(
                GeneratorConfig(curvature_pair=(1.0, kp), seed=inst)
            )
            reports.append(
                check_growing_sphere(chain, Curvature(1.0), Curvature(kp), seed=inst)
            )
    elif name == "lemma5":
        for i in range(count):
            inst = seed + i
            rng = np.random.default_rng(inst)
            tri = random_thin_triangle(rng)
            kp = float(rng.uniform(0.05, 0.8))
            reports.append(
                replay_lemma5_pipeline(
                    tri, 0.5, Curvature(kp), ell=min(tri.sides), seed=inst
                )
            )
    elif name == "all-angles":
        for i in range(count):
            inst = seed + i
            rng = np.random.default_rng(inst)
            x, y, z = rng.uniform(0.05, 0.75, size=3)
            kp = float(rng.uniform(0.0, 0.9))
            reports.append(
                check_all_angles(
                    (y + z, x + z, x + y), Curvature(1.0), Curvature(kp), seed=inst
                )
            )
    else:
        raise DomainError(f"unknown suite {name!r}")
    return reports
