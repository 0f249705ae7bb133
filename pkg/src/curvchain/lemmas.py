"""Direct numerical embodiments of the lemma-level statements.

Midchords, iterated bisection toward the planar limit, the classical
excess-splitting approximation of planar angles with its residual order, and
all-angle comparisons between surfaces of different curvature.  These
operations check statements via the triangle solvers alone, so they serve as
independent oracles for the chain/triangulation pipelines.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath as mp
import numpy as np

from .errors import DomainError
from .kernel import (
    Curvature,
    SurfacePoint,
    Triangle,
    geodesic_distance,
    solve_sss,
    spherical_excess,
)
from .triangulation import _embed_triangle

# Working precision for the iterated-midchord construction.  The per-level
# curvature signal shrinks like 4^-i, which drops below double resolution
# near i = 25; sixty digits keep the strict monotonicity visible far beyond
# any practical iteration count.
_MIDCHORD_DPS = 60


# ---------------------------------------------------------------------------
# Midchord (single level)
# ---------------------------------------------------------------------------

def arc_midpoint(p: SurfacePoint, q: SurfacePoint) -> SurfacePoint:
    """Geodesic midpoint: normalized vector sum on the sphere, average in the plane."""
    if p.curvature.is_flat:
        return SurfacePoint(0.5 * (p.coords + q.coords), p.curvature)
    s = p.coords + q.coords
    norm = np.linalg.norm(s)
    if norm < 1e-12:
        raise DomainError("midpoint undefined for antipodal points")
    return SurfacePoint(s / norm, p.curvature)


def midchord_length(tri: Triangle) -> float:
    """Distance between the midpoints of the two sides adjacent to vertex a.

    In the plane this is exactly half the opposite side A; on a sphere it is
    strictly longer.
    """
    pa, pb, pc = _embed_triangle(tri)
    mb = arc_midpoint(pa, pb)
    mc = arc_midpoint(pa, pc)
    return geodesic_distance(mb, mc, tri.curvature)


# ---------------------------------------------------------------------------
# Iterated midchord (high-precision internals)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MidchordSequence:
    """Per-iteration chords s_i, their scaled values s_i * 2^i, and angle estimates.

    Chords are mpmath floats: past twenty-odd iterations the growth of the
    scaled chord falls below double-precision resolution while remaining a
    genuine strict increase, so the sequence is produced at high precision
    (float() converts entries when doubles suffice).
    """

    chords: tuple
    scaled_chords: tuple
    angle_estimates: tuple[float, ...]
    truncated: bool

    def __len__(self) -> int:
        return len(self.chords)


def _mp_apex(A, B, C, k):
    """Apex angle opposite A at mp precision (plain spherical/planar forms)."""
    if k == 0:
        return mp.acos((B * B + C * C - A * A) / (2 * B * C))
    sk = mp.sqrt(k)
    num = mp.cos(sk * A) - mp.cos(sk * B) * mp.cos(sk * C)
    return mp.acos(num / (mp.sin(sk * B) * mp.sin(sk * C)))


def _mp_sas(b, c, alpha, k):
    if k == 0:
        return mp.sqrt(b * b + c * c - 2 * b * c * mp.cos(alpha))
    sk = mp.sqrt(k)
    cosa = mp.cos(sk * b) * mp.cos(sk * c) + mp.sin(sk * b) * mp.sin(sk * c) * mp.cos(alpha)
    return mp.acos(cosa) / sk


def iterated_midchord(tri: Triangle, iters: int) -> MidchordSequence:
    """Repeat the midchord construction, halving the apex sides each level.

    Level i has sides B/2^i and C/2^i and base s_i; the angle estimate is the
    planar law-of-cosines expression on those sides,
    arccos[(B_i/C_i + C_i/B_i - s_i^2/(B_i C_i)) / 2], which converges to the
    apex angle of the original triangle.  If the scaled chords stop growing at
    working precision the sequence is truncated and flagged.
    """
    if iters < 1:
        raise DomainError(f"need at least one iteration, got {iters}")
    with mp.workdps(_MIDCHORD_DPS):
        k = mp.mpf(repr(tri.curvature.kappa))
        A, B, C = (mp.mpf(repr(s)) for s in tri.sides)
        chords = []
        scaled = []
        estimates = []
        truncated = False
        s_prev, b_prev, c_prev = A, B, C
        prev_scaled = A
        for i in range(1, iters + 1):
            alpha_level = _mp_apex(s_prev, b_prev, c_prev, k)
            s_i = _mp_sas(b_prev / 2, c_prev / 2, alpha_level, k)
            b_i, c_i = b_prev / 2, c_prev / 2
            scaled_i = s_i * mp.power(2, i)
            if k > 0 and scaled_i <= prev_scaled:
                truncated = True
                break
            ratio = b_i / c_i
            est = mp.acos((ratio + 1 / ratio - s_i * s_i / (b_i * c_i)) / 2)
            chords.append(s_i)
            scaled.append(scaled_i)
            estimates.append(float(est))
            s_prev, b_prev, c_prev = s_i, b_i, c_i
            prev_scaled = scaled_i
    return MidchordSequence(tuple(chords), tuple(scaled), tuple(estimates), truncated)


# ---------------------------------------------------------------------------
# Excess splitting (Legendre-style planar approximation)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExcessSplit:
    """Planar-angle approximation theta_i - delta/3 and its exact residuals."""

    spherical_angles: tuple[float, float, float]
    excess: float
    approx_angles: tuple[float, float, float]
    planar_angles: tuple[float, float, float]
    residuals: tuple[float, float, float]

    @property
    def max_residual(self) -> float:
        return max(abs(r) for r in self.residuals)


def legendre_planar_angles(tri: Triangle) -> ExcessSplit:
    """Approximate the planar angles by splitting the excess evenly.

    residual_i = exact planar angle - (theta_i - delta/3); the residuals sum
    to zero because both angle triples have fixed sums.
    """
    if tri.curvature.is_flat:
        raise DomainError("excess splitting needs a curved source triangle")
    sph = solve_sss(tri)
    delta = spherical_excess(tri)
    pla = solve_sss(Triangle(tri.sides, Curvature(0.0)))
    approx = tuple(t - delta / 3.0 for t in sph)
    residuals = tuple(p - a for p, a in zip(pla, approx))
    return ExcessSplit(tuple(sph), delta, approx, tuple(pla), residuals)


@dataclass(frozen=True)
class OrderFit:
    """Log-log slope of the approximation residual against triangle scale."""

    scales: tuple[float, ...]
    max_residuals: tuple[float, ...]
    slope: float
    conclusive: bool


# Residuals below this are dominated by double-precision noise.
_RESIDUAL_FLOOR = 1e-12


def legendre_order_fit(tri: Triangle, scales) -> OrderFit:
    """Fit the residual order over a family of rescaled copies of tri.

    A slope near four is evidence that the residual is a degree-at-least-four
    expression of the edge lengths.  Residuals at the noise floor make the
    fit inconclusive rather than wrong.
    """
    scales = tuple(float(t) for t in scales)
    if len(scales) < 3:
        raise DomainError("need at least three scales to fit a slope")
    if any(t <= 0 for t in scales):
        raise DomainError("scales must be positive")
    span = math.log10(max(scales) / min(scales))
    if span < 1.0 - 1e-9:
        raise DomainError(f"scales span only {span:.2f} decades; need at least one")
    residuals = []
    for t in scales:
        scaled = Triangle(tuple(s * t for s in tri.sides), tri.curvature)
        residuals.append(legendre_planar_angles(scaled).max_residual)
    conclusive = all(r > _RESIDUAL_FLOOR for r in residuals)
    slope, _ = np.polyfit(np.log(scales), np.log(residuals), 1)
    return OrderFit(scales, tuple(residuals), float(slope), conclusive)


# ---------------------------------------------------------------------------
# Angle comparison across curvatures
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AngleComparison:
    """Angles of one side triple on two surfaces, with per-angle shrinkage."""

    source_angles: tuple[float, float, float]
    target_angles: tuple[float, float, float]
    deltas: tuple[float, float, float]
    excess_pair: tuple[float, float]

    @property
    def min_delta(self) -> float:
        return min(self.deltas)


def compare_angles_two_spheres(sides, kappa_hi: Curvature, kappa_lo: Curvature) -> AngleComparison:
    """Angles of the same side lengths on a smaller vs a larger sphere.

    Requires kappa_hi > kappa_lo >= 0; every angle is strictly larger on the
    higher-curvature surface and the excesses order the same way.
    """
    if not kappa_hi.kappa > kappa_lo.kappa:
        raise DomainError(
            f"need kappa_hi > kappa_lo, got {kappa_hi.kappa} vs {kappa_lo.kappa}"
        )
    hi = Triangle(tuple(sides), kappa_hi)
    lo = Triangle(tuple(sides), kappa_lo)
    src = solve_sss(hi)
    tgt = solve_sss(lo)
    deltas = tuple(s - t for s, t in zip(src, tgt))
    return AngleComparison(
        tuple(src), tuple(tgt), deltas, (spherical_excess(hi), spherical_excess(lo))
    )


@dataclass(frozen=True)
class ThinTriangleReport:
    """Verdict and quantities for the thin-triangle apex comparison."""

    passed: bool
    apex_index: int
    apex_hi: float
    apex_lo: float
    margin: float

    def __bool__(self) -> bool:
        return self.passed


def thin_triangle_check(epsilon: float, tri: Triangle, kappa_lo: Curvature) -> ThinTriangleReport:
    """Does the apex angle of a thin triangle shrink on the larger sphere?

    The apex is the smallest angle; it must already be below epsilon for the
    thinness hypothesis to hold.
    """
    if epsilon <= 0:
        raise DomainError(f"apex bound must be positive, got {epsilon}")
    if tri.curvature.is_flat or kappa_lo.kappa >= tri.curvature.kappa:
        raise DomainError("target curvature must be strictly below the source")
    angles = solve_sss(tri)
    apex_index = min(range(3), key=lambda i: angles[i])
    if angles[apex_index] >= epsilon:
        raise DomainError(
            f"smallest angle {angles[apex_index]} is not below epsilon={epsilon}"
        )
    lo_angles = solve_sss(Triangle(tri.sides, kappa_lo))
    margin = angles[apex_index] - lo_angles[apex_index]
    return ThinTriangleReport(
        passed=margin > 0.0,
        apex_index=apex_index,
        apex_hi=angles[apex_index],
        apex_lo=lo_angles[apex_index],
        margin=margin,
    )
