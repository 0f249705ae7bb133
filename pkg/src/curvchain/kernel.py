"""Constant-curvature trigonometry kernel.

Distances, SSS/SAS triangle solvers, excess, and geodesic walking on the
model surfaces of nonnegative curvature: the sphere of radius 1/sqrt(kappa)
for kappa > 0, and the Euclidean plane for kappa = 0.  One code path covers
both regimes through the generalized sine/cosine/versine functions, so every
quantity is continuous in kappa down to the flat limit.

Conventions:
  - Spherical points are unit 3-vectors; arc lengths are scaled by
    1/sqrt(kappa) at the API boundary.  Planar points are plain 2-vectors.
  - Triangle sides (A, B, C) are opposite vertices (a, b, c); the angle
    alpha sits at vertex a between the sides of lengths B and C.
  - Headings turn consistently leftward (counterclockwise interior).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CurvatureMismatch, DomainError

# Unit-norm bookkeeping tolerance for embedded points/headings.
NORM_TOL = 1e-12

# Below sqrt(kappa)*x = 1e-4 the trig kernels switch to truncated series to
# avoid cancellation; with u = kappa*x^2 < 1e-8 three terms are exact to ulp.
SERIES_THRESHOLD = 1e-4

# Base tolerance for "strictly greater" verdicts, scaled by instance size.
STRICT_REL_TOL = 1e-9


def strict_margin(scale: float) -> float:
    """Margin above which a strict inequality counts as numerically strict."""
    return STRICT_REL_TOL * max(1.0, scale)


# ---------------------------------------------------------------------------
# Curvature and generalized trigonometry
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Curvature:
    """Gaussian curvature kappa >= 0 selecting the model surface."""

    kappa: float

    def __post_init__(self):
        k = self.kappa
        if not (isinstance(k, (int, float)) and math.isfinite(k)):
            raise DomainError(f"curvature must be finite, got {k!r}")
        if k < 0:
            raise DomainError(f"curvature must be nonnegative, got {k}")
        object.__setattr__(self, "kappa", float(k))

    @property
    def is_flat(self) -> bool:
        return self.kappa == 0.0

    @property
    def sqrt_kappa(self) -> float:
        return math.sqrt(self.kappa)

    @property
    def radius(self) -> float:
        """Sphere radius 1/sqrt(kappa); infinite in the flat case."""
        return math.inf if self.is_flat else 1.0 / self.sqrt_kappa

    @property
    def length_cap(self) -> float:
        """Diameter bound pi/sqrt(kappa) for minimal geodesics (inf if flat)."""
        return math.inf if self.is_flat else math.pi / self.sqrt_kappa


FLAT = Curvature(0.0)
UNIT_SPHERE = Curvature(1.0)


def gsin(x: float, curv: Curvature) -> float:
    """Generalized sine: sin(sqrt(k)*x)/sqrt(k) for k > 0, x at k = 0."""
    k = curv.kappa
    if k == 0.0:
        return x
    t = curv.sqrt_kappa * x
    if abs(t) < SERIES_THRESHOLD:
        u = t * t
        return x * (1.0 - u / 6.0 * (1.0 - u / 20.0 * (1.0 - u / 42.0)))
    return math.sin(t) / curv.sqrt_kappa


def gcos(x: float, curv: Curvature) -> float:
    """Generalized cosine: cos(sqrt(k)*x) for k > 0, 1 at k = 0."""
    if curv.kappa == 0.0:
        return 1.0
    return math.cos(curv.sqrt_kappa * x)


def gversine(x: float, curv: Curvature) -> float:
    """Generalized versine: (1 - cos(sqrt(k)*x))/k for k > 0, x^2/2 at k = 0.

    The direct form cancels catastrophically for small arguments, so this
    uses the half-angle identity plus a series fallback below the threshold.
    """
    k = curv.kappa
    if k == 0.0:
        return 0.5 * x * x
    t = curv.sqrt_kappa * x
    if abs(t) < SERIES_THRESHOLD:
        u = t * t
        return 0.5 * x * x * (1.0 - u / 12.0 * (1.0 - u / 30.0))
    s = math.sin(0.5 * t)
    return 2.0 * s * s / k


def inv_gversine(v: float, curv: Curvature) -> float:
    """Inverse of gversine on [0, length_cap]; clamps fp overshoot."""
    if v < 0.0:
        if v < -NORM_TOL:
            raise DomainError(f"versine value must be nonnegative, got {v}")
        v = 0.0
    k = curv.kappa
    if k == 0.0:
        return math.sqrt(2.0 * v)
    arg = 0.5 * k * v
    if arg > 1.0:
        if arg > 1.0 + 1e-9:
            raise DomainError(f"versine value {v} exceeds the spherical range")
        arg = 1.0
    return 2.0 / curv.sqrt_kappa * math.asin(math.sqrt(arg))


# ---------------------------------------------------------------------------
# Triangles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Triangle:
    """Side lengths (A, B, C) opposite vertices (a, b, c), bound to a curvature."""

    sides: tuple[float, float, float]
    curvature: Curvature

    def __post_init__(self):
        sides = tuple(float(s) for s in self.sides)
        if len(sides) != 3:
            raise DomainError("a triangle needs exactly three sides")
        object.__setattr__(self, "sides", sides)
        a, b, c = sides
        for s in sides:
            if not (math.isfinite(s) and s > 0.0):
                raise DomainError(f"side lengths must be positive, got {sides}")
        if not (a < b + c and b < a + c and c < a + b):
            raise DomainError(f"sides {sides} violate the strict triangle inequality")
        cap = self.curvature.length_cap
        if max(sides) >= cap:
            raise DomainError(
                f"side {max(sides)} reaches the spherical cap pi/sqrt(kappa) = {cap}"
            )
        if a + b + c >= 2.0 * cap:
            raise DomainError(
                f"perimeter {a + b + c} reaches 2*pi/sqrt(kappa) = {2.0 * cap}"
            )

    @property
    def perimeter(self) -> float:
        return sum(self.sides)

    def with_curvature(self, curv: Curvature) -> "Triangle":
        """Same side lengths re-validated on another surface."""
        return Triangle(self.sides, curv)


class TriangleAngles(tuple):
    """Angles (alpha, beta, gamma) opposite sides (A, B, C)."""

    __slots__ = ()

    def __new__(cls, alpha, beta, gamma):
        return super().__new__(cls, (alpha, beta, gamma))

    @property
    def alpha(self):
        return self[0]

    @property
    def beta(self):
        return self[1]

    @property
    def gamma(self):
        return self[2]


def _opposite_angle(opp: float, adj1: float, adj2: float, curv: Curvature) -> float:
    # Versine-form law of cosines, symmetric in the adjacent sides and exact
    # in the flat limit:
    #   cos(angle) = (V(adj1) + V(adj2) - k*V(adj1)*V(adj2) - V(opp))
    #                / (S(adj1) * S(adj2))
    k = curv.kappa
    v1 = gversine(adj1, curv)
    v2 = gversine(adj2, curv)
    vo = gversine(opp, curv)
    num = v1 + v2 - k * v1 * v2 - vo
    den = gsin(adj1, curv) * gsin(adj2, curv)
    cos_angle = num / den
    if not -1.0 - 1e-9 <= cos_angle <= 1.0 + 1e-9:
        raise DomainError(
            f"sides (opp={opp}, adj={adj1},{adj2}) admit no angle: cos = {cos_angle}"
        )
    return math.acos(min(1.0, max(-1.0, cos_angle)))


def solve_sss(tri: Triangle) -> TriangleAngles:
    """Angles of the triangle realized on its surface, from sides alone."""
    a, b, c = tri.sides
    return TriangleAngles(
        _opposite_angle(a, b, c, tri.curvature),
        _opposite_angle(b, c, a, tri.curvature),
        _opposite_angle(c, a, b, tri.curvature),
    )


def solve_sas(b: float, c: float, alpha: float, curv: Curvature) -> float:
    """Side opposite the angle alpha included between sides b and c."""
    if not (b > 0.0 and c > 0.0):
        raise DomainError(f"SAS sides must be positive, got b={b}, c={c}")
    if not 0.0 < alpha < math.pi:
        raise DomainError(f"included angle must lie in (0, pi), got {alpha}")
    cap = curv.length_cap
    if max(b, c) >= cap:
        raise DomainError(f"side {max(b, c)} reaches the spherical cap {cap}")
    k = curv.kappa
    vb = gversine(b, curv)
    vc = gversine(c, curv)
    va = vb + vc - k * vb * vc - gsin(b, curv) * gsin(c, curv) * math.cos(alpha)
    return inv_gversine(va, curv)


def spherical_excess(tri: Triangle) -> float:
    """Angle sum minus pi; zero in the plane, positive on any sphere."""
    if tri.curvature.is_flat:
        return 0.0
    return math.fsum(solve_sss(tri)) - math.pi


def lhuilier_excess(tri: Triangle) -> float:
    """Independent excess evaluation via L'Huilier's half-angle formula."""
    if tri.curvature.is_flat:
        return 0.0
    sk = tri.curvature.sqrt_kappa
    a, b, c = (s * sk for s in tri.sides)
    s = 0.5 * (a + b + c)
    prod = (
        math.tan(0.5 * s)
        * math.tan(0.5 * (s - a))
        * math.tan(0.5 * (s - b))
        * math.tan(0.5 * (s - c))
    )
    return 4.0 * math.atan(math.sqrt(max(prod, 0.0)))


# ---------------------------------------------------------------------------
# Embedded points and headings
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SurfacePoint:
    """Embedded position: unit 3-vector on the sphere, 2-vector in the plane."""

    coords: np.ndarray
    curvature: Curvature

    def __post_init__(self):
        coords = np.asarray(self.coords, dtype=float)
        expected = 2 if self.curvature.is_flat else 3
        if coords.shape != (expected,):
            raise DomainError(
                f"point needs {expected} coordinates for kappa={self.curvature.kappa}"
            )
        if not self.curvature.is_flat:
            err = abs(np.linalg.norm(coords) - 1.0)
            if err > NORM_TOL:
                raise DomainError(f"spherical point off the unit sphere by {err}")
        coords.setflags(write=False)
        object.__setattr__(self, "coords", coords)

    def almost_equals(self, other: "SurfacePoint", tol: float = 1e-9) -> bool:
        return (
            self.curvature == other.curvature
            and bool(np.linalg.norm(self.coords - other.coords) <= tol)
        )


@dataclass(frozen=True)
class Heading:
    """Unit tangent vector anchored at a SurfacePoint."""

    point: SurfacePoint
    vec: np.ndarray

    def __post_init__(self):
        vec = np.asarray(self.vec, dtype=float)
        if vec.shape != self.point.coords.shape:
            raise DomainError("heading dimension does not match its base point")
        norm = np.linalg.norm(vec)
        if abs(norm - 1.0) > NORM_TOL:
            raise DomainError(f"heading must be unit length, off by {abs(norm - 1.0)}")
        if not self.point.curvature.is_flat:
            radial = float(np.dot(vec, self.point.coords))
            if abs(radial) > NORM_TOL:
                raise DomainError(f"heading not tangent to the sphere (p.v = {radial})")
        vec.setflags(write=False)
        object.__setattr__(self, "vec", vec)

    @property
    def curvature(self) -> Curvature:
        return self.point.curvature


def _renormalize(point_coords: np.ndarray, vec: np.ndarray, curv: Curvature):
    """Project drift out of an updated (point, tangent) pair."""
    if curv.is_flat:
        return point_coords, vec / np.linalg.norm(vec)
    p = point_coords / np.linalg.norm(point_coords)
    v = vec - np.dot(vec, p) * p
    return p, v / np.linalg.norm(v)


def canonical_start(curv: Curvature) -> Heading:
    """Deterministic origin and initial direction used by chain layouts."""
    if curv.is_flat:
        p = SurfacePoint(np.array([0.0, 0.0]), curv)
        return Heading(p, np.array([1.0, 0.0]))
    p = SurfacePoint(np.array([1.0, 0.0, 0.0]), curv)
    return Heading(p, np.array([0.0, 1.0, 0.0]))


def _require_same_curvature(*tags: Curvature) -> Curvature:
    first = tags[0]
    for t in tags[1:]:
        if t != first:
            raise CurvatureMismatch(f"mixed curvature tags: {first} vs {t}")
    return first


def geodesic_distance(p: SurfacePoint, q: SurfacePoint, curv: Curvature) -> float:
    """Length of the minimal geodesic between two embedded points."""
    _require_same_curvature(p.curvature, q.curvature, curv)
    if curv.is_flat:
        return float(np.linalg.norm(p.coords - q.coords))
    cross = np.linalg.norm(np.cross(p.coords, q.coords))
    dot = float(np.dot(p.coords, q.coords))
    return math.atan2(cross, dot) / curv.sqrt_kappa


def walk(p: SurfacePoint, h: Heading, dist: float, curv: Curvature) -> tuple[SurfacePoint, Heading]:
    """Advance along the geodesic through p in direction h for length dist.

    Returns the landing point together with the parallel-transported heading,
    so repeated walk/turn calls trace a chain.
    """
    _require_same_curvature(p.curvature, h.curvature, curv)
    if not h.point.almost_equals(p, tol=1e-9):
        raise CurvatureMismatch("heading is not anchored at the given point")
    if dist < 0.0:
        raise DomainError(f"walk distance must be nonnegative, got {dist}")
    if dist == 0.0:
        return p, h
    if curv.is_flat:
        q = SurfacePoint(p.coords + dist * h.vec, curv)
        return q, Heading(q, h.vec)
    if dist >= 2.0 * curv.length_cap:
        raise DomainError(f"walk distance {dist} wraps the whole sphere")
    t = curv.sqrt_kappa * dist
    qc = math.cos(t) * p.coords + math.sin(t) * h.vec
    vc = -math.sin(t) * p.coords + math.cos(t) * h.vec
    qc, vc = _renormalize(qc, vc, curv)
    q = SurfacePoint(qc, curv)
    return q, Heading(q, vc)


def rotate_tangent(p: SurfacePoint, vec: np.ndarray, angle: float) -> np.ndarray:
    """Rotate a tangent vector at p counterclockwise by angle."""
    if p.curvature.is_flat:
        c, s = math.cos(angle), math.sin(angle)
        x, y = vec
        return np.array([c * x - s * y, s * x + c * y])
    # Rodrigues rotation about the outward normal; vec is tangent so the
    # p*(p.vec) term vanishes.
    return math.cos(angle) * vec + math.sin(angle) * np.cross(p.coords, vec)


def turn(h: Heading, interior_angle: float) -> Heading:
    """Turn left through the exterior angle pi - interior_angle at a vertex.

    interior_angle = pi is the straight-vertex boundary case and leaves the
    heading unchanged; reflex values up to 2*pi turn rightward instead, so a
    turn pair (theta, 2*pi - theta) cancels exactly.
    """
    if not 0.0 < interior_angle < 2.0 * math.pi:
        raise DomainError(f"interior angle must lie in (0, 2*pi), got {interior_angle}")
    exterior = math.pi - interior_angle
    if exterior == 0.0:
        return h
    vec = rotate_tangent(h.point, h.vec, exterior)
    _, vec = _renormalize(h.point.coords, vec, h.curvature)
    return Heading(h.point, vec)


def tangent_toward(p: SurfacePoint, q: SurfacePoint) -> np.ndarray:
    """Unit tangent at p along the minimal geodesic toward q."""
    _require_same_curvature(p.curvature, q.curvature)
    if p.curvature.is_flat:
        d = q.coords - p.coords
        norm = np.linalg.norm(d)
        if norm == 0.0:
            raise DomainError("direction undefined for coincident points")
        return d / norm
    v = q.coords - np.dot(q.coords, p.coords) * p.coords
    norm = np.linalg.norm(v)
    if norm < 1e-14:
        raise DomainError("direction undefined for coincident or antipodal points")
    return v / norm


def signed_turn(p: SurfacePoint, incoming: np.ndarray, outgoing: np.ndarray) -> float:
    """Signed turning angle at p from one tangent direction to another.

    Positive turns are leftward (counterclockwise seen from outside the
    sphere, standard orientation in the plane); range (-pi, pi].
    """
    dot = float(np.dot(incoming, outgoing))
    if p.curvature.is_flat:
        cross = float(incoming[0] * outgoing[1] - incoming[1] * outgoing[0])
    else:
        cross = float(np.dot(p.coords, np.cross(incoming, outgoing)))
    return math.atan2(cross, dot)
