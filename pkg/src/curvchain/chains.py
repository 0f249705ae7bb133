"""Intrinsic convex chains and their realization on a surface.

A chain is a sequence of geodesic edges joined at vertices with prescribed
interior angles.  The intrinsic data (lengths and angles) is independent of
any surface; binding to a curvature happens when the chain is embedded,
measured, or tested for convexity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, EmbeddabilityError
from .kernel import (
    Curvature,
    Heading,
    SurfacePoint,
    canonical_start,
    geodesic_distance,
    signed_turn,
    strict_margin,
    tangent_toward,
    turn,
    walk,
)



@dataclass(frozen=True)
class ConvexChain:
    """Edge lengths e_1..e_n and interior vertex angles theta_1..theta_{n-1}.

    Stored chains require every angle strictly inside (0, pi); chains
    produced by arm opening may carry straight vertices (theta = pi), which
    is the boundary case of Cauchy's hypothesis.
    """

    edge_lengths: tuple[float, ...]
    interior_angles: tuple[float, ...]
    allow_straight: bool = field(default=False, compare=False)

    def __post_init__(self):
        lengths = tuple(float(x) for x in self.edge_lengths)
        angles = tuple(float(x) for x in self.interior_angles)
        object.__setattr__(self, "edge_lengths", lengths)
        object.__setattr__(self, "interior_angles", angles)
        if len(lengths) < 1:
            raise DomainError("a chain needs at least one edge")
        if len(angles) != len(lengths) - 1:
            raise DomainError(
                f"{len(lengths)} edges require {len(lengths) - 1} interior angles, "
                f"got {len(angles)}"
            )
        for e in lengths:
            if not (math.isfinite(e) and e > 0.0):
                raise DomainError(f"edge lengths must be positive, got {e}")
        for t in angles:
            if not math.isfinite(t) or t <= 0.0:
                raise DomainError(f"interior angles must be positive, got {t}")
            if t > math.pi or (t == math.pi and not self.allow_straight):
                raise DomainError(f"interior angle {t} exceeds the convex cap pi")

    @property
    def n_edges(self) -> int:
        return len(self.edge_lengths)

    @property
    def total_length(self) -> float:
        return math.fsum(self.edge_lengths)

    def check_budget(self, curv: Curvature) -> None:
        """Total length may not exceed pi/sqrt(kappa) when embedding on kappa > 0.

        Equality is admitted: a chain of total length exactly pi/sqrt(kappa)
        only reaches antipodal endpoints if it is completely straight, and
        straight vertices are excluded, so closing geodesics stay unique.
        """
        cap = curv.length_cap
        if self.total_length > cap:
            raise EmbeddabilityError(
                f"chain length {self.total_length} exceeds the embeddability "
                f"budget pi/sqrt(kappa) = {cap}"
            )


@dataclass(frozen=True)
class EmbeddedChain:
    """A chain realized on a surface as a list of vertices."""

    vertices: tuple[SurfacePoint, ...]
    curvature: Curvature
    source: ConvexChain


def embed(chain: ConvexChain, curv: Curvature, start: Heading | None = None) -> EmbeddedChain:
    """Realize the chain on the surface, starting from a point and heading.

    The default start is the canonical origin; passing one explicitly is how
    isometry invariance gets exercised.
    """
    chain.check_budget(curv)
    h = canonical_start(curv) if start is None else start
    if h.curvature != curv:
        raise EmbeddabilityError("start heading lives on a different surface")
    vertices = [h.point]
    for i, e in enumerate(chain.edge_lengths):
        p, h = walk(h.point, h, e, curv)
        vertices.append(p)
        if i < len(chain.interior_angles):
            h = turn(h, chain.interior_angles[i])
    return EmbeddedChain(tuple(vertices), curv, chain)


def endpoint_distance(chain: ConvexChain, curv: Curvature) -> float:
    """Geodesic distance between the first and last chain vertices."""
    emb = embed(chain, curv)
    return geodesic_distance(emb.vertices[0], emb.vertices[-1], curv)


def measured_angles(emb: EmbeddedChain) -> list[float]:
    """Interior angles recovered from embedded vertex positions."""
    out = []
    vs = emb.vertices
    for i in range(1, len(vs) - 1):
        into = tangent_toward(vs[i], vs[i - 1])
        outof = tangent_toward(vs[i], vs[i + 1])
        cosang = float(np.clip(np.dot(into, outof), -1.0, 1.0))
        out.append(math.acos(cosang))
    return out


def _closed_polygon_turns(emb: EmbeddedChain) -> list[float]:
    """Signed turning angles of the polygon obtained by closing the chain."""
    vs = emb.vertices
    v0, vn = vs[0], vs[-1]
    closing = geodesic_distance(v0, vn, emb.curvature)
    if closing < 1e-12:
        raise EmbeddabilityError("closing edge degenerates: endpoints coincide")
    turns = []
    m = len(vs)
    for i in range(m):
        prev_v = vs[i - 1] if i > 0 else vn
        next_v = vs[i + 1] if i < m - 1 else v0
        incoming = tangent_toward(vs[i], prev_v)  # reversed below
        outgoing = tangent_toward(vs[i], next_v)
        turns.append(signed_turn(vs[i], -incoming, outgoing))
    return turns


def is_convex(chain: ConvexChain, curv: Curvature) -> bool:
    """Whether closing the chain with the edge v0-vn yields a convex polygon.

    All turning angles of the closed polygon (the two closure vertices
    included) must be strictly leftward and strictly short of a full reversal,
    and the total turning must not exceed one revolution, which rules out
    star-shaped windings.
    """
    chain.check_budget(curv)
    emb = embed(chain, curv)
    try:
        turns = _closed_polygon_turns(emb)
    except EmbeddabilityError:
        return False
    margin = strict_margin(chain.total_length)
    if any(not margin < t < math.pi - margin for t in turns):
        return False
    return math.fsum(turns) <= 2.0 * math.pi + 1e-9


def open_arm(chain: ConvexChain, increments) -> ConvexChain:
    """Increase a nonempty subset of the interior angles, lengths fixed.

    Increments may push an angle exactly to pi (a straightened vertex is the
    boundary case the arm lemma still covers); the result is returned with
    straight vertices permitted.
    """
    incs = tuple(float(x) for x in increments)
    if len(incs) != len(chain.interior_angles):
        raise DomainError(
            f"expected {len(chain.interior_angles)} increments, got {len(incs)}"
        )
    if any(x < 0.0 for x in incs):
        raise DomainError("increments must be nonnegative")
    if all(x == 0.0 for x in incs):
        raise DomainError("at least one increment must be positive")
    opened = []
    for theta, inc in zip(chain.interior_angles, incs):
        new = theta + inc
        if new > math.pi:
            # Re-straightening a vertex whose stored angle is pi up to
            # rounding may overshoot by an ulp; anything larger is a real
            # cap violation.
            if new > math.pi + 1e-9:
                raise DomainError(f"opening angle {theta} by {inc} exceeds the cap pi")
            new = math.pi
        opened.append(new)
    return ConvexChain(chain.edge_lengths, tuple(opened), allow_straight=True)
