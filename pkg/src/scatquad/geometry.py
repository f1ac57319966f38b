"""Planar domains, membership tests, and Halton point generation.

Domains are compact regions described by a bounding box plus a closed
membership predicate: axis-aligned rectangles, disks, and disk differences
(annuli and lunes).  Scattered samples live in :class:`PointSet`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .errors import EmptyResult


@dataclass(frozen=True)
class Rectangle:
    """Closed axis-aligned rectangle ``[ax, bx] x [ay, by]``."""

    ax: float
    bx: float
    ay: float
    by: float

    def __post_init__(self):
        if not np.all(np.isfinite([self.ax, self.bx, self.ay, self.by])):
            raise ValueError("rectangle bounds must be finite")
        if not (self.ax < self.bx and self.ay < self.by):
            raise ValueError("rectangle requires ax < bx and ay < by")

    @property
    def center(self) -> np.ndarray:
        return np.array([0.5 * (self.ax + self.bx), 0.5 * (self.ay + self.by)])

    @property
    def half_diagonal(self) -> float:
        return 0.5 * float(np.hypot(self.bx - self.ax, self.by - self.ay))

    @property
    def area(self) -> float:
        return (self.bx - self.ax) * (self.by - self.ay)


@dataclass(frozen=True)
class Disk:
    """Closed disk of radius ``r`` centered at ``(cx, cy)``."""

    cx: float
    cy: float
    r: float

    def __post_init__(self):
        if not np.all(np.isfinite([self.cx, self.cy, self.r])):
            raise ValueError("disk parameters must be finite")
        if self.r <= 0.0:
            raise ValueError("disk radius must be positive")


@dataclass(frozen=True)
class DiskDifference:
    """Outer disk with the open inner disk removed.

    Points strictly inside the inner disk are excluded; points on the inner
    circle still belong to the region.  The inner disk may overlap the outer
    boundary (a lune) or sit strictly inside (an annulus); the only
    requirement is a nonempty result.
    """

    outer: Disk
    inner: Disk

    def __post_init__(self):
        dist = float(np.hypot(self.outer.cx - self.inner.cx, self.outer.cy - self.inner.cy))
        if dist + self.outer.r <= self.inner.r:
            raise ValueError("inner disk swallows the outer disk: empty region")


Domain = Union[Rectangle, Disk, DiskDifference]


def bbox(domain: Domain) -> Rectangle:
    """Bounding rectangle of a domain."""
    if isinstance(domain, Rectangle):
        return domain
    if isinstance(domain, Disk):
        return Rectangle(domain.cx - domain.r, domain.cx + domain.r,
                         domain.cy - domain.r, domain.cy + domain.r)
    if isinstance(domain, DiskDifference):
        return bbox(domain.outer)
    raise TypeError(f"not a domain: {domain!r}")


def contains_many(domain: Domain, points) -> np.ndarray:
    """Vectorized closed membership test; returns a boolean array."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if isinstance(domain, Rectangle):
        x, y = pts[:, 0], pts[:, 1]
        return (x >= domain.ax) & (x <= domain.bx) & (y >= domain.ay) & (y <= domain.by)
    if isinstance(domain, Disk):
        d2 = (pts[:, 0] - domain.cx) ** 2 + (pts[:, 1] - domain.cy) ** 2
        return d2 <= domain.r ** 2
    if isinstance(domain, DiskDifference):
        inner = domain.inner
        d2 = (pts[:, 0] - inner.cx) ** 2 + (pts[:, 1] - inner.cy) ** 2
        return contains_many(domain.outer, pts) & ~(d2 < inner.r ** 2)
    raise TypeError(f"not a domain: {domain!r}")


def contains(domain: Domain, p) -> bool:
    """Closed membership test for a single point."""
    return bool(contains_many(domain, np.asarray(p, dtype=float).reshape(1, 2))[0])


def boundary_distance(domain: Domain, points) -> np.ndarray:
    """Distance from each point to the domain boundary (points assumed inside)."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if isinstance(domain, Rectangle):
        return np.minimum.reduce([pts[:, 0] - domain.ax, domain.bx - pts[:, 0],
                                  pts[:, 1] - domain.ay, domain.by - pts[:, 1]])
    if isinstance(domain, Disk):
        d = np.hypot(pts[:, 0] - domain.cx, pts[:, 1] - domain.cy)
        return domain.r - d
    if isinstance(domain, DiskDifference):
        outer = boundary_distance(domain.outer, pts)
        d_in = np.hypot(pts[:, 0] - domain.inner.cx, pts[:, 1] - domain.inner.cy)
        return np.minimum(outer, d_in - domain.inner.r)
    raise TypeError(f"not a domain: {domain!r}")


@dataclass(frozen=True)
class PointSet:
    """Ordered scattered points in the plane, optionally with sample values.

    Points must be finite and pairwise distinct; ``values``, when present,
    is aligned with ``points``.
    """

    points: np.ndarray
    values: Optional[np.ndarray] = None

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 1:
            raise ValueError("points must have shape (N, 2) with N >= 1")
        if not np.all(np.isfinite(pts)):
            raise ValueError("points must be finite")
        if len(np.unique(pts, axis=0)) != len(pts):
            raise ValueError("points must be pairwise distinct")
        object.__setattr__(self, "points", pts)
        if self.values is not None:
            vals = np.asarray(self.values, dtype=float).ravel()
            if vals.shape[0] != pts.shape[0]:
                raise ValueError("values must align with points")
            object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return self.points.shape[0]

    def with_values(self, values) -> "PointSet":
        return PointSet(self.points, values)


def _radical_inverse(i: int, base: int) -> float:
    inv = 0.0
    scale = 1.0 / base
    while i > 0:
        i, digit = divmod(i, base)
        inv += digit * scale
        scale /= base
    return inv


def halton(n_points: int, skip: int = 0) -> PointSet:
    """First ``n_points`` terms of the 2-D Halton sequence (bases 2 and 3).

    Term ``i`` is ``(H_2(i), H_3(i))`` for ``i = skip+1, ..., skip+n_points``,
    where ``H_b`` is the base-``b`` radical inverse.  Deterministic.
    """
    if n_points < 1:
        raise ValueError("n_points must be >= 1")
    if skip < 0:
        raise ValueError("skip must be >= 0")
    pts = np.empty((n_points, 2))
    for j in range(n_points):
        i = skip + 1 + j
        pts[j, 0] = _radical_inverse(i, 2)
        pts[j, 1] = _radical_inverse(i, 3)
    return PointSet(pts)


def filter_to_domain(candidates: PointSet, domain: Domain) -> PointSet:
    """Subsequence of ``candidates`` inside ``domain``, order preserved.

    Raises :class:`EmptyResult` if no point survives.
    """
    mask = contains_many(domain, candidates.points)
    if not mask.any():
        raise EmptyResult("no candidate point lies in the domain")
    vals = candidates.values[mask] if candidates.values is not None else None
    return PointSet(candidates.points[mask], vals)


def map_to_bbox(unit_points: PointSet, domain: Domain) -> PointSet:
    """Affinely map points from the unit square onto the domain bounding box."""
    pts = unit_points.points
    if pts.min() < 0.0 or pts.max() > 1.0:
        raise ValueError("input points must lie in the unit square")
    rect = bbox(domain)
    mapped = np.column_stack([rect.ax + pts[:, 0] * (rect.bx - rect.ax),
                              rect.ay + pts[:, 1] * (rect.by - rect.ay)])
    return PointSet(mapped, unit_points.values)


def parse_domain(spec: str) -> Domain:
    """Parse a CLI domain string.

    Formats: ``rect:ax,bx,ay,by``, ``disk:cx,cy,r``,
    ``diskdiff:cx1,cy1,r1,cx2,cy2,r2`` (outer disk first).
    """
    kind, _, rest = spec.partition(":")
    try:
        nums = [float(tok) for tok in rest.split(",")] if rest else []
    except ValueError as exc:
        raise ValueError(f"bad domain spec {spec!r}: {exc}") from None
    if kind == "rect" and len(nums) == 4:
        return Rectangle(*nums)
    if kind == "disk" and len(nums) == 3:
        return Disk(*nums)
    if kind == "diskdiff" and len(nums) == 6:
        return DiskDifference(Disk(*nums[:3]), Disk(*nums[3:]))
    raise ValueError(f"bad domain spec {spec!r}")
