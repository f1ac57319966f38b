"""Partition-of-unity RBF interpolation with per-patch (epsilon, delta) search.

The domain bounding box is tiled by a grid of overlapping balls; each patch
fits its own strictly positive definite RBF interpolant, with shape
parameter and patch radius chosen jointly by the leave-one-out cost.
Local fits are blended by Shepard-normalized Wendland bumps.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.linalg import LinAlgWarning

from .errors import AllCandidatesFailed, CoverageFailure, DegenerateDiagonal, UncoveredPoint
from .geometry import Domain, PointSet, bbox, contains_many
from .rbf import (KernelSpec, RbfInterpolant, default_epsilon_grid, evaluate,
                  fit_global, kernel_eval, loocv_cost, rippa_errors)

SPD_FAMILIES = ("ga", "imq", "w2")
DEFAULT_DELTA_MULTIPLIERS = (1.0, 1.25, 1.5, 2.0)
DEFAULT_OVERLAP = 1.25
MIN_PATCH_POINTS = 3
INTERP_RESIDUAL_FACTOR = 1e-8


@dataclass
class PumCover:
    """Grid-of-balls cover: centers, the base radius, and per-patch radii."""

    centers: np.ndarray
    delta0: float
    radii: np.ndarray

    @property
    def n_patches(self) -> int:
        return self.centers.shape[0]

    def members(self, points: np.ndarray, j: int, radius: Optional[float] = None) -> np.ndarray:
        """Indices of ``points`` inside patch j's ball."""
        r = self.radii[j] if radius is None else radius
        d2 = np.sum((points - self.centers[j]) ** 2, axis=1)
        return np.flatnonzero(d2 <= r * r)


def build_cover(domain: Domain, data: PointSet, points_per_patch_target: int = 25,
                overlap: float = DEFAULT_OVERLAP) -> PumCover:
    """Cover the domain with a ceil(sqrt(N/target)) per-axis grid of balls.

    The base radius is ``overlap`` times the half-diagonal of a grid cell,
    so every bounding-box point is covered as long as its cell center is
    kept; centers are kept when they lie in the domain or hold at least one
    data point within the base radius.  Patch radii grow where needed so
    every patch holds at least 3 data points.
    """
    n = len(data)
    if points_per_patch_target < MIN_PATCH_POINTS:
        raise ValueError(f"target must be >= {MIN_PATCH_POINTS}")
    if n < points_per_patch_target:
        raise ValueError("need at least points_per_patch_target data points")
    rect = bbox(domain)
    per_axis = math.ceil(math.sqrt(n / points_per_patch_target))
    sx = (rect.bx - rect.ax) / per_axis
    sy = (rect.by - rect.ay) / per_axis
    delta0 = overlap * 0.5 * math.hypot(sx, sy)
    ix, iy = np.meshgrid(np.arange(per_axis), np.arange(per_axis), indexing="ij")
    centers = np.column_stack([rect.ax + (ix.ravel() + 0.5) * sx,
                               rect.ay + (iy.ravel() + 0.5) * sy])
    keep = contains_many(domain, centers)
    for j in np.flatnonzero(~keep):
        d2 = np.sum((data.points - centers[j]) ** 2, axis=1)
        if d2.min() <= delta0 * delta0:
            keep[j] = True
    centers = centers[keep]
    radii = np.full(centers.shape[0], delta0)
    for j in range(centers.shape[0]):
        d = np.sort(np.sqrt(np.sum((data.points - centers[j]) ** 2, axis=1)))
        if d[MIN_PATCH_POINTS - 1] > radii[j]:
            radii[j] = d[MIN_PATCH_POINTS - 1] * (1.0 + 1e-12)
    cover = PumCover(centers=centers, delta0=delta0, radii=radii)
    uncovered = _uncovered(cover, data.points)
    if uncovered.size:
        raise CoverageFailure(f"data point {uncovered[0]} is outside every patch ball")
    return cover


def _uncovered(cover: PumCover, points: np.ndarray) -> np.ndarray:
    d2 = np.sum((points[:, None, :] - cover.centers[None, :, :]) ** 2, axis=2)
    return np.flatnonzero(~np.any(d2 <= cover.radii ** 2, axis=1))


def pu_weights(cover: PumCover, p) -> tuple[np.ndarray, np.ndarray]:
    """Shepard-normalized Wendland bump weights at one point.

    Returns (patch indices, weights); weights are positive and sum to one.
    Raises :class:`UncoveredPoint` when every bump vanishes.
    """
    q = np.asarray(p, dtype=float).ravel()
    dist = np.sqrt(np.sum((cover.centers - q) ** 2, axis=1))
    inside = np.flatnonzero(dist <= cover.radii)
    if inside.size == 0:
        raise UncoveredPoint(q)
    bump = KernelSpec("w2", 1.0)
    w = kernel_eval(bump, dist[inside] / cover.radii[inside])
    total = w.sum()
    if total <= 0.0:
        raise UncoveredPoint(q)
    return inside, w / total


def bloocv_select(data: PointSet, center, base_radius: float, family: str,
                  epsilon_grid: Optional[Sequence[float]] = None,
                  delta_multipliers: Sequence[float] = DEFAULT_DELTA_MULTIPLIERS,
                  ) -> tuple[float, float, float]:
    """Joint (epsilon, delta) search for one patch by the leave-one-out cost.

    Enlarging delta changes the patch membership, so each multiplier refits
    from scratch.  Returns (epsilon, delta, cost); ties resolve to the
    smaller delta, then the smaller epsilon.  Raises
    :class:`AllCandidatesFailed` when every pair degenerates.
    """
    if family not in SPD_FAMILIES:
        raise ValueError(f"partition-of-unity kernels must be SPD, got {family!r}")
    eps_grid = default_epsilon_grid() if epsilon_grid is None else np.asarray(epsilon_grid, float)
    if eps_grid.size == 0 or len(delta_multipliers) == 0:
        raise ValueError("grids must be nonempty")
    c = np.asarray(center, dtype=float).ravel()
    d2 = np.sum((data.points - c) ** 2, axis=1)
    best = None
    best_loose = None
    for mult in sorted(delta_multipliers):
        delta = mult * base_radius
        idx = np.flatnonzero(d2 <= delta * delta)
        if idx.size < MIN_PATCH_POINTS:
            continue
        local = PointSet(data.points[idx], data.values[idx])
        interp_tol = INTERP_RESIDUAL_FACTOR * (1.0 + float(np.max(np.abs(local.values))))
        for eps in eps_grid:
            try:
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore", LinAlgWarning)
                    fit = fit_global(local, KernelSpec(family, float(eps)))
                cost = loocv_cost(rippa_errors(fit))
            except (np.linalg.LinAlgError, DegenerateDiagonal):
                continue
            if not np.isfinite(cost):
                continue
            if best_loose is None or cost < best_loose[2]:
                best_loose = (float(eps), float(delta), cost)
            # A local fit that fails to interpolate its own patch data is
            # unusable regardless of its leave-one-out score.
            if fit.residual > interp_tol:
                continue
            if best is None or cost < best[2]:
                best = (float(eps), float(delta), cost)
    if best is None:
        best = best_loose
    if best is None:
        raise AllCandidatesFailed("no (epsilon, delta) pair produced a usable fit")
    return best


@dataclass
class PumInterpolant:
    """Blended local RBF fits; immutable and concurrently evaluable."""

    cover: PumCover
    fits: list[RbfInterpolant]
    selected: list[tuple[float, float]]
    member_indices: list[np.ndarray]

    def __call__(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        out = np.empty(pts.shape[0])
        for i, p in enumerate(pts):
            out[i] = eval_pum(self, p)
        return out if np.asarray(points).ndim == 2 else float(out[0])


def fit_pum(data: PointSet, domain: Domain, family: str = "ga",
            epsilon_grid: Optional[Sequence[float]] = None,
            delta_multipliers: Sequence[float] = DEFAULT_DELTA_MULTIPLIERS,
            points_per_patch_target: int = 25,
            eval_points=None) -> PumInterpolant:
    """Build the cover, run the per-patch (epsilon, delta) search, fit.

    When ``eval_points`` is given (e.g. the cubature nodes the interpolant
    will be queried at), the cover's overlap factor is grown until every
    one of them is covered.
    """
    if data.values is None:
        raise ValueError("data must carry sample values")
    overlap = DEFAULT_OVERLAP
    cover = build_cover(domain, data, points_per_patch_target, overlap)
    if eval_points is not None:
        pts = np.atleast_2d(np.asarray(eval_points, dtype=float))
        for _ in range(8):
            if _uncovered(cover, pts).size == 0:
                break
            overlap *= 1.25
            cover = build_cover(domain, data, points_per_patch_target, overlap)
        else:
            raise CoverageFailure("evaluation points remain uncovered at maximum overlap")
    fits: list[RbfInterpolant] = []
    selected: list[tuple[float, float]] = []
    members: list[np.ndarray] = []
    radii = cover.radii.copy()
    for j in range(cover.n_patches):
        eps, delta, _ = bloocv_select(data, cover.centers[j], cover.radii[j],
                                      family, epsilon_grid, delta_multipliers)
        radii[j] = delta
        idx = cover.members(data.points, j, delta)
        local = PointSet(data.points[idx], data.values[idx])
        fits.append(fit_global(local, KernelSpec(family, eps)))
        selected.append((eps, delta))
        members.append(idx)
    cover.radii = radii
    return PumInterpolant(cover=cover, fits=fits, selected=selected,
                          member_indices=members)


def eval_pum(interp: PumInterpolant, p) -> float:
    """Weighted sum of the covering local fits at one point."""
    idx, w = pu_weights(interp.cover, p)
    q = np.asarray(p, dtype=float).reshape(1, 2)
    local_vals = np.array([evaluate(interp.fits[j], q)[0] for j in idx])
    return float(w @ local_vals)
