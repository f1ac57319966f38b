"""Adaptive moving polynomial interpolation.

Every evaluation point gets its own local interpolant: neighborhoods grow
with the candidate degree through a k-nearest-neighbor radius, local nodes
are discrete Leja points, and the returned degree minimizes a successive
degree-difference estimate of the pointwise error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.spatial import cKDTree

from .errors import InsufficientData, RankDeficient
from .geometry import Domain, PointSet, contains_many
from .poly import (DEFAULT_RANK_TOL, leja_select, lebesgue_at_center,
                   nested_center_values, poly_space_dim)


@dataclass(frozen=True)
class MovingInterpConfig:
    """Knobs of the adaptive schedule.

    ``theta`` is the oversampling factor: the degree-d neighborhood is the
    smallest ball holding ceil(theta * m_d) data points.
    """

    d_max: int = 10
    theta: float = 2.0
    rank_tol: float = DEFAULT_RANK_TOL

    def __post_init__(self):
        if self.d_max < 1:
            raise ValueError("d_max must be >= 1")
        if self.theta < 1.0:
            raise ValueError("theta must be >= 1")


@dataclass(frozen=True)
class MovingEvaluation:
    """One adaptive evaluation: value, error estimate, and chosen scales."""

    value: float
    estimate: float
    chosen_degree: int
    chosen_radius: float
    lebesgue: float


class MovingInterpolant:
    """Adaptive local polynomial evaluator over a fixed scattered sample.

    Stateless per call apart from the shared k-d tree; safe for concurrent
    evaluation.
    """

    def __init__(self, data: PointSet, domain: Domain,
                 config: Optional[MovingInterpConfig] = None):
        if data.values is None:
            raise ValueError("data must carry sample values")
        inside = contains_many(domain, data.points)
        if not inside.all():
            data = PointSet(data.points[inside], data.values[inside])
        if len(data) < 3:
            raise InsufficientData("moving interpolation needs at least 3 data points")
        self.data = data
        self.domain = domain
        self.config = config or MovingInterpConfig()
        self._tree = cKDTree(data.points)

    def _candidate_degrees(self) -> list[int]:
        n = len(self.data)
        cfg = self.config
        degrees = [d for d in range(1, cfg.d_max + 1)
                   if math.ceil(cfg.theta * poly_space_dim(d)) <= n]
        # With 3 <= N < ceil(theta*3) no degree passes the oversampling
        # test; fall back to degree 1 on the whole sample.
        return degrees or [1]

    def evaluate(self, pbar) -> MovingEvaluation:
        """Adaptive evaluation at one point: scan degrees, keep the one with
        the smallest successive-difference estimate (ties to the smaller
        degree)."""
        p = np.asarray(pbar, dtype=float).ravel()
        n = len(self.data)
        cfg = self.config
        best = None
        best_seq = None
        last_failure: Exception | None = None
        for d in self._candidate_degrees():
            k = min(n, math.ceil(cfg.theta * poly_space_dim(d)))
            dists, idx = self._tree.query(p, k=k)
            dists, idx = np.atleast_1d(dists), np.atleast_1d(idx)
            h = float(dists[-1])
            try:
                seq = leja_select(self.data.points[idx], p, h, d, cfg.rank_tol)
            except RankDeficient as exc:
                last_failure = exc
                continue
            vals = self.data.values[idx][seq.selected]
            center_values = nested_center_values(seq, vals)
            estimate = abs(center_values[d] - center_values[d - 1])
            if best is None or estimate < best[0]:
                best = (estimate, float(center_values[d]), d, h)
                best_seq = seq
        if best is None:
            raise RankDeficient(0, f"every candidate degree failed: {last_failure}")
        estimate, value, d_star, h_star = best
        return MovingEvaluation(value=value, estimate=estimate,
                                chosen_degree=d_star, chosen_radius=h_star,
                                lebesgue=lebesgue_at_center(best_seq, d_star))

    def __call__(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        out = np.array([self.evaluate(p).value for p in pts])
        return out if np.asarray(points).ndim == 2 else float(out[0])


def evaluate_moving(data: PointSet, domain: Domain, pbar,
                    config: Optional[MovingInterpConfig] = None) -> MovingEvaluation:
    """One-shot adaptive evaluation (builds the search tree each call)."""
    return MovingInterpolant(data, domain, config).evaluate(pbar)


def interpolate_fixed_ball(data: PointSet, pbar, degree: int, radius: float,
                           rank_tol: float = DEFAULT_RANK_TOL) -> float:
    """Non-adaptive variant: interpolate at fixed degree on the data inside
    a fixed ball around ``pbar``.  Used for convergence-order studies."""
    if data.values is None:
        raise ValueError("data must carry sample values")
    p = np.asarray(pbar, dtype=float).ravel()
    d2 = np.sum((data.points - p) ** 2, axis=1)
    mask = d2 <= radius * radius
    m = poly_space_dim(degree)
    if mask.sum() < m:
        raise InsufficientData(
            f"ball of radius {radius} holds {int(mask.sum())} points, need {m}")
    seq = leja_select(data.points[mask], p, radius, degree, rank_tol)
    values = data.values[mask][seq.selected]
    return float(nested_center_values(seq, values)[degree])


def pointwise_bound(lebesgue: float, lipschitz_seminorm: float,
                    radius: float, degree: int) -> float:
    """A-priori pointwise bound: lambda * 2^d/(d-1)! * |f|_{C^{d,1}} * h^{d+1}."""
    if degree < 1:
        raise ValueError("degree must be >= 1")
    if min(lebesgue, lipschitz_seminorm, radius) < 0:
        raise ValueError("inputs must be nonnegative")
    factor = 2.0 ** degree / math.factorial(degree - 1)
    return lebesgue * factor * lipschitz_seminorm * radius ** (degree + 1)
