"""Multinode Shepard interpolation.

Each data point seeds a local unisolvent subset of m_d nodes (Leja-selected
from its nearest neighbors), carrying a degree-d polynomial in the scaled
Taylor basis at the subset barycenter.  Local polynomials are blended with
weights proportional to the product of inverse distances to the subset
nodes raised to the power mu; the weights form a partition of unity and the
blend interpolates at every data point and reproduces degree-d polynomials.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.spatial import cKDTree

from .errors import CoverFailure, InsufficientData, MuTooSmall, NodeHit, RankDeficient
from .geometry import PointSet
from .poly import DEFAULT_RANK_TOL, leja_select, poly_space_dim, multi_indices, vandermonde

DEFAULT_MU = 2.0


def mu_threshold(s: int, d: int) -> float:
    """Smallest admissible blending exponent, (s+d+1) / dim P_d."""
    if s != 2:
        raise ValueError("only the planar case s=2 is supported")
    if d < 0:
        raise ValueError("degree must be >= 0")
    return (s + d + 1) / poly_space_dim(d)


@dataclass(frozen=True)
class ShepardCover:
    """Deduplicated family of unisolvent m_d-subsets covering the data."""

    degree: int
    points: np.ndarray
    subsets: np.ndarray
    barycenters: np.ndarray
    scales: np.ndarray

    @property
    def n_subsets(self) -> int:
        return self.subsets.shape[0]


def _select_subset(points: np.ndarray, cand_idx: np.ndarray, seed: int,
                   d: int, rank_tol: float) -> np.ndarray:
    """Leja-select an m_d subset from candidates, forcing the seed in."""
    cand = points[cand_idx]
    bary = cand.mean(axis=0)
    scale = float(np.sqrt(np.max(np.sum((cand - bary) ** 2, axis=1))))
    seq = leja_select(cand, bary, scale, d, rank_tol)
    chosen = cand_idx[seq.selected]
    if seed not in chosen:
        chosen = chosen.copy()
        chosen[-1] = seed
        _verify_unisolvent(points, chosen, d, rank_tol)
    return np.sort(chosen)


def _verify_unisolvent(points: np.ndarray, subset: np.ndarray, d: int,
                       rank_tol: float) -> None:
    sub = points[subset]
    bary = sub.mean(axis=0)
    scale = float(np.sqrt(np.max(np.sum((sub - bary) ** 2, axis=1))))
    leja_select(sub, bary, scale, d, rank_tol)


def build_ms_cover(data: PointSet, d: int, q: Optional[int] = None,
                   rank_tol: float = DEFAULT_RANK_TOL) -> ShepardCover:
    """One unisolvent subset per data point from its m_d + q nearest points.

    A rank-deficient candidate pool is retried with q doubled, up to four
    times; identical subsets are deduplicated.  Raises
    :class:`CoverFailure` when some seed admits no unisolvent subset.
    """
    m = poly_space_dim(d)
    if q is None:
        q = m
    if q < 1:
        raise ValueError("q must be >= 1")
    n = len(data)
    if n < m + q:
        raise InsufficientData(f"need >= {m + q} points for degree {d} with q={q}")
    pts = data.points
    tree = cKDTree(pts)
    seen: set[tuple] = set()
    subsets = []
    for i in range(n):
        qq = q
        subset = None
        for _ in range(5):
            k = min(n, m + qq)
            _, idx = tree.query(pts[i], k=k)
            idx = np.atleast_1d(idx)
            try:
                subset = _select_subset(pts, idx, i, d, rank_tol)
                break
            except RankDeficient:
                if k == n:
                    break
                qq *= 2
        if subset is None:
            raise CoverFailure(f"no unisolvent subset of degree {d} around point {i}")
        key = tuple(subset.tolist())
        if key not in seen:
            seen.add(key)
            subsets.append(subset)
    subsets_arr = np.asarray(subsets, dtype=int)
    barys = pts[subsets_arr].mean(axis=1)
    diffs = pts[subsets_arr] - barys[:, None, :]
    scales = np.sqrt(np.max(np.sum(diffs ** 2, axis=2), axis=1))
    return ShepardCover(degree=d, points=pts, subsets=subsets_arr,
                        barycenters=barys, scales=scales)


def _default_node_tol(points: np.ndarray) -> float:
    span = points.max(axis=0) - points.min(axis=0)
    return 1e-12 * float(np.hypot(span[0], span[1]))


def ms_weights(cover: ShepardCover, mu: float, p,
               node_tol: Optional[float] = None) -> np.ndarray:
    """Normalized inverse-distance-product weights over all subsets.

    Computed in log space so the products neither overflow nor underflow.
    Raises :class:`NodeHit` within ``node_tol`` of a data point; the
    evaluator branches to the exact data value there.
    """
    if mu <= 0.0:
        raise ValueError("mu must be positive")
    tol = _default_node_tol(cover.points) if node_tol is None else node_tol
    q = np.asarray(p, dtype=float).ravel()
    dist = np.sqrt(np.sum((cover.points - q) ** 2, axis=1))
    if dist.min() < tol:
        raise NodeHit(f"point within {tol} of data point {int(np.argmin(dist))}")
    logd = np.log(dist)
    log_w = -mu * logd[cover.subsets].sum(axis=1)
    log_w -= log_w.max()
    w = np.exp(log_w)
    return w / w.sum()


@dataclass(frozen=True)
class MsInterpolant:
    """Fitted Multinode Shepard blend; immutable and concurrently evaluable."""

    cover: ShepardCover
    mu: float
    local_coefficients: np.ndarray
    values: np.ndarray
    node_tol: float
    max_node_residual: float

    def __call__(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        out = np.empty(pts.shape[0])
        for start in range(0, pts.shape[0], 256):
            chunk = pts[start:start + 256]
            out[start:start + 256] = _eval_chunk(self, chunk)
        return out if np.asarray(points).ndim == 2 else float(out[0])


def fit_ms(data: PointSet, d: int, mu: float = DEFAULT_MU,
           q: Optional[int] = None, rank_tol: float = DEFAULT_RANK_TOL) -> MsInterpolant:
    """Build the cover and solve every local interpolation system.

    ``mu`` must strictly exceed the convergence threshold.  Each local
    Vandermonde solve gets one step of iterative refinement, which keeps
    node residuals near roundoff even at degree 9.
    """
    if data.values is None:
        raise ValueError("data must carry sample values")
    if mu <= mu_threshold(2, d):
        raise MuTooSmall(f"mu={mu} must exceed {mu_threshold(2, d)} for degree {d}")
    cover = build_ms_cover(data, d, q, rank_tol)
    m = poly_space_dim(d)
    coeffs = np.empty((cover.n_subsets, m))
    max_res = 0.0
    for j in range(cover.n_subsets):
        sub = cover.points[cover.subsets[j]]
        V = vandermonde(sub, cover.barycenters[j], cover.scales[j], d)
        f = data.values[cover.subsets[j]]
        a = np.linalg.solve(V, f)
        a += np.linalg.solve(V, f - V @ a)
        coeffs[j] = a
        max_res = max(max_res, float(np.max(np.abs(V @ a - f))))
    return MsInterpolant(cover=cover, mu=mu, local_coefficients=coeffs,
                         values=data.values.copy(),
                         node_tol=_default_node_tol(data.points),
                         max_node_residual=max_res)


def _eval_chunk(interp: MsInterpolant, chunk: np.ndarray) -> np.ndarray:
    cover = interp.cover
    diff = chunk[:, None, :] - cover.points[None, :, :]
    dist = np.sqrt(np.sum(diff ** 2, axis=2))
    out = np.empty(chunk.shape[0])
    nearest = dist.min(axis=1)
    hit = nearest < interp.node_tol
    for i in np.flatnonzero(hit):
        out[i] = interp.values[int(np.argmin(dist[i]))]
    free = np.flatnonzero(~hit)
    if free.size == 0:
        return out
    logd = np.log(dist[free])
    log_w = -interp.mu * logd[:, cover.subsets].sum(axis=2)
    log_w -= log_w.max(axis=1, keepdims=True)
    w = np.exp(log_w)
    w /= w.sum(axis=1, keepdims=True)
    # Only subsets with nonvanishing weight somewhere in the chunk need
    # their polynomial evaluated.
    active = np.flatnonzero(w.max(axis=0) > 0.0)
    alpha = multi_indices(cover.degree)
    vals = np.zeros((free.size, active.size))
    for col, j in enumerate(active):
        u = (chunk[free] - cover.barycenters[j]) / cover.scales[j]
        basis = u[:, 0:1] ** alpha[:, 0] * u[:, 1:2] ** alpha[:, 1]
        vals[:, col] = basis @ interp.local_coefficients[j]
    out[free] = np.sum(w[:, active] * vals, axis=1)
    return out


def eval_ms(interp: MsInterpolant, p) -> float:
    """Blend local polynomial values; exactly the data value at a data point."""
    return float(interp(np.asarray(p, dtype=float).reshape(1, 2))[0])
