"""The cubature engine: resample an interpolant at the nodes of a PI rule.

The integral of f is approximated by applying a known positive-interior
rule to interpolant values instead of function values; the computable gap
between the two applications is bounded by the weight 1-norm times the
worst node mismatch.  Also hosts the least-squares cubature baseline:
minimum-2-norm weights supported at the scattered sites themselves under
polynomial moment-matching constraints.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
import scipy.linalg

from .errors import NodeEvaluationFailure, RankDeficient, ScatQuadError
from .geometry import Domain, PointSet, bbox
from .poly import poly_space_dim, vandermonde
from .rules import CubatureRule, MomentVector


@dataclass(frozen=True)
class CubatureResult:
    """One application of a rule to an interpolant."""

    value: float
    degree: int
    nu: int
    method: str
    node_bound: Optional[float]
    wall_time_s: float


def approximate_cubature(rule: CubatureRule, interpolant: Callable,
                         method: str = "psi",
                         f_true: Optional[Callable] = None) -> CubatureResult:
    """Apply the rule to interpolant values at its nodes.

    ``interpolant`` maps an (n, 2) array to n values.  When the true
    integrand is supplied, the node-gap bound ||w||_1 * max|f - psi| is
    attached.  Node-level failures are rethrown as
    :class:`NodeEvaluationFailure` carrying the offending node index.
    """
    t0 = time.perf_counter()
    try:
        psi = np.asarray(interpolant(rule.nodes), dtype=float).ravel()
    except ScatQuadError as exc:
        raise NodeEvaluationFailure(_locate_failure(rule, interpolant), exc) from exc
    if psi.shape[0] != rule.nu:
        raise ValueError("interpolant returned wrong number of values")
    value = float(rule.weights @ psi)
    node_bound = None
    if f_true is not None:
        f_vals = np.asarray(f_true(rule.nodes), dtype=float).ravel()
        node_bound = cubature_gap_bound(rule, f_vals, psi)
        gap = abs(float(rule.weights @ f_vals) - value)
        # triangle inequality; exact up to rounding of the two reductions
        assert gap <= node_bound + 1e-14 * max(1.0, abs(value))
    return CubatureResult(value=value, degree=rule.degree, nu=rule.nu,
                          method=method, node_bound=node_bound,
                          wall_time_s=time.perf_counter() - t0)


def _locate_failure(rule: CubatureRule, interpolant: Callable) -> int:
    for k in range(rule.nu):
        try:
            interpolant(rule.nodes[k:k + 1])
        except ScatQuadError:
            return k
    return -1


def cubature_gap_bound(rule: CubatureRule, f_at_nodes, psi_at_nodes) -> float:
    """||w||_1 times the worst node mismatch; bounds |Q(f) - Q(psi)| exactly."""
    f = np.asarray(f_at_nodes, dtype=float).ravel()
    psi = np.asarray(psi_at_nodes, dtype=float).ravel()
    if f.shape != psi.shape or f.shape[0] != rule.nu:
        raise ValueError("node value vectors must align with the rule nodes")
    return float(np.abs(rule.weights).sum() * np.max(np.abs(f - psi)))


@dataclass(frozen=True)
class LsCfWeights:
    """Minimum-2-norm scattered-site weights matching moments up to degree n."""

    points: np.ndarray
    degree: int
    weights: np.ndarray
    moment_residual: float


def lscf_default_degree(n_points: int) -> int:
    """Largest degree whose polynomial space dimension is at most N/2."""
    d = 0
    while poly_space_dim(d + 1) <= n_points / 2:
        d += 1
    return d


def _scaled_basis_moments(moments: MomentVector, center, h: float, n: int) -> np.ndarray:
    """Moments of the centered, h-scaled monomials from raw monomial moments.

    ((x-cx)/h)^a ((y-cy)/h)^b expands binomialy in the raw monomials, so the
    scaled moments are an exact linear transform of the raw ones.
    """
    if moments.degree < n:
        raise ValueError("moments must reach the requested degree")
    cx, cy = float(center[0]), float(center[1])
    out = []
    for k in range(n + 1):
        for b in range(k + 1):
            a = k - b
            acc = 0.0
            for i in range(a + 1):
                ca = math.comb(a, i) * (-cx) ** (a - i)
                for j in range(b + 1):
                    cb = math.comb(b, j) * (-cy) ** (b - j)
                    acc += ca * cb * moments.lookup(i, j)
            out.append(acc / h ** k)
    return np.asarray(out)


def lscf_weights(points, moments: MomentVector, n: int, domain: Domain) -> LsCfWeights:
    """Minimum-2-norm weights on the scattered sites matching all moments
    of total degree <= n.

    The constraint basis is the monomial basis centered at the domain
    bounding-box center and scaled by its half-diagonal; the minimum-norm
    solution of the underdetermined system V^T w = m lies in the row space
    of V^T.  Raises :class:`RankDeficient` when the sites are not
    degree-n determining.
    """
    pts = points.points if isinstance(points, PointSet) else np.atleast_2d(np.asarray(points, float))
    m_n = poly_space_dim(n)
    if pts.shape[0] < m_n:
        raise ValueError(f"need at least {m_n} points for degree {n}")
    rect = bbox(domain)
    center, h = rect.center, rect.half_diagonal
    V = vandermonde(pts, center, h, n)
    m_scaled = _scaled_basis_moments(moments, center, h, n)
    w, _, rank, _ = scipy.linalg.lstsq(V.T, m_scaled, lapack_driver="gelsd")
    residual = float(np.max(np.abs(V.T @ w - m_scaled)))
    # Numerical rank at the working precision is diagnostics; what decides
    # usability is whether the moments are actually matched.
    if residual > 1e-9 * (1.0 + float(np.max(np.abs(m_scaled)))):
        raise RankDeficient(rank + 1,
                            f"sites are not degree-{n} determining "
                            f"(rank {rank} of {m_n}, moment residual {residual:.3e})")
    return LsCfWeights(points=pts, degree=n, weights=w, moment_residual=residual)


def lscf_integrate(weights: LsCfWeights, values) -> float:
    """Apply the scattered-site weights to sample values."""
    v = np.asarray(values, dtype=float).ravel()
    if v.shape[0] != weights.weights.shape[0]:
        raise ValueError("values must align with the weighted points")
    return float(weights.weights @ v)
