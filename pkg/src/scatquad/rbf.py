"""Global RBF interpolation with leave-one-out shape parameter selection.

Four kernel families (Gaussian, inverse multiquadric, multiquadric,
Wendland C2); the multiquadric is conditionally positive definite of order
one and carries a constant polynomial tail with a zero-sum side condition.
Leave-one-out errors come from the single-solve diagonal rule rather than
N refits.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.linalg import LinAlgWarning, lu_factor, lu_solve
from scipy.spatial.distance import cdist

from .errors import AllCandidatesFailed, DegenerateDiagonal
from .geometry import PointSet

FAMILIES = ("ga", "imq", "mq", "w2")
ILL_CONDITION_LIMIT = 1e16
DIAGONAL_FLOOR = 1e-30


@dataclass(frozen=True)
class KernelSpec:
    """Kernel family plus shape parameter.

    ``cpd_order`` is 0 for the strictly positive definite families and 1
    for the multiquadric, which then needs a one-dimensional constant tail.
    """

    family: str
    epsilon: float

    def __post_init__(self):
        fam = self.family.lower()
        if fam not in FAMILIES:
            raise ValueError(f"unknown kernel family {self.family!r}")
        if self.epsilon <= 0.0:
            raise ValueError("shape parameter must be positive")
        object.__setattr__(self, "family", fam)

    @property
    def cpd_order(self) -> int:
        return 1 if self.family == "mq" else 0

    @property
    def tail_size(self) -> int:
        return 1 if self.family == "mq" else 0


def kernel_eval(spec: KernelSpec, r) -> np.ndarray:
    """Evaluate the radial kernel at nonnegative distances."""
    er = spec.epsilon * np.asarray(r, dtype=float)
    if spec.family == "ga":
        return np.exp(-er ** 2)
    if spec.family == "imq":
        return 1.0 / np.sqrt(1.0 + er ** 2)
    if spec.family == "mq":
        return np.sqrt(1.0 + er ** 2)
    # Wendland C2, compactly supported on [0, 1/epsilon].
    t = np.maximum(1.0 - er, 0.0)
    return t ** 4 * (4.0 * er + 1.0)


@dataclass
class RbfInterpolant:
    """A fitted RBF interpolant; immutable after construction."""

    spec: KernelSpec
    centers: np.ndarray
    coefficients: np.ndarray
    inverse_diagonal: np.ndarray
    condition_estimate: float
    ill_conditioned: bool
    residual: float

    def __call__(self, points) -> np.ndarray:
        return evaluate(self, points)


def _system_matrix(spec: KernelSpec, points: np.ndarray) -> np.ndarray:
    n = points.shape[0]
    m = spec.tail_size
    A = kernel_eval(spec, cdist(points, points))
    if m == 0:
        return A
    M = np.zeros((n + m, n + m))
    M[:n, :n] = A
    M[:n, n] = 1.0
    M[n, :n] = 1.0
    return M


def fit_global(data: PointSet, spec: KernelSpec) -> RbfInterpolant:
    """Fit the symmetric interpolation system and cache its inverse diagonal.

    Severe ill-conditioning (estimated 1-norm condition above 1e16, the
    flat-limit regime) is flagged on the returned fit, not raised.
    """
    if data.values is None:
        raise ValueError("data must carry sample values")
    pts = data.points
    n = pts.shape[0]
    m = spec.tail_size
    M = _system_matrix(spec, pts)
    rhs = np.concatenate([data.values, np.zeros(m)])
    factors = lu_factor(M)
    coeff = lu_solve(factors, rhs)
    if not np.all(np.isfinite(coeff)):
        raise np.linalg.LinAlgError("interpolation system is numerically singular")
    coeff += lu_solve(factors, rhs - M @ coeff)
    inv = lu_solve(factors, np.eye(n + m))
    if not np.all(np.isfinite(inv)):
        raise np.linalg.LinAlgError("interpolation system is numerically singular")
    cond = float(np.abs(M).sum(axis=0).max() * np.abs(inv).sum(axis=0).max())
    fitted = M[:n] @ coeff
    residual = float(np.max(np.abs(fitted - data.values)))
    return RbfInterpolant(spec=spec, centers=pts, coefficients=coeff,
                          inverse_diagonal=np.diag(inv)[:n].copy(),
                          condition_estimate=cond,
                          ill_conditioned=bool(cond > ILL_CONDITION_LIMIT),
                          residual=residual)


def evaluate(fit: RbfInterpolant, points) -> np.ndarray:
    """Kernel sum plus polynomial tail at the given points."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    n = fit.centers.shape[0]
    out = kernel_eval(fit.spec, cdist(pts, fit.centers)) @ fit.coefficients[:n]
    if fit.spec.tail_size:
        out = out + fit.coefficients[n]
    return out if np.asarray(points).ndim == 2 else float(out[0])


def rippa_errors(fit: RbfInterpolant) -> np.ndarray:
    """Leave-one-out errors e_k = c_k / (M^{-1})_kk from the full solve."""
    diag = fit.inverse_diagonal
    if np.any(np.abs(diag) < DIAGONAL_FLOOR):
        raise DegenerateDiagonal("leave-one-out diagonal is numerically singular")
    n = diag.shape[0]
    return fit.coefficients[:n] / diag


def loocv_cost(errors) -> float:
    """Max-norm of the leave-one-out error vector."""
    e = np.asarray(errors, dtype=float)
    if e.size == 0:
        raise ValueError("error vector must be nonempty")
    return float(np.max(np.abs(e)))


def default_epsilon_grid(num: int = 50) -> np.ndarray:
    """Logarithmically spaced shape parameters from 1e-2 to 1e2."""
    return np.logspace(-2.0, 2.0, num)


def select_epsilon(data: PointSet, family: str,
                   grid: Optional[Sequence[float]] = None):
    """Pick the shape parameter minimizing the leave-one-out cost.

    Returns ``(epsilon_star, curve)`` where ``curve`` lists every
    ``(epsilon, cost)`` evaluated (NaN cost for failed fits).  Ties go to
    the smaller epsilon; ill-conditioned fits compete with their computed
    cost.  Raises only when every grid point fails.
    """
    eps_grid = default_epsilon_grid() if grid is None else np.asarray(grid, dtype=float)
    if eps_grid.size == 0 or np.any(np.diff(eps_grid) <= 0) or eps_grid[0] <= 0:
        raise ValueError("grid must be nonempty, positive, strictly increasing")
    best_eps = None
    best_cost = np.inf
    curve = []
    last_error: Exception | None = None
    for eps in eps_grid:
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", LinAlgWarning)
                fit = fit_global(data, KernelSpec(family, float(eps)))
            cost = loocv_cost(rippa_errors(fit))
        except (np.linalg.LinAlgError, DegenerateDiagonal, ValueError) as exc:
            last_error = exc
            curve.append((float(eps), float("nan")))
            continue
        curve.append((float(eps), cost))
        if cost < best_cost:
            best_cost = cost
            best_eps = float(eps)
    if best_eps is None:
        raise AllCandidatesFailed(f"every shape parameter failed: {last_error}")
    return best_eps, curve
