"""Bivariate polynomial bookkeeping and discrete Leja point extraction.

Holds the graded multi-index order, scaled-centered Vandermonde matrices,
greedy Leja selection by pivoted elimination, nested evaluation of the
local interpolant at the expansion center, and the Lebesgue value that
amplifies the local error bound.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .errors import InsufficientData, RankDeficient

DEFAULT_RANK_TOL = 1e-10


def poly_space_dim(d: int) -> int:
    """Dimension of bivariate polynomials of total degree <= d."""
    return (d + 1) * (d + 2) // 2


def multi_indices(d: int) -> np.ndarray:
    """Graded multi-index set of total degree <= d, shape (m_d, 2).

    Within each grade k the indices run (k,0), (k-1,1), ..., (0,k), so the
    leading m_k rows span exactly degree k for every k <= d.
    """
    if d < 0:
        raise ValueError("degree must be >= 0")
    rows = [(k - j, j) for k in range(d + 1) for j in range(k + 1)]
    return np.array(rows, dtype=int)


def vandermonde(points, center, h: float, d: int) -> np.ndarray:
    """Vandermonde matrix in the scaled monomial basis centered at ``center``.

    ``V[i, a] = ((P_i - center) / h) ** alpha_a`` with columns in graded
    order; the first column is all ones.
    """
    if h <= 0.0:
        raise ValueError("scale h must be positive")
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    c = np.asarray(center, dtype=float)
    u = (pts - c) / h
    alpha = multi_indices(d)
    return u[:, 0:1] ** alpha[:, 0] * u[:, 1:2] ** alpha[:, 1]


@dataclass(frozen=True)
class LejaSequence:
    """Result of greedy Leja extraction from a candidate set.

    ``selected`` are candidate indices in pivot order; ``lu`` packs the unit
    lower and upper triangular factors of the selected Vandermonde rows, so
    the leading k-by-k blocks factor the degree-k subproblems.
    """

    center: np.ndarray
    h: float
    degree: int
    selected: np.ndarray
    lu: np.ndarray
    pivot_magnitudes: np.ndarray


def leja_select(candidates, center, h: float, d: int,
                rank_tol: float = DEFAULT_RANK_TOL) -> LejaSequence:
    """Extract m_d discrete Leja points from ``candidates``.

    Gaussian elimination with row pivoting on the scaled Vandermonde,
    processing basis columns in graded order; each step picks the remaining
    row with the largest eliminated entry (ties go to the smallest candidate
    index).  Raises :class:`RankDeficient` when no pivot exceeds
    ``rank_tol`` times the largest pivot seen so far.
    """
    pts = np.atleast_2d(np.asarray(candidates, dtype=float))
    m = poly_space_dim(d)
    n = pts.shape[0]
    if n < m:
        raise InsufficientData(f"need >= {m} candidates for degree {d}, got {n}")
    A = vandermonde(pts, center, h, d)
    order = np.arange(n)
    piv_mags = np.empty(m)
    largest = 0.0
    for k in range(m):
        col = np.abs(A[k:, k])
        vmax = col.max()
        if vmax <= rank_tol * largest:
            raise RankDeficient(k + 1)
        ties = np.flatnonzero(col == vmax)
        j = k + ties[np.argmin(order[k + ties])]
        if j != k:
            A[[k, j]] = A[[j, k]]
            order[[k, j]] = order[[j, k]]
        piv = A[k, k]
        piv_mags[k] = abs(piv)
        largest = max(largest, abs(piv))
        if k + 1 < n and k + 1 < m:
            mult = A[k + 1:, k] / piv
            A[k + 1:, k] = mult
            A[k + 1:, k + 1:] -= np.outer(mult, A[k, k + 1:])
    return LejaSequence(center=np.asarray(center, dtype=float), h=float(h),
                        degree=d, selected=order[:m].copy(),
                        lu=A[:m, :m].copy(), pivot_magnitudes=piv_mags)


def _inverse_first_row(seq: LejaSequence, k: int) -> np.ndarray:
    """First row of the inverse of the leading m_k-by-m_k Vandermonde block."""
    if k < 0 or k > seq.degree:
        raise ValueError("k must satisfy 0 <= k <= sequence degree")
    mk = poly_space_dim(k)
    lu = seq.lu[:mk, :mk]
    e1 = np.zeros(mk)
    e1[0] = 1.0
    # V_k = L_k U_k, so V_k^T z = e1 splits into two triangular solves.
    y = solve_triangular(lu, e1, trans="T", lower=False)
    return solve_triangular(lu, y, trans="T", lower=True, unit_diagonal=True)


def nested_center_values(seq: LejaSequence, values_at_selected) -> np.ndarray:
    """Interpolant values at the center for every degree k = 0..d.

    Entry k is p_k(center) where p_k interpolates the first m_k Leja points;
    it equals the first row of the inverse degree-k Vandermonde block dotted
    with the first m_k data values.
    """
    vals = np.asarray(values_at_selected, dtype=float).ravel()
    if vals.shape[0] != poly_space_dim(seq.degree):
        raise ValueError("values must align with the selected points")
    out = np.empty(seq.degree + 1)
    for k in range(seq.degree + 1):
        z = _inverse_first_row(seq, k)
        out[k] = z @ vals[: z.shape[0]]
    return out


def lebesgue_at_center(seq: LejaSequence, k: int) -> float:
    """Lebesgue value at the center for the degree-k leading subproblem.

    The 1-norm of the first row of the inverse scaled-centered Vandermonde;
    the stability factor multiplying the local error bound.
    """
    return float(np.abs(_inverse_first_row(seq, k)).sum())
