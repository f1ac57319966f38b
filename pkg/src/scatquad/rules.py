"""Positive-interior algebraic cubature rules.

Built-in tensor-product Gauss-Legendre rules on rectangles, a plain-text
file format for externally constructed rules (curved domains), monomial
moments, and rule validation against those moments.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ParseError
from .geometry import Domain, Rectangle, contains_many
from .poly import multi_indices, poly_space_dim

FLOAT_FMT = "%.17g"


@dataclass(frozen=True)
class CubatureRule:
    """Nodes, weights, and stated exactness degree of an algebraic rule.

    A PI rule has all weights positive and all nodes inside the domain;
    the constructor does not enforce either so that :func:`validate_rule`
    can report violations on loaded or tampered rules.
    """

    nodes: np.ndarray
    weights: np.ndarray
    degree: int
    domain: Domain

    def __post_init__(self):
        nodes = np.atleast_2d(np.asarray(self.nodes, dtype=float))
        weights = np.asarray(self.weights, dtype=float).ravel()
        if nodes.shape[1] != 2 or nodes.shape[0] < 1:
            raise ValueError("nodes must have shape (nu, 2) with nu >= 1")
        if weights.shape[0] != nodes.shape[0]:
            raise ValueError("weights must align with nodes")
        if not (np.all(np.isfinite(nodes)) and np.all(np.isfinite(weights))):
            raise ValueError("nodes and weights must be finite")
        if self.degree < 0:
            raise ValueError("exactness degree must be >= 0")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    @property
    def nu(self) -> int:
        return self.nodes.shape[0]


@dataclass(frozen=True)
class MomentVector:
    """Monomial moments of a domain, one per graded multi-index up to ``degree``."""

    degree: int
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float).ravel()
        if vals.shape[0] != poly_space_dim(self.degree):
            raise ValueError("moment count must equal the polynomial space dimension")
        object.__setattr__(self, "values", vals)

    def lookup(self, a: int, b: int) -> float:
        """Moment of x^a y^b; indices follow the graded order."""
        k = a + b
        return float(self.values[k * (k + 1) // 2 + b])


def gauss_legendre_product(rect: Rectangle, n: int) -> CubatureRule:
    """Tensor-product Gauss-Legendre rule on a rectangle, exact on degree n.

    Uses q = ceil((n+1)/2) points per axis, so each axis integrates degree
    2q-1 >= n exactly; weights are positive and nodes interior by
    construction.
    """
    if n < 0:
        raise ValueError("exactness degree must be >= 0")
    q = (n + 2) // 2
    t, w = np.polynomial.legendre.leggauss(q)
    x = rect.ax + 0.5 * (t + 1.0) * (rect.bx - rect.ax)
    wx = 0.5 * (rect.bx - rect.ax) * w
    y = rect.ay + 0.5 * (t + 1.0) * (rect.by - rect.ay)
    wy = 0.5 * (rect.by - rect.ay) * w
    xx, yy = np.meshgrid(x, y, indexing="ij")
    ww = np.outer(wx, wy)
    nodes = np.column_stack([xx.ravel(), yy.ravel()])
    return CubatureRule(nodes, ww.ravel(), n, rect)


def monomial_moments(rect: Rectangle, d: int) -> MomentVector:
    """Exact monomial moments of a rectangle up to total degree d."""
    alpha = multi_indices(d)
    a, b = alpha[:, 0], alpha[:, 1]
    mx = (rect.bx ** (a + 1) - rect.ax ** (a + 1)) / (a + 1)
    my = (rect.by ** (b + 1) - rect.ay ** (b + 1)) / (b + 1)
    return MomentVector(d, mx * my)


def moments_from_rule(rule: CubatureRule, d: int) -> MomentVector:
    """Monomial moments obtained by applying a rule to the monomials.

    The standard route to moments on curved domains, where a high-degree
    PI rule stands in for unavailable closed forms; exact (up to roundoff)
    whenever d does not exceed the rule's exactness degree.
    """
    alpha = multi_indices(d)
    vals = np.empty(alpha.shape[0])
    x, y = rule.nodes[:, 0], rule.nodes[:, 1]
    for j, (a, b) in enumerate(alpha):
        vals[j] = float(rule.weights @ (x ** a * y ** b))
    return MomentVector(d, vals)


@dataclass(frozen=True)
class RuleReport:
    """Validation flags and the worst moment residual of a rule."""

    max_relative_moment_residual: float
    positivity: bool
    interiority: bool

    @property
    def ok(self) -> bool:
        return self.positivity and self.interiority


def validate_rule(rule: CubatureRule, moments: MomentVector) -> RuleReport:
    """Check a rule against monomial moments and the PI property.

    The residual is ``max |sum_k w_k Xi_k^alpha - m_alpha| / (1 + |m_alpha|)``
    over every index carried by ``moments``; positivity and interiority are
    reported as flags, never raised.
    """
    if moments.degree < rule.degree:
        raise ValueError("moments must reach at least the rule's exactness degree")
    alpha = multi_indices(moments.degree)
    x, y = rule.nodes[:, 0], rule.nodes[:, 1]
    residual = 0.0
    for j, (a, b) in enumerate(alpha):
        q = float(rule.weights @ (x ** a * y ** b))
        m = moments.values[j]
        residual = max(residual, abs(q - m) / (1.0 + abs(m)))
    positivity = bool(np.all(rule.weights > 0.0))
    interiority = bool(np.all(contains_many(rule.domain, rule.nodes)))
    return RuleReport(residual, positivity, interiority)


def _nodes_bbox(nodes: np.ndarray) -> Rectangle:
    ax, ay = nodes.min(axis=0)
    bx, by = nodes.max(axis=0)
    pad_x = max(0.5 * (bx - ax), 0.5)
    pad_y = max(0.5 * (by - ay), 0.5)
    return Rectangle(ax - pad_x, bx + pad_x, ay - pad_y, by + pad_y)


def save_rule(rule: CubatureRule, path) -> None:
    """Write a rule in the plain-text format read by :func:`load_rule`."""
    with open(path, "w", encoding="ascii") as fh:
        fh.write("# algebraic cubature rule\n")
        fh.write("dim 2\n")
        fh.write(f"degree {rule.degree}\n")
        fh.write(f"count {rule.nu}\n")
        for (x, y), w in zip(rule.nodes, rule.weights):
            fh.write(f"{FLOAT_FMT % x} {FLOAT_FMT % y} {FLOAT_FMT % w}\n")


def load_rule(path, domain: Optional[Domain] = None) -> CubatureRule:
    """Load a rule file: header ``dim 2`` / ``degree n`` / ``count nu``,
    then nu lines of ``x y w``.

    ``#``-prefixed comments and blank lines are allowed anywhere.  Raises
    :class:`ParseError` on structural problems and :class:`ValueError` on
    nonpositive weights or non-finite numbers.  When ``domain`` is omitted
    the rule is tagged with a padded bounding rectangle of its nodes;
    validation is left to :func:`validate_rule`.
    """
    header = [("dim", 2), ("degree", None), ("count", None)]
    degree = count = None
    nodes, weights = [], []
    stage = 0
    with open(path, "r", encoding="ascii") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if stage < len(header):
                key, expected = header[stage]
                parts = line.split()
                if len(parts) != 2 or parts[0] != key:
                    raise ParseError(path, line_no, f"expected '{key} <value>', got {line!r}")
                try:
                    value = int(parts[1])
                except ValueError:
                    raise ParseError(path, line_no, f"bad integer {parts[1]!r}") from None
                if expected is not None and value != expected:
                    raise ParseError(path, line_no, f"unsupported {key} {value}")
                if key == "degree":
                    if value < 0:
                        raise ParseError(path, line_no, "degree must be >= 0")
                    degree = value
                elif key == "count":
                    if value < 1:
                        raise ParseError(path, line_no, "count must be >= 1")
                    count = value
                stage += 1
                continue
            parts = line.split()
            if len(parts) != 3:
                raise ParseError(path, line_no, f"expected 'x y w', got {line!r}")
            try:
                x, y, w = (float(tok) for tok in parts)
            except ValueError:
                raise ParseError(path, line_no, f"bad number in {line!r}") from None
            if not (np.isfinite(x) and np.isfinite(y) and np.isfinite(w)):
                raise ValueError(f"{path}:{line_no}: non-finite entry")
            if w <= 0.0:
                raise ValueError(f"{path}:{line_no}: nonpositive weight {w}")
            nodes.append((x, y))
            weights.append(w)
    if stage < len(header):
        raise ParseError(path, 0, "incomplete header")
    if len(nodes) != count:
        raise ParseError(path, 0, f"expected {count} node lines, found {len(nodes)}")
    nodes_arr = np.asarray(nodes)
    if domain is None:
        domain = _nodes_bbox(nodes_arr)
    return CubatureRule(nodes_arr, np.asarray(weights), degree, domain)
