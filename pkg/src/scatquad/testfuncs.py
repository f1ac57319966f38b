"""Benchmark integrands and their reference integrals.

Four classical test functions: Franke's function on the unit square, a
separable rational function on [-1,1]^2, and two radial power functions of
finite smoothness centered at (0.5, 0.5).
"""

from __future__ import annotations

import numpy as np

from .geometry import Rectangle
from .rules import gauss_legendre_product

FUNCTION_IDS = ("f1", "f2", "f3", "f4")

DOMAINS = {
    "f1": Rectangle(0.0, 1.0, 0.0, 1.0),
    "f2": Rectangle(-1.0, 1.0, -1.0, 1.0),
    "f3": Rectangle(0.0, 1.0, 0.0, 1.0),
    "f4": Rectangle(0.0, 1.0, 0.0, 1.0),
}

_CENTER = (0.5, 0.5)


def _franke(x, y):
    # Note the second bump: (9y+1)/10 enters linearly, not squared.
    return (0.75 * np.exp(-((9 * x - 2) ** 2 + (9 * y - 2) ** 2) / 4)
            + 0.75 * np.exp(-((9 * x + 1) ** 2 / 49 + (9 * y + 1) / 10))
            + 0.5 * np.exp(-((9 * x - 7) ** 2 + (9 * y - 3) ** 2) / 4)
            - 0.2 * np.exp(-((9 * x - 4) ** 2 + (9 * y - 7) ** 2)))


def _rational(x, y):
    return 1.0 / ((1.0 + x ** 2) * (1.0 + y ** 2))


def _radial_power(x, y, exponent):
    x0, y0 = _CENTER
    r2 = (x - x0) ** 2 + (y - y0) ** 2
    return r2 ** (exponent / 2.0)


def eval_test(fid: str, points) -> np.ndarray:
    """Evaluate a test function at points of shape (n, 2) (or a single pair)."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    x, y = pts[:, 0], pts[:, 1]
    if fid == "f1":
        out = _franke(x, y)
    elif fid == "f2":
        out = _rational(x, y)
    elif fid == "f3":
        out = _radial_power(x, y, 3)
    elif fid == "f4":
        out = _radial_power(x, y, 7)
    else:
        raise ValueError(f"unknown test function {fid!r}")
    return out


_reference_cache: dict[tuple[str, int], float] = {}


def reference_integral(fid: str, degree: int = 60) -> float:
    """Reference integral over the function's standard domain.

    f2 has the closed form (pi/2)^2; the others use the degree-``degree``
    tensor Gauss rule on their domain, computed once and cached.
    """
    if fid == "f2":
        return (0.5 * np.pi) ** 2
    key = (fid, degree)
    if key not in _reference_cache:
        rule = gauss_legendre_product(DOMAINS[fid], degree)
        _reference_cache[key] = float(rule.weights @ eval_test(fid, rule.nodes))
    return _reference_cache[key]
