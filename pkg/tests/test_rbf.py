"""RBF kernels, fitting, the leave-one-out rule, and shape selection."""

import numpy as np
import pytest

from scatquad.geometry import PointSet, halton
from scatquad.rbf import (KernelSpec, default_epsilon_grid, evaluate, fit_global,
                          kernel_eval, loocv_cost, rippa_errors, select_epsilon)
from scatquad.testfuncs import eval_test


def brute_force_loo(data: PointSet, spec: KernelSpec) -> np.ndarray:
    """Oracle: N explicit leave-one-out refits."""
    n = len(data)
    out = np.empty(n)
    for k in range(n):
        mask = np.ones(n, dtype=bool)
        mask[k] = False
        sub = PointSet(data.points[mask], data.values[mask])
        fit = fit_global(sub, spec)
        out[k] = data.values[k] - evaluate(fit, data.points[k:k + 1])[0]
    return out


def sample_data(n: int) -> PointSet:
    pts = halton(n)
    return pts.with_values(eval_test("f1", pts.points))


def test_kernel_values():
    assert kernel_eval(KernelSpec("ga", 1.7), 0.0) == 1.0
    assert kernel_eval(KernelSpec("w2", 2.0), 0.5) == 0.0  # support edge
    assert kernel_eval(KernelSpec("mq", 1.0), np.sqrt(3.0)) == pytest.approx(2.0, rel=1e-15)
    assert kernel_eval(KernelSpec("imq", 1.0), np.sqrt(3.0)) == pytest.approx(0.5, rel=1e-15)
    # W2 vanishes beyond the support
    assert kernel_eval(KernelSpec("w2", 4.0), 0.3) == 0.0


def test_kernel_spec_orders():
    assert KernelSpec("ga", 1.0).cpd_order == 0
    assert KernelSpec("w2", 1.0).tail_size == 0
    assert KernelSpec("mq", 1.0).cpd_order == 1
    assert KernelSpec("mq", 1.0).tail_size == 1
    with pytest.raises(ValueError):
        KernelSpec("cubic", 1.0)
    with pytest.raises(ValueError):
        KernelSpec("ga", 0.0)


def test_single_point_fit():
    data = PointSet(np.array([[0.3, 0.4]]), np.array([2.5]))
    fit = fit_global(data, KernelSpec("ga", 2.0))
    assert fit.coefficients[0] == pytest.approx(2.5, rel=1e-14)
    assert evaluate(fit, np.array([[0.3, 0.4]]))[0] == pytest.approx(2.5, rel=1e-14)


def test_mq_side_condition_and_residual():
    rng = np.random.default_rng(2)
    pts = rng.uniform(0, 1, size=(5, 2))
    data = PointSet(pts, rng.normal(size=5))
    fit = fit_global(data, KernelSpec("mq", 1.5))
    assert abs(fit.coefficients[:5].sum()) <= 1e-10
    assert fit.residual <= 1e-10
    assert fit.coefficients.shape == (6,)


def test_spd_families_have_no_tail():
    data = sample_data(12)
    for fam in ("ga", "imq", "w2"):
        fit = fit_global(data, KernelSpec(fam, 2.0))
        assert fit.coefficients.shape == (12,)


def test_fit_symmetry():
    # data symmetric under x <-> y gives a symmetric interpolant
    base = np.array([[0.2, 0.5], [0.8, 0.3], [0.4, 0.9]])
    pts = np.vstack([base, base[:, ::-1]])
    vals = np.array([1.0, -2.0, 0.5, 1.0, -2.0, 0.5])
    fit = fit_global(PointSet(pts, vals), KernelSpec("ga", 3.0))
    probe = np.array([[0.15, 0.35], [0.6, 0.1]])
    mirrored = probe[:, ::-1]
    assert np.allclose(evaluate(fit, probe), evaluate(fit, mirrored), atol=1e-10)


@pytest.mark.parametrize("family,eps", [("ga", 3.0), ("imq", 2.0),
                                        ("mq", 2.0), ("w2", 1.5)])
def test_rippa_matches_brute_force(family, eps):
    data = sample_data(40)
    spec = KernelSpec(family, eps)
    fit = fit_global(data, spec)
    rule_based = rippa_errors(fit)
    oracle = brute_force_loo(data, spec)
    assert np.max(np.abs(rule_based - oracle) / (1.0 + np.abs(rule_based))) <= 1e-8


def test_rippa_symmetric_pair():
    data = PointSet(np.array([[0.0, 0.0], [1.0, 0.0]]), np.array([1.0, 1.0]))
    e = rippa_errors(fit_global(data, KernelSpec("ga", 1.0)))
    assert e[0] == pytest.approx(e[1], rel=1e-13)


def test_rippa_redundant_point_near_zero_error():
    """Data lying exactly in the span of the kernels at points 2..N: point 1
    is redundant, so its leave-one-out error vanishes."""
    spec = KernelSpec("ga", 2.0)
    pts = halton(12).points
    rng = np.random.default_rng(8)
    a = rng.normal(size=11)

    def f(P):
        r = np.hypot(P[:, 0:1] - pts[1:, 0], P[:, 1:2] - pts[1:, 1])
        return kernel_eval(spec, r) @ a

    data = PointSet(pts, f(pts))
    e = rippa_errors(fit_global(data, spec))
    assert abs(e[0]) <= 1e-9


def test_loocv_cost():
    assert loocv_cost([0.0, 0.0]) == 0.0
    assert loocv_cost([1.0, -3.0, 2.0]) == 3.0
    rng = np.random.default_rng(31)
    v = rng.normal(size=17)
    assert loocv_cost(v) == loocv_cost(v[::-1])


def test_select_epsilon_single_grid_point():
    data = sample_data(20)
    eps, curve = select_epsilon(data, "ga", [0.7])
    assert eps == 0.7
    assert len(curve) == 1


def test_select_epsilon_is_argmin():
    data = sample_data(30)
    grid = default_epsilon_grid(20)
    eps, curve = select_epsilon(data, "imq", grid)
    costs = {e: c for e, c in curve}
    assert all(costs[eps] <= c for _, c in curve if np.isfinite(c))


def test_select_epsilon_beats_endpoints_on_held_out():
    pts = halton(400)
    data = pts.with_values(eval_test("f1", pts.points))
    grid = default_epsilon_grid(50)
    eps, _ = select_epsilon(data, "mq", grid)
    held = halton(200, skip=400)
    truth = eval_test("f1", held.points)

    def held_out_error(e):
        fit = fit_global(data, KernelSpec("mq", e))
        return np.max(np.abs(evaluate(fit, held.points) - truth))

    err_star = held_out_error(eps)
    assert err_star < held_out_error(grid[0])
    assert err_star < held_out_error(grid[-1])


def test_eval_at_centers_and_far_field():
    data = sample_data(25)
    fit = fit_global(data, KernelSpec("ga", 3.0))
    at_nodes = evaluate(fit, data.points)
    assert np.max(np.abs(at_nodes - data.values)) <= 1e-8 * (1 + np.max(np.abs(data.values)))
    far = evaluate(fit, np.array([[50.0, 50.0]]))
    assert abs(far[0]) <= 1e-12


def test_eval_matches_direct_summation():
    data = sample_data(30)
    fit = fit_global(data, KernelSpec("mq", 2.0))
    rng = np.random.default_rng(4)
    probes = rng.uniform(0, 1, size=(100, 2))
    got = evaluate(fit, probes)
    # independent re-evaluation, one probe at a time
    for i, p in enumerate(probes):
        r = np.hypot(data.points[:, 0] - p[0], data.points[:, 1] - p[1])
        direct = float(kernel_eval(fit.spec, r) @ fit.coefficients[:30] + fit.coefficients[30])
        assert abs(got[i] - direct) <= 1e-12 * (1.0 + abs(direct))


def test_evaluation_linear_in_values():
    pts = halton(35)
    f = eval_test("f1", pts.points)
    g = eval_test("f2", pts.points * 0.5)
    spec = KernelSpec("imq", 2.0)
    alpha, beta = 1.7, -0.6
    fit_f = fit_global(pts.with_values(f), spec)
    fit_g = fit_global(pts.with_values(g), spec)
    fit_c = fit_global(pts.with_values(alpha * f + beta * g), spec)
    probes = halton(40, skip=100).points
    combo = alpha * evaluate(fit_f, probes) + beta * evaluate(fit_g, probes)
    assert np.max(np.abs(evaluate(fit_c, probes) - combo)) <= 1e-10
