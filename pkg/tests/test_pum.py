"""Partition-of-unity RBF interpolation."""

import numpy as np
import pytest

from scatquad.errors import AllCandidatesFailed, UncoveredPoint
from scatquad.geometry import (Disk, DiskDifference, PointSet, Rectangle,
                               filter_to_domain, halton, map_to_bbox)
from scatquad.pum import (PumCover, bloocv_select, build_cover, eval_pum,
                          fit_pum, pu_weights)
from scatquad.rbf import KernelSpec, evaluate, fit_global, loocv_cost, rippa_errors
from scatquad.testfuncs import eval_test

UNIT = Rectangle(0, 1, 0, 1)
LUNE = DiskDifference(Disk(0.0, 0.0, 1.0), Disk(0.8, 0.0, 0.7))


def f1_data(n: int) -> PointSet:
    pts = halton(n)
    return pts.with_values(eval_test("f1", pts.points))


def test_single_patch_cover():
    data = f1_data(25)
    cover = build_cover(UNIT, data, points_per_patch_target=25)
    assert cover.n_patches == 1
    assert np.allclose(cover.centers[0], [0.5, 0.5])
    # the single ball reaches every corner of the bounding box
    assert cover.radii[0] >= np.hypot(0.5, 0.5)


def test_grid_size_400_over_25():
    data = f1_data(400)
    cover = build_cover(UNIT, data, points_per_patch_target=25)
    assert cover.n_patches == 16  # 4x4 grid, all centers kept on a rectangle


def test_cover_lune_covers_all_data():
    unit = halton(800)
    data = filter_to_domain(map_to_bbox(unit, LUNE), LUNE)
    data = data.with_values(np.ones(len(data)))
    cover = build_cover(LUNE, data, points_per_patch_target=25)
    d2 = np.sum((data.points[:, None, :] - cover.centers[None]) ** 2, axis=2)
    covered = np.any(d2 <= cover.radii ** 2, axis=1)
    assert covered.all()


def test_pu_weights_single_ball():
    cover = PumCover(centers=np.array([[0.5, 0.5]]), delta0=1.0,
                     radii=np.array([1.0]))
    idx, w = pu_weights(cover, (0.4, 0.6))
    assert idx.tolist() == [0]
    assert w[0] == pytest.approx(1.0)


def test_pu_weights_symmetric_pair():
    cover = PumCover(centers=np.array([[0.0, 0.0], [1.0, 0.0]]), delta0=0.8,
                     radii=np.array([0.8, 0.8]))
    idx, w = pu_weights(cover, (0.5, 0.0))
    assert sorted(idx.tolist()) == [0, 1]
    assert np.allclose(w, [0.5, 0.5])


def test_pu_weights_sum_to_one_everywhere():
    data = f1_data(400)
    cover = build_cover(UNIT, data)
    rng = np.random.default_rng(23)
    pts = rng.uniform(0, 1, size=(1000, 2))
    for p in pts:
        _, w = pu_weights(cover, p)
        assert abs(w.sum() - 1.0) <= 1e-12
        assert np.all(w >= 0)


def test_pu_weights_uncovered():
    cover = PumCover(centers=np.array([[0.5, 0.5]]), delta0=0.1,
                     radii=np.array([0.1]))
    with pytest.raises(UncoveredPoint):
        pu_weights(cover, (0.9, 0.9))


def test_bloocv_single_pair():
    data = f1_data(60)
    eps, delta, cost = bloocv_select(data, (0.5, 0.5), 0.5, "ga",
                                     epsilon_grid=[2.0], delta_multipliers=[1.0])
    assert eps == 2.0
    assert delta == 0.5
    assert np.isfinite(cost)


def test_bloocv_returns_minimum():
    from scatquad.pum import INTERP_RESIDUAL_FACTOR
    data = f1_data(80)
    grid = [0.5, 1.0, 2.0, 4.0, 8.0]
    mults = [1.0, 1.5]
    eps, delta, cost = bloocv_select(data, (0.4, 0.4), 0.45, "ga", grid, mults)
    # exhaustive recomputation of the searched costs
    d2 = np.sum((data.points - np.array([0.4, 0.4])) ** 2, axis=1)
    for m in mults:
        dd = m * 0.45
        idx = np.flatnonzero(d2 <= dd * dd)
        local = PointSet(data.points[idx], data.values[idx])
        for e in grid:
            fit = fit_global(local, KernelSpec("ga", e))
            if fit.residual > INTERP_RESIDUAL_FACTOR * (1 + np.max(np.abs(local.values))):
                continue
            assert cost <= loocv_cost(rippa_errors(fit)) + 1e-12


def test_bloocv_cost_matches_brute_force():
    data = f1_data(120)
    center = np.array([0.5, 0.5])
    d2 = np.sum((data.points - center) ** 2, axis=1)
    delta = 0.28
    idx = np.flatnonzero(d2 <= delta * delta)
    local = PointSet(data.points[idx], data.values[idx])
    assert 20 <= len(local) <= 40
    for eps in (3.0, 6.0):
        fit = fit_global(local, KernelSpec("ga", eps))
        rule_cost = loocv_cost(rippa_errors(fit))
        # brute-force leave-one-out
        n = len(local)
        worst = 0.0
        for k in range(n):
            mask = np.ones(n, dtype=bool)
            mask[k] = False
            sub = PointSet(local.points[mask], local.values[mask])
            pf = fit_global(sub, KernelSpec("ga", eps))
            worst = max(worst, abs(local.values[k] - evaluate(pf, local.points[k:k + 1])[0]))
        assert rule_cost == pytest.approx(worst, rel=1e-8)


def test_bloocv_all_fail():
    data = f1_data(60)
    with pytest.raises(AllCandidatesFailed):
        # radius so small that no candidate keeps 3 points
        bloocv_select(data, (-5.0, -5.0), 1e-6, "ga", [1.0], [1.0])


def test_constant_reproduction():
    # Pure SPD local fits do not reproduce constants exactly; accuracy is
    # floored near 1e-8 by flat-limit conditioning, so assert a bound the
    # selection can actually reach (measured ~2e-8 with wide margin).
    pts = halton(200)
    data = pts.with_values(np.full(200, 3.25))
    interp = fit_pum(data, UNIT, family="ga")
    rng = np.random.default_rng(5)
    probes = rng.uniform(0, 1, size=(50, 2))
    assert np.max(np.abs(interp(probes) - 3.25)) <= 1e-6


def test_node_interpolation():
    data = f1_data(300)
    interp = fit_pum(data, UNIT, family="ga")
    at_nodes = interp(data.points)
    assert np.max(np.abs(at_nodes - data.values)) <= 1e-8 * (1 + np.max(np.abs(data.values)))


def test_single_patch_equals_global_fit():
    data = f1_data(40)
    interp = fit_pum(data, UNIT, family="ga", points_per_patch_target=40,
                     epsilon_grid=[2.5], delta_multipliers=[2.0])
    # same data, same kernel: the blend of one patch is that patch's fit
    eps, delta = interp.selected[0]
    assert eps == 2.5
    direct = fit_global(data, KernelSpec("ga", 2.5))
    rng = np.random.default_rng(11)
    probes = rng.uniform(0.05, 0.95, size=(100, 2))
    assert np.max(np.abs(interp(probes) - evaluate(direct, probes))) <= 1e-12


def test_patch_locality():
    """Perturbing values of points exclusive to one patch leaves evaluations
    outside that patch's ball bit-identical."""
    data = f1_data(400)
    interp = fit_pum(data, UNIT, family="ga")
    cover = interp.cover
    # find a patch with points belonging to it alone
    membership = np.zeros((len(data), cover.n_patches), dtype=bool)
    for j in range(cover.n_patches):
        membership[cover.members(data.points, j), j] = True
    exclusive = None
    for j in range(cover.n_patches):
        only_j = membership[:, j] & (membership.sum(axis=1) == 1)
        if only_j.any():
            exclusive, patch = only_j, j
            break
    assert exclusive is not None
    values = data.values.copy()
    values[exclusive] += 10.0
    perturbed = fit_pum(PointSet(data.points, values), UNIT, family="ga")
    # probe points where the perturbed patch's weight vanishes
    rng = np.random.default_rng(3)
    probes = rng.uniform(0, 1, size=(300, 2))
    outside = [p for p in probes
               if np.hypot(p[0] - cover.centers[patch][0], p[1] - cover.centers[patch][1])
               > max(cover.radii[patch], perturbed.cover.radii[patch])]
    assert len(outside) > 0
    for p in outside[:40]:
        assert eval_pum(interp, p) == eval_pum(perturbed, p)


def test_eval_uncovered_point_raises():
    data = f1_data(100)
    interp = fit_pum(data, UNIT, family="ga")
    with pytest.raises(UncoveredPoint):
        eval_pum(interp, (25.0, -3.0))


def test_mq_rejected_for_patches():
    data = f1_data(60)
    with pytest.raises(ValueError):
        bloocv_select(data, (0.5, 0.5), 0.5, "mq")


def test_fit_pum_on_lune_end_to_end():
    """Curved, non-convex domain: cover construction, eval-point coverage
    growth, and evaluation all work off the rectangle."""
    data = filter_to_domain(map_to_bbox(halton(800), LUNE), LUNE)
    data = data.with_values(eval_test("f1", data.points))
    probes = filter_to_domain(map_to_bbox(halton(300, skip=1000), LUNE), LUNE).points
    interp = fit_pum(data, LUNE, family="ga", eval_points=probes)
    got = interp(probes)
    truth = eval_test("f1", probes)
    assert np.max(np.abs(got - truth)) <= 0.05
    at_nodes = interp(data.points)
    assert np.max(np.abs(at_nodes - data.values)) <= 1e-8 * (1 + np.max(np.abs(data.values)))
