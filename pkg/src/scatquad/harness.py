"""Experiment orchestration: point sampling, method fitting, degree sweeps.

One experiment fixes scattered data and a method, fits once, then applies
rules of increasing exactness degree to the fitted evaluator, recording
integral, reference, relative error, the node-gap bound when the true
integrand is known, and timing.  Output rows serialize to a fixed CSV
schema with 17-significant-digit floats so identical configurations
produce identical bytes.
"""

from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import engine, moving, mshep, pum, rbf
from .errors import ScatQuadError
from .geometry import (Domain, PointSet, Rectangle, boundary_distance,
                       filter_to_domain, halton, map_to_bbox)
from .rules import (CubatureRule, MomentVector, gauss_legendre_product,
                    load_rule, monomial_moments, moments_from_rule)
from .testfuncs import DOMAINS, FUNCTION_IDS, eval_test, reference_integral

METHODS = ("disc", "mq", "pum", "mshep9", "lscf", "exactf")
CSV_COLUMNS = ("method", "degree", "nu", "N", "integral", "reference",
               "relative_error", "node_gap_bound", "wall_time_ms", "error")
POINTWISE_COLUMNS = ("index", "error", "estimate", "mean_error", "mean_estimate")
FLOAT_FMT = "%.17g"


@dataclass
class ExperimentConfig:
    """Everything one sweep needs; method-specific knobs keep their defaults
    unless set."""

    domain: Domain
    points_spec: str = "halton:400"
    function: str = "f1"
    method: str = "disc"
    degrees: Sequence[int] = field(default_factory=lambda: list(range(2, 31, 2)))
    rule_spec: str = "gauss"
    reference_rule: Optional[str] = None
    timing: bool = False
    # moving interpolation
    theta: float = 2.0
    d_max: int = 10
    # multinode Shepard
    local_degree: int = 9
    mu: float = 2.0
    q: Optional[int] = None
    # RBF / PUM
    kernel: str = "ga"
    eps_grid: Optional[Sequence[float]] = None
    delta_grid: Sequence[float] = pum.DEFAULT_DELTA_MULTIPLIERS
    patch_target: int = 25
    # LS-CF
    lscf_degree: Optional[int] = None


@dataclass
class ConvergenceRecord:
    """One (method, degree) cell of an experiment."""

    method: str
    degree: int
    nu: int
    n_data: int
    integral: Optional[float] = None
    reference: Optional[float] = None
    relative_error: Optional[float] = None
    node_gap_bound: Optional[float] = None
    wall_time_ms: Optional[float] = None
    error: str = ""


def load_points(spec: str, domain: Domain) -> PointSet:
    """Resolve a point source.

    ``halton:N[:skip]`` draws N Halton points of the domain bounding box and
    keeps those inside the domain (all of them, for rectangles);
    ``file:path`` reads ``x y`` lines.
    """
    kind, _, rest = spec.partition(":")
    if kind == "halton":
        parts = rest.split(":")
        n = int(parts[0])
        skip = int(parts[1]) if len(parts) > 1 else 0
        unit = halton(n, skip)
        return filter_to_domain(map_to_bbox(unit, domain), domain)
    if kind == "file":
        pts = read_xy_file(rest)
        return filter_to_domain(pts, domain)
    raise ValueError(f"bad points spec {spec!r}")


def read_xy_file(path) -> PointSet:
    """Read ``x y`` lines (comments with # allowed)."""
    rows = _read_numeric_rows(path, 2)
    return PointSet(np.asarray(rows))


def read_xyf_file(path) -> PointSet:
    """Read ``x y f`` lines (comments with # allowed)."""
    rows = np.asarray(_read_numeric_rows(path, 3))
    return PointSet(rows[:, :2], rows[:, 2])


def _read_numeric_rows(path, n_fields: int) -> list:
    from .errors import ParseError
    rows = []
    with open(path, "r", encoding="ascii") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != n_fields:
                raise ParseError(path, line_no, f"expected {n_fields} fields, got {len(parts)}")
            try:
                rows.append([float(tok) for tok in parts])
            except ValueError:
                raise ParseError(path, line_no, f"bad number in {line!r}") from None
    if not rows:
        raise ParseError(path, 0, "no data lines")
    return rows


def resolve_data(cfg: ExperimentConfig) -> tuple[PointSet, Optional[Callable]]:
    """Scattered data with values, plus the true integrand when known."""
    if cfg.function.startswith("file:"):
        data = read_xyf_file(cfg.function[5:])
        data = filter_to_domain(data, cfg.domain)
        return data, None
    if cfg.function not in FUNCTION_IDS:
        raise ValueError(f"unknown function {cfg.function!r}")
    points = load_points(cfg.points_spec, cfg.domain)
    fid = cfg.function
    f = lambda pts: eval_test(fid, pts)
    return points.with_values(f(points.points)), f


def make_rule(cfg: ExperimentConfig, degree: int) -> CubatureRule:
    """Rule for one sweep degree: built-in Gauss on rectangles, or a loaded
    file (``files:`` templates substitute ``{degree}``)."""
    spec = cfg.rule_spec
    if spec == "gauss" or spec.startswith("gauss:"):
        if not isinstance(cfg.domain, Rectangle):
            raise ValueError("built-in gauss rules require a rectangle domain")
        n = degree if spec == "gauss" else int(spec.split(":", 1)[1])
        return gauss_legendre_product(cfg.domain, n)
    if spec.startswith("files:"):
        return load_rule(spec[6:].format(degree=degree), cfg.domain)
    if spec.startswith("file:"):
        return load_rule(spec[5:], cfg.domain)
    raise ValueError(f"bad rule spec {spec!r}")


def resolve_reference(cfg: ExperimentConfig, f: Optional[Callable]) -> Optional[float]:
    """Reference integral: a loaded high-degree rule applied to the true
    integrand when given, else the cached standard-domain reference."""
    if f is None:
        return None
    if cfg.reference_rule is not None:
        rule = load_rule(cfg.reference_rule, cfg.domain)
        return float(rule.weights @ f(rule.nodes))
    if cfg.function in FUNCTION_IDS and cfg.domain == DOMAINS[cfg.function]:
        return reference_integral(cfg.function)
    return None


def fit_method(cfg: ExperimentConfig, data: PointSet,
               eval_points: Optional[np.ndarray]) -> tuple[Callable, float]:
    """Fit the configured interpolation method once; returns (evaluator,
    fit seconds)."""
    t0 = time.perf_counter()
    if cfg.method == "disc":
        interp = moving.MovingInterpolant(
            data, cfg.domain, moving.MovingInterpConfig(d_max=cfg.d_max, theta=cfg.theta))
    elif cfg.method == "mq":
        eps, _ = rbf.select_epsilon(data, "mq", cfg.eps_grid)
        interp = rbf.fit_global(data, rbf.KernelSpec("mq", eps))
    elif cfg.method == "pum":
        interp = pum.fit_pum(data, cfg.domain, family=cfg.kernel,
                             epsilon_grid=cfg.eps_grid,
                             delta_multipliers=cfg.delta_grid,
                             points_per_patch_target=cfg.patch_target,
                             eval_points=eval_points)
    elif cfg.method == "mshep9":
        interp = mshep.fit_ms(data, cfg.local_degree, mu=cfg.mu, q=cfg.q)
    else:
        raise ValueError(f"{cfg.method!r} is not an interpolation method")
    return interp, time.perf_counter() - t0


def _relative_error(value: float, reference: Optional[float]) -> Optional[float]:
    if reference is None:
        return None
    return abs(value - reference) / max(abs(reference), np.finfo(float).tiny)


def run_convergence(cfg: ExperimentConfig) -> list[ConvergenceRecord]:
    """One record per sweep degree; failures land in the record's error
    column and the sweep continues."""
    if cfg.method not in METHODS:
        raise ValueError(f"unknown method {cfg.method!r}")
    data, f = resolve_data(cfg)
    reference = resolve_reference(cfg, f)
    n_data = len(data)
    degrees = list(cfg.degrees)
    records = []

    rules: dict[int, CubatureRule] = {}
    rule_errors: dict[int, str] = {}
    for n in degrees:
        try:
            rules[n] = make_rule(cfg, n)
        except (ScatQuadError, ValueError, OSError) as exc:
            rule_errors[n] = f"{type(exc).__name__}: {exc}"

    if cfg.method == "lscf":
        t0 = time.perf_counter()
        n_work = cfg.lscf_degree if cfg.lscf_degree is not None else engine.lscf_default_degree(n_data)
        moments = _lscf_moments(cfg, n_work)
        weights = engine.lscf_weights(data, moments, n_work, cfg.domain)
        integral = engine.lscf_integrate(weights, data.values)
        elapsed_ms = (time.perf_counter() - t0) * 1000.0
        for n in degrees:
            records.append(ConvergenceRecord(
                method=cfg.method, degree=n, nu=n_data, n_data=n_data,
                integral=integral, reference=reference,
                relative_error=_relative_error(integral, reference),
                wall_time_ms=elapsed_ms))
        return records

    if cfg.method == "exactf":
        if f is None:
            raise ValueError("exactf requires a known test function")
        interp, fit_seconds = f, 0.0
    else:
        eval_nodes = (np.vstack([r.nodes for r in rules.values()])
                      if rules and cfg.method == "pum" else None)
        interp, fit_seconds = fit_method(cfg, data, eval_nodes)

    for n in degrees:
        if n in rule_errors:
            records.append(ConvergenceRecord(method=cfg.method, degree=n, nu=0,
                                             n_data=n_data, error=rule_errors[n]))
            continue
        rule = rules[n]
        try:
            result = engine.approximate_cubature(rule, interp, cfg.method, f_true=f)
        except (ScatQuadError, np.linalg.LinAlgError) as exc:
            records.append(ConvergenceRecord(method=cfg.method, degree=n, nu=rule.nu,
                                             n_data=n_data,
                                             error=f"{type(exc).__name__}: {exc}"))
            continue
        records.append(ConvergenceRecord(
            method=cfg.method, degree=n, nu=rule.nu, n_data=n_data,
            integral=result.value, reference=reference,
            relative_error=_relative_error(result.value, reference),
            node_gap_bound=result.node_bound,
            wall_time_ms=(fit_seconds + result.wall_time_s) * 1000.0))
    return records


def _lscf_moments(cfg: ExperimentConfig, n_work: int) -> MomentVector:
    if isinstance(cfg.domain, Rectangle):
        return monomial_moments(cfg.domain, n_work)
    if cfg.reference_rule is None:
        raise ValueError("lscf on a curved domain needs --reference-rule for its moments")
    rule = load_rule(cfg.reference_rule, cfg.domain)
    if rule.degree < n_work:
        raise ValueError("reference rule degree too low for the lscf moments")
    return moments_from_rule(rule, n_work)


def integrate_once(cfg: ExperimentConfig, degree: int) -> ConvergenceRecord:
    """Single-degree variant of :func:`run_convergence`; failures surface."""
    sweep = ExperimentConfig(**{**cfg.__dict__, "degrees": [degree]})
    record = run_convergence(sweep)[0]
    if record.error:
        raise ScatQuadError(record.error)
    return record


def records_to_csv(records: Sequence[ConvergenceRecord], timing: bool = False) -> str:
    """Fixed-schema CSV with 17-significant-digit floats.

    The timing column is populated only on request so that identical
    configurations produce byte-identical output.
    """
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in records:
        writer.writerow([
            r.method, r.degree, r.nu, r.n_data,
            _fmt(r.integral), _fmt(r.reference), _fmt(r.relative_error),
            _fmt(r.node_gap_bound),
            _fmt(r.wall_time_ms) if timing else "",
            r.error,
        ])
    return buf.getvalue()


def _fmt(x: Optional[float]) -> str:
    return "" if x is None else FLOAT_FMT % x


@dataclass
class PointwiseRecord:
    index: int
    error: float
    estimate: float


def run_pointwise(cfg: ExperimentConfig, n_test: int = 100,
                  test_skip: int = 2000) -> list[PointwiseRecord]:
    """Pointwise moving-interpolation errors and estimates at Halton test
    points, ordered by increasing distance from the domain boundary.

    The test points continue the Halton sequence past ``test_skip`` so they
    never collide with the interpolation data (any size up to the skip).
    """
    if cfg.method != "disc":
        raise ValueError("pointwise error estimates exist only for the disc method")
    data, f = resolve_data(cfg)
    if f is None:
        raise ValueError("pointwise study requires a known test function")
    interp = moving.MovingInterpolant(
        data, cfg.domain, moving.MovingInterpConfig(d_max=cfg.d_max, theta=cfg.theta))
    test = filter_to_domain(map_to_bbox(halton(n_test, test_skip), cfg.domain), cfg.domain)
    order = np.argsort(boundary_distance(cfg.domain, test.points), kind="stable")
    pts = test.points[order]
    true_vals = f(pts)
    out = []
    for i, p in enumerate(pts):
        ev = interp.evaluate(p)
        out.append(PointwiseRecord(index=i + 1,
                                   error=abs(ev.value - float(true_vals[i])),
                                   estimate=ev.estimate))
    return out


def pointwise_to_csv(records: Sequence[PointwiseRecord]) -> str:
    mean_error = float(np.mean([r.error for r in records]))
    mean_estimate = float(np.mean([r.estimate for r in records]))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(POINTWISE_COLUMNS)
    for r in records:
        writer.writerow([r.index, _fmt(r.error), _fmt(r.estimate),
                         _fmt(mean_error), _fmt(mean_estimate)])
    return buf.getvalue()
