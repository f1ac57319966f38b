"""Command-line surface: integrate, convergence, rulecheck, points, pointwise.

Exit codes: 0 success, 2 validation failure, 3 configuration error,
4 runtime numerical failure.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

import numpy as np

from . import harness
from .errors import ParseError, ScatQuadError
from .geometry import Rectangle, filter_to_domain, halton, map_to_bbox, parse_domain
from .rules import load_rule, monomial_moments, validate_rule

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_CONFIG = 3
EXIT_RUNTIME = 4


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--domain", default="rect:0,1,0,1",
                   help="rect:ax,bx,ay,by | disk:cx,cy,r | diskdiff:cx1,cy1,r1,cx2,cy2,r2")
    p.add_argument("--points", default="halton:400", dest="points_spec",
                   help="halton:N[:skip] | file:<path with x y lines>")
    p.add_argument("--function", default="f1",
                   help="f1|f2|f3|f4 | file:<path with x y f lines>")
    p.add_argument("--method", default="disc", choices=harness.METHODS)
    p.add_argument("--rule", default="gauss", dest="rule_spec",
                   help="gauss | gauss:<n> | file:<path> | files:<template with {degree}>")
    p.add_argument("--reference-rule", default=None,
                   help="rule file applied to the exact integrand to get the reference")
    p.add_argument("--out", default=None, help="output CSV path (default: stdout)")
    p.add_argument("--timing", action="store_true",
                   help="populate the wall_time_ms column (makes output nondeterministic)")
    p.add_argument("--theta", type=float, default=2.0)
    p.add_argument("--dmax", type=int, default=10)
    p.add_argument("--local-degree", type=int, default=9)
    p.add_argument("--mu", type=float, default=2.0)
    p.add_argument("--q", type=int, default=None)
    p.add_argument("--kernel", default="ga", help="pum kernel family: ga|imq|w2")
    p.add_argument("--eps-grid", default=None,
                   help="log-spaced shape grid min:max:count (default 1e-2:1e2:50)")
    p.add_argument("--delta-grid", default="1.0,1.25,1.5,2.0",
                   help="comma list of patch radius multipliers")
    p.add_argument("--patch-target", type=int, default=25)
    p.add_argument("--lscf-degree", type=int, default=None)


def _parse_eps_grid(text: Optional[str]):
    if text is None:
        return None
    lo, hi, count = text.split(":")
    return np.logspace(np.log10(float(lo)), np.log10(float(hi)), int(count))


def _parse_degrees(text: str) -> list[int]:
    start, step, stop = (int(tok) for tok in text.split(":"))
    if step <= 0 or stop < start or start < 0:
        raise ValueError(f"bad degree sweep {text!r}")
    return list(range(start, stop + 1, step))


def _build_config(args) -> harness.ExperimentConfig:
    return harness.ExperimentConfig(
        domain=parse_domain(args.domain),
        points_spec=args.points_spec,
        function=args.function,
        method=args.method,
        rule_spec=args.rule_spec,
        reference_rule=args.reference_rule,
        timing=args.timing,
        theta=args.theta,
        d_max=args.dmax,
        local_degree=args.local_degree,
        mu=args.mu,
        q=args.q,
        kernel=args.kernel,
        eps_grid=_parse_eps_grid(args.eps_grid),
        delta_grid=tuple(float(t) for t in args.delta_grid.split(",")),
        patch_target=args.patch_target,
        lscf_degree=args.lscf_degree,
    )


def _emit(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="ascii", newline="") as fh:
            fh.write(text)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(prog="scatquad",
                                     description="Cubature on scattered data via "
                                                 "interpolant resampling at PI rule nodes.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_int = sub.add_parser("integrate", help="integrate once at a single rule degree")
    _add_common(p_int)
    p_int.add_argument("--degree", type=int, required=True)

    p_conv = sub.add_parser("convergence", help="sweep rule degrees, emit CSV")
    _add_common(p_conv)
    p_conv.add_argument("--degrees", default="2:2:30", help="start:step:stop")

    p_rule = sub.add_parser("rulecheck", help="validate a rule file")
    p_rule.add_argument("--rule", required=True, help="file:<path>")
    p_rule.add_argument("--domain", default=None)
    p_rule.add_argument("--moment-degree", type=int, default=None,
                        help="check moments up to this degree (rectangles only)")

    p_pts = sub.add_parser("points", help="dump Halton point sets")
    p_pts.add_argument("--n", type=int, required=True)
    p_pts.add_argument("--skip", type=int, default=0)
    p_pts.add_argument("--domain", default=None,
                       help="map to this domain's bbox and filter to the domain")
    p_pts.add_argument("--out", default=None)

    p_pw = sub.add_parser("pointwise", help="pointwise error/estimate CSV at test points")
    _add_common(p_pw)
    p_pw.add_argument("--test-points", type=int, default=100)
    p_pw.add_argument("--test-skip", type=int, default=2000)

    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK

    try:
        return _dispatch(args)
    except (ValueError, ParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ScatQuadError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


def _dispatch(args) -> int:
    if args.command == "rulecheck":
        return _rulecheck(args)

    if args.command == "points":
        pts = halton(args.n, args.skip)
        if args.domain is not None:
            domain = parse_domain(args.domain)
            pts = filter_to_domain(map_to_bbox(pts, domain), domain)
        lines = "".join(f"{harness.FLOAT_FMT % x} {harness.FLOAT_FMT % y}\n"
                        for x, y in pts.points)
        _emit(lines, args.out)
        return EXIT_OK

    cfg = _build_config(args)

    if args.command == "integrate":
        record = harness.integrate_once(cfg, args.degree)
        _emit(harness.records_to_csv([record], timing=cfg.timing), args.out)
        return EXIT_OK

    if args.command == "convergence":
        cfg.degrees = _parse_degrees(args.degrees)
        records = harness.run_convergence(cfg)
        _emit(harness.records_to_csv(records, timing=cfg.timing), args.out)
        if all(r.error for r in records):
            print("numerical failure: every sweep degree failed", file=sys.stderr)
            return EXIT_RUNTIME
        return EXIT_OK

    if args.command == "pointwise":
        records = harness.run_pointwise(cfg, n_test=args.test_points,
                                        test_skip=args.test_skip)
        _emit(harness.pointwise_to_csv(records), args.out)
        return EXIT_OK

    raise ValueError(f"unknown command {args.command!r}")


def _rulecheck(args) -> int:
    spec = args.rule
    path = spec[5:] if spec.startswith("file:") else spec
    domain = parse_domain(args.domain) if args.domain else None
    try:
        rule = load_rule(path, domain)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ValueError as exc:
        # Nonpositive weight or non-finite entry: the PI property fails.
        print(f"degree: unknown\npositivity: false\ninteriority: unknown\nreason: {exc}")
        return EXIT_VALIDATION
    if isinstance(rule.domain, Rectangle):
        moment_degree = args.moment_degree if args.moment_degree is not None else rule.degree
        moments = monomial_moments(rule.domain, max(moment_degree, rule.degree))
        report = validate_rule(rule, moments)
        residual = harness.FLOAT_FMT % report.max_relative_moment_residual
        positivity, interiority = report.positivity, report.interiority
    else:
        # No analytic moments off rectangles: report the PI flags only.
        from .geometry import contains_many
        positivity = bool(np.all(rule.weights > 0))
        interiority = bool(np.all(contains_many(rule.domain, rule.nodes)))
        residual = "n/a"
    print(f"degree: {rule.degree}")
    print(f"count: {rule.nu}")
    print(f"positivity: {str(positivity).lower()}")
    print(f"interiority: {str(interiority).lower()}")
    print(f"max_relative_moment_residual: {residual}")
    return EXIT_OK if (positivity and interiority) else EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
