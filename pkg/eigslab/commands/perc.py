"""
perc subcommands: critical DHL percolation resistance exponent, exact laws,
moment checks, dispersion and cluster dimensions.
"""
import logging
import math
import time
from fractions import Fraction

import pandas as pd

from ..config import DEFAULT_SEED, PERC_LEVELS, PERC_POPULATION
from ..dependencies import emit, record_run
from ..exceptions import InsufficientData, UsageError
from ..services.percolation import (
    ALPHA_LOWER_BOUND, P_C, cluster_dimension_report, concentration_exponent, estimate_alpha, exact_distribution,
    exact_report, moment_diagnostics, moment_sweep, no_deterministic_limit_demo, parse_p, perc_params,
)

logger = logging.getLogger(__name__)

TRAJECTORY_COLUMNS = ["level", "quenched", "annealed", "gap", "pop_std", "product_moment", "second_moment_ratio"]


def _levels(text: str) -> list[int]:
    try:
        levels = sorted({int(x) for x in text.split(",")})
    except ValueError:
        raise UsageError(f"cannot parse levels {text!r}")
    if levels[0] < 1:
        raise UsageError("levels must be >= 1")
    return levels


def _exact_p(text: str):
    """Rationals such as 1/2 stay exact; anything else goes through parse_p."""
    if "/" in text:
        try:
            return Fraction(text)
        except ValueError:
            raise UsageError(f"cannot parse p={text!r}")
    return parse_p(text)


def _add_population_args(p, levels_default: int = PERC_LEVELS) -> None:
    p.add_argument("--p", default="pc", help="occupation probability or 'pc' (default)")
    p.add_argument("--population", type=int, default=PERC_POPULATION)
    p.add_argument("--levels", type=int, default=levels_default)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)


def register(subparsers) -> None:
    perc = subparsers.add_parser("perc", help="critical percolation on the diamond hierarchical lattice")
    sub = perc.add_subparsers(dest="perc_command", required=True)

    p = sub.add_parser("alpha", help="quenched/annealed resistance exponent by population dynamics")
    _add_population_args(p)
    p.add_argument("--trajectory", help="write the per-level CSV here instead of stdout")
    p.add_argument("--every", type=int, default=1, help="trajectory stride in levels")
    p.add_argument("--json", action="store_true", help="print the estimate as JSON")
    p.add_argument("--out", help="JSON estimate destination")
    p.set_defaults(func=alpha_command)

    p = sub.add_parser("exact", help="exact law of R_n for n <= 3")
    p.add_argument("--p", default="pc", help="number, rational a/b or 'pc'")
    p.add_argument("--levels", type=int, choices=[0, 1, 2, 3], required=True)
    p.add_argument("--out")
    p.set_defaults(func=exact_command)

    p = sub.add_parser("dims", help="dimensions of the critical cluster")
    _add_population_args(p)
    p.add_argument("--alpha", default="auto", help="alpha value, or 'auto' to estimate it")
    p.add_argument("--out")
    p.set_defaults(func=dims_command)

    p = sub.add_parser("moments", help="moment bounds along one population run")
    _add_population_args(p)
    p.add_argument("--at", default="1,10,50,100,200", help="levels to report")
    p.add_argument("--slack", type=float, default=0.01)
    p.add_argument("--json", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=moments_command)

    p = sub.add_parser("dispersion", help="quantile spread of lambda^n R_n")
    _add_population_args(p)
    p.add_argument("--lam", default="auto", help="scaling lambda, or 'auto' for exp(-alpha)")
    p.add_argument("--at", help="levels to report")
    p.add_argument("--out")
    p.set_defaults(func=dispersion_command)


def alpha_command(args) -> int:
    started = time.time()
    p = parse_p(args.p)
    logger.info(f"=== PERC ALPHA p={p:.6f} ===")
    estimate = estimate_alpha(p, args.population, args.levels, seed=args.seed, workers=args.workers,
                              trajectory_every=args.every)
    if p == P_C and estimate.quenched < ALPHA_LOWER_BOUND - estimate.stderr:
        logger.warning(f"quenched estimate {estimate.quenched:.6f} below the lower bound {ALPHA_LOWER_BOUND:.6f}")
    try:
        logger.info(f"concentration exponent {concentration_exponent(estimate.trajectory):.3f}")
    except InsufficientData as e:
        logger.debug(e.detail)

    frame = pd.DataFrame([s.model_dump() for s in estimate.trajectory])[TRAJECTORY_COLUMNS]
    summary = estimate.model_copy(update={"trajectory": []}).model_dump_json(indent=2)
    outputs = []
    if args.trajectory:
        outputs += emit(frame.to_csv(index=False), args.trajectory)
    if args.json or args.out:
        outputs += emit(summary, args.out)
    if not args.trajectory and not args.json:
        outputs += emit(frame.to_csv(index=False), None)
    record_run(args, outputs, started, seed=args.seed)
    return 0


def exact_command(args) -> int:
    started = time.time()
    p = _exact_p(args.p)
    logger.info(f"=== PERC EXACT p={float(p):.6f} level {args.levels} ===")
    report = exact_report(p, args.levels)
    diagnostics = moment_diagnostics(exact_distribution(p, args.levels), perc_params(float(p)), args.levels)
    logger.info(f"E[R]E[1/R] = {diagnostics.product:.6f}, E[R^2]/E[R]^2 = {diagnostics.second_moment_ratio:.6f}")
    outputs = emit(report.model_dump_json(indent=2), args.out)
    record_run(args, outputs, started)
    return 0


def dims_command(args) -> int:
    started = time.time()
    p = parse_p(args.p)
    alpha = None
    if args.alpha != "auto":
        try:
            alpha = float(args.alpha)
        except ValueError:
            raise UsageError(f"cannot parse alpha={args.alpha!r}")
    logger.info(f"=== PERC DIMS p={p:.6f} ===")
    report = cluster_dimension_report(p, alpha=alpha, population_size=args.population, n_levels=args.levels,
                                      seed=args.seed, workers=args.workers)
    logger.warning(report.note)
    outputs = emit(report.model_dump_json(indent=2), args.out)
    record_run(args, outputs, started, seed=args.seed if alpha is None else None)
    return 0


def moments_command(args) -> int:
    started = time.time()
    p = parse_p(args.p)
    levels = _levels(args.at)
    logger.info(f"=== PERC MOMENTS p={p:.6f} ===")
    reports = moment_sweep(p, levels, population_size=args.population, seed=args.seed, workers=args.workers,
                           slack=args.slack)
    failed = [r.level for r in reports if not (r.product_ok and r.second_moment_ok)]
    if failed:
        logger.warning(f"moment bounds exceeded at levels {failed}")
    if args.json:
        text = "[" + ",\n".join(r.model_dump_json(indent=2) for r in reports) + "]"
    else:
        text = pd.DataFrame([r.model_dump() for r in reports]).to_csv(index=False)
    outputs = emit(text, args.out)
    record_run(args, outputs, started, seed=args.seed)
    return 0


def dispersion_command(args) -> int:
    started = time.time()
    p = parse_p(args.p)
    if args.lam == "auto":
        alpha = estimate_alpha(p, args.population, min(args.levels, 500), seed=args.seed, workers=args.workers,
                               trajectory_every=args.levels).quenched
        lam = math.exp(-alpha)
        logger.info(f"lambda = exp(-{alpha:.6f}) = {lam:.6f}")
    else:
        try:
            lam = float(args.lam)
        except ValueError:
            raise UsageError(f"cannot parse lambda={args.lam!r}")
    logger.info(f"=== PERC DISPERSION p={p:.6f} lambda={lam:.6f} ===")
    stats = no_deterministic_limit_demo(p, lam, args.levels, population_size=args.population, seed=args.seed,
                                        report_levels=_levels(args.at) if args.at else None, workers=args.workers)
    frame = pd.DataFrame([level.model_dump() for level in stats.levels])
    outputs = emit(frame.to_csv(index=False), args.out)
    record_run(args, outputs, started, seed=args.seed)
    return 0
