"""
walk subcommand: exit times, commute times, return probabilities and traces.
"""
import logging
import time

import pandas as pd

from ..config import DEFAULT_SEED
from ..dependencies import emit, record_run, require_valid, resolve_system
from ..exceptions import UsageError
from ..services.dims import dimensions
from ..services.export import trace_csv, trace_dot
from ..services.spectral import distance_family, rho_min
from ..services.system import build
from ..services.walker import (
    DEFAULT_MAX_STEPS, commute_time, exit_times, geometric_times, resolve_vertex, return_probability, trace,
    walk_dimension_estimate,
)

logger = logging.getLogger(__name__)

EXIT_COLUMNS = ["radius_m", "r", "mean_tau", "stderr", "trials", "censored"]


def _int_list(text: str) -> list[int]:
    try:
        if "-" in text and "," not in text:
            lo, hi = text.split("-")
            return list(range(int(lo), int(hi) + 1))
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise UsageError(f"cannot parse integer list {text!r} (use 1,2,3 or 1-3)")


def register(subparsers) -> None:
    p = subparsers.add_parser("walk", help="simple random walk experiments on a built level")
    p.add_argument("system")
    p.add_argument("--level", "-n", type=int, required=True)
    p.add_argument("--start", default="terminal+", help="terminal+, terminal- or a vertex id")
    p.add_argument("--mode", choices=["exit", "commute", "return", "trace"], default="exit")
    p.add_argument("--m", default="1,2,3", help="radius exponents: r = rho_min(D)^m (exit mode)")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--max-steps", type=int, default=DEFAULT_MAX_STEPS)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--to", default="terminal-", help="second vertex (commute mode)")
    p.add_argument("--times", help="explicit half-times t, P(X_2t = start) (return mode)")
    p.add_argument("--t0", type=int, default=1)
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--method", choices=["auto", "exact", "monte_carlo"], default="auto")
    p.add_argument("--steps", type=int, default=1000, help="trace length (trace mode)")
    p.add_argument("--dot-out", help="DOT overlay of the trace (trace mode)")
    p.add_argument("--json", action="store_true", help="JSON instead of CSV (exit and return modes)")
    p.add_argument("--out")
    p.set_defaults(func=walk_command)


def _exit_mode(args, system, g, v) -> str:
    m_values = _int_list(args.m)
    if len(m_values) >= 3:
        estimate = walk_dimension_estimate(
            system, args.level, m_values, start=v, trials=args.trials, max_steps=args.max_steps,
            seed=args.seed, workers=args.workers, predicted=dimensions(system).dim_W, g=g,
        )
        logger.info(f"walk dimension slope {estimate.slope:.4f} +- {estimate.stderr:.4f} "
                    f"(predicted {estimate.predicted:.4f})")
        if args.json:
            return estimate.model_dump_json(indent=2)
        samples = estimate.samples
    else:
        rho = rho_min(distance_family(system))
        samples = exit_times(g, v, [rho ** m for m in m_values], trials=args.trials, max_steps=args.max_steps,
                             seed=args.seed, workers=args.workers, radius_m=m_values)
        if args.json:
            return "[" + ",\n".join(s.model_dump_json(indent=2) for s in samples) + "]"
    frame = pd.DataFrame([[s.radius_m, s.radius, s.mean_tau, s.stderr, s.trials, s.censored] for s in samples],
                         columns=EXIT_COLUMNS)
    return frame.to_csv(index=False)


def _return_mode(args, g, v) -> str:
    times = _int_list(args.times) if args.times else geometric_times(args.t0, args.count)
    result = return_probability(g, v, times, method=args.method, trials=args.trials, seed=args.seed,
                                workers=args.workers)
    logger.warning(result.caveat)
    if args.json:
        return result.model_dump_json(indent=2)
    frame = pd.DataFrame({"t": result.times, "probability": result.probabilities, "stderr": result.stderrs})
    return frame.to_csv(index=False)


def walk_command(args) -> int:
    started = time.time()
    system = require_valid(resolve_system(args.system))
    logger.info(f"=== WALK {args.mode.upper()} {system.name} level {args.level} ===")
    g = build(system, args.level, edge_cap=args.edge_cap)
    v = resolve_vertex(g, args.start)

    outputs = []
    if args.mode == "exit":
        text = _exit_mode(args, system, g, v)
    elif args.mode == "commute":
        result = commute_time(g, v, resolve_vertex(g, args.to), trials=args.trials, max_steps=args.max_steps,
                              seed=args.seed, workers=args.workers)
        text = result.model_dump_json(indent=2)
    elif args.mode == "return":
        text = _return_mode(args, g, v)
    else:
        result = trace(g, v, args.steps, seed=args.seed)
        text = trace_csv(result)
        if args.dot_out:
            outputs += emit(trace_dot(g, result, name=f"{system.name}_trace"), args.dot_out)

    outputs = emit(text, args.out) + outputs
    record_run(args, outputs, started, system=system, seed=args.seed)
    return 0
