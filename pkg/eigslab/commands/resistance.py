"""
psi and resistance subcommands.
"""
import json
import logging
import time

import numpy as np

from ..config import PSI_MAX_ITER, PSI_TOL
from ..dependencies import emit, record_run, require_valid, resolve_system
from ..exceptions import UsageError
from ..services.resistance import (
    BACKENDS, check_walk_dimension_bound, effective_resistance, psi_eigenpair, psi_power, psi_trace,
)
from ..services.system import build
from ..services.walker import resolve_vertex

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    p = subparsers.add_parser("psi", help="Perron eigenpair of the renormalisation map")
    p.add_argument("system")
    p.add_argument("--iters", type=int, default=3, help="trace length (default 3)")
    p.add_argument("--tol", type=float, default=PSI_TOL)
    p.add_argument("--max-iter", type=int, default=PSI_MAX_ITER)
    p.add_argument("--trace", action="store_true", help="print the iterates Psi^k(1)")
    p.add_argument("--out")
    p.set_defaults(func=psi_command)

    p = subparsers.add_parser("resistance", help="effective resistance on a built level")
    p.add_argument("system")
    p.add_argument("--level", "-n", type=int, required=True)
    p.add_argument("--weights", help="colour resistances w1,...,wK (default all 1)")
    p.add_argument("--from", dest="source", default="terminal+")
    p.add_argument("--to", dest="target", default="terminal-")
    p.add_argument("--backend", choices=BACKENDS, default="laplacian")
    p.add_argument("--walk-bound", action="store_true",
                   help="also check |E| R(u,v) >= d(u,v)^2 for the pair, unit resistances")
    p.add_argument("--out")
    p.set_defaults(func=resistance_command)


def parse_weights(text: str | None, K: int) -> np.ndarray:
    if text is None:
        return np.ones(K)
    try:
        values = np.array([float(w) for w in text.split(",")])
    except ValueError:
        raise UsageError(f"cannot parse weights {text!r}")
    if values.shape[0] != K:
        raise UsageError(f"expected {K} weights, got {values.shape[0]}")
    return values


def psi_command(args) -> int:
    started = time.time()
    system = require_valid(resolve_system(args.system))
    logger.info(f"=== PSI {system.name} ===")
    pair = psi_eigenpair(system, tol=args.tol, max_iter=args.max_iter)
    payload = {"system": system.name, "eigenpair": pair.model_dump()}

    if args.trace:
        trace = psi_trace(system, args.iters, eigenpair=pair)
        payload["trace"] = trace.model_dump()
        for k, x in enumerate(trace.iterates):
            logger.info(f"x^({k}) = ({', '.join(f'{v:.5f}' for v in x)})")

    outputs = emit(json.dumps(payload, indent=2), args.out)
    record_run(args, outputs, started, system=system)
    return 0


def resistance_command(args) -> int:
    started = time.time()
    system = require_valid(resolve_system(args.system))
    x = parse_weights(args.weights, system.K)
    logger.info(f"=== RESISTANCE {system.name} level {args.level} ===")
    g = build(system, args.level, edge_cap=args.edge_cap)
    a, b = resolve_vertex(g, args.source), resolve_vertex(g, args.target)
    value = effective_resistance(g, x[g.colours - 1], a, b, backend=args.backend)

    payload = {
        "system": system.name,
        "level": args.level,
        "from": a,
        "to": b,
        "weights": x.tolist(),
        "backend": args.backend,
        "resistance": value,
    }
    if {a, b} == {g.terminal_plus, g.terminal_minus}:
        payload["renormalised"] = float(psi_power(system, x, args.level)[system.initial_colour - 1])
    if args.walk_bound:
        checks = check_walk_dimension_bound(g, [(a, b)])
        for check in checks:
            if not check.holds:
                logger.warning(f"walk bound fails for ({check.u}, {check.v}): "
                               f"{check.energy_product:.6g} < {check.distance_squared:.6g}")
        payload["walk_bound"] = [check.model_dump() for check in checks]

    outputs = emit(json.dumps(payload, indent=2), args.out)
    record_run(args, outputs, started, system=system)
    return 0
