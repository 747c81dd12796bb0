"""
validate and build subcommands.
"""
import logging
import time

from ..dependencies import emit, record_run, require_valid, resolve_system
from ..models.schemas import BuildSummary
from ..services.export import level_graph_dot, level_graph_json
from ..services.spectral import distance_family, predict_terminal_degree, rho_min
from ..services.system import build, predict_counts, terminal_degree, terminal_distance
from ..services.validation import validate, validate_canonical

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    p = subparsers.add_parser("validate", help="check canonicality and distance-positivity")
    p.add_argument("system", help="system document, preset name or flower:u,v")
    p.add_argument("--method", choices=["flow", "enumerate"], default="flow",
                   help="canonicality check (default: flow)")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.set_defaults(func=validate_command)

    p = subparsers.add_parser("build", help="materialise level n")
    p.add_argument("system")
    p.add_argument("--level", "-n", type=int, required=True)
    p.add_argument("--format", choices=["summary", "json", "dot"], default="summary")
    p.add_argument("--out")
    p.set_defaults(func=build_command)


def validate_command(args) -> int:
    started = time.time()
    system = resolve_system(args.system)
    logger.info(f"=== VALIDATE {system.name} ===")
    report = validate(system)
    if args.method != "flow":
        # re-run the canonicality part with the requested method
        canonical = validate_canonical(system, method=args.method)
        warnings = [v for v in canonical if v.kind == "decoration"]
        others = [v for v in report.violations if v.kind not in ("not_canonical", "decoration")]
        violations = [v for v in canonical if v.kind != "decoration"] + others
        report = report.model_copy(update={"violations": violations, "warnings": warnings, "valid": not violations})

    outputs = emit(report.model_dump_json(indent=2), args.out)
    record_run(args, outputs, started, system=system)
    return 0 if report.valid else 1


def build_command(args) -> int:
    started = time.time()
    system = require_valid(resolve_system(args.system))
    logger.info(f"=== BUILD {system.name} level {args.level} ===")
    g = build(system, args.level, edge_cap=args.edge_cap)

    if args.format == "json":
        text = level_graph_json(g)
    elif args.format == "dot":
        text = level_graph_dot(g, name=system.name)
    else:
        vertices, edges, per_colour = predict_counts(system, args.level)
        summary = BuildSummary(
            system=system.name,
            level=g.level,
            vertices=g.n_vertices,
            edges=g.n_edges,
            edges_per_colour=[int((g.colours == c).sum()) for c in range(1, system.K + 1)],
            predicted_vertices=vertices,
            predicted_edges=edges,
            terminal_degree=terminal_degree(g),
            predicted_terminal_degree=predict_terminal_degree(system, args.level),
            terminal_distance=terminal_distance(g),
            rho_min_power=rho_min(distance_family(system)) ** args.level,
        )
        if (summary.vertices, summary.edges) != (vertices, edges):
            logger.warning(f"built counts {summary.vertices}/{summary.edges} differ from prediction {vertices}/{edges}")
        text = summary.model_dump_json(indent=2)

    outputs = emit(text, args.out)
    record_run(args, outputs, started, system=system)
    return 0
