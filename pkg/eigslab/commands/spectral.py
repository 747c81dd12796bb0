"""
matrices subcommand.
"""
import logging
import time

from ..dependencies import emit, record_run, require_valid, resolve_system
from ..models.schemas import MatricesReport
from ..services.spectral import matrices_report

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    p = subparsers.add_parser("matrices", help="mass matrix, degree matrix, distance family and spectral radii")
    p.add_argument("system")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.add_argument("--out")
    p.set_defaults(func=matrices_command)


def _format_matrix(rows: list[list[int]], indent: str = "  ") -> str:
    width = max((len(str(x)) for row in rows for x in row), default=1)
    return "\n".join(indent + " ".join(f"{x:>{width}}" for x in row) for row in rows)


def format_report(report: MatricesReport) -> str:
    lines = [f"system: {report.system}", "", f"M  (rho = {report.rho_M:.6f})", _format_matrix(report.mass_matrix),
             "", f"N  (rho = {report.rho_N:.6f}; order (1,+),(1,-),(2,+),...)", _format_matrix(report.degree_matrix),
             "", f"D  ({len(report.distance_family)} members, rho_min = {report.rho_min_D:.6f})"]
    for member, paths in zip(report.distance_family, report.path_choices):
        lines.append(_format_matrix(member))
        lines.append("  paths: " + "; ".join("-".join(map(str, p)) for p in paths))
        lines.append("")
    return "\n".join(lines)


def matrices_command(args) -> int:
    started = time.time()
    system = require_valid(resolve_system(args.system))
    logger.info(f"=== MATRICES {system.name} ===")
    report = matrices_report(system)
    text = report.model_dump_json(indent=2) if args.json else format_report(report)
    outputs = emit(text, args.out)
    record_run(args, outputs, started, system=system)
    return 0
