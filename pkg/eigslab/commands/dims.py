"""
dims and table1 subcommands.
"""
import logging
import math
import time

from ..dependencies import emit, record_run, require_valid, resolve_system
from ..services.dims import DIM_FIELDS, dimensions, format_table, local_dimensions, table1, table_frame

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    p = subparsers.add_parser("dims", help="all dimensions of a system")
    p.add_argument("system")
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true")
    fmt.add_argument("--csv", action="store_true")
    p.add_argument("--local", action="store_true", help="also report local mass/resistance dimensions")
    p.add_argument("--out")
    p.set_defaults(func=dims_command)

    p = subparsers.add_parser("table1", help="dimension table of the bundled systems with reference values")
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true")
    fmt.add_argument("--csv", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=table1_command)


def dims_command(args) -> int:
    started = time.time()
    system = require_valid(resolve_system(args.system))
    logger.info(f"=== DIMS {system.name} ===")
    report = dimensions(system)
    local = local_dimensions(system) if args.local else None

    if args.json:
        text = report.model_dump_json(indent=2)
        if local is not None:
            text = "[" + text + ",\n" + local.model_dump_json(indent=2) + "]"
    elif args.csv:
        row = {"system": report.system, **{k: getattr(report, k) for k in DIM_FIELDS},
               "recurrent": report.recurrent, "regime": report.regime}
        text = ",".join(row) + "\n" + ",".join(str(v) for v in row.values()) + "\n"
    else:
        cells = ["inf" if math.isinf(getattr(report, k)) else f"{getattr(report, k):.4f}" for k in DIM_FIELDS]
        klass = "Recc." if report.recurrent else "Tran."
        text = f"{report.system}: " + "  ".join(f"{k}={c}" for k, c in zip(DIM_FIELDS, cells)) + f"  {klass}"
        if local is not None:
            text += ("\nlocal: degenerate (rho(N) = 1)" if local.degenerate
                     else f"\nlocal: mass_loc={local.mass_loc:.4f} res_loc={local.res_loc:.4f}")

    outputs = emit(text, args.out)
    record_run(args, outputs, started, system=system)
    return 0


def table1_command(args) -> int:
    started = time.time()
    logger.info("=== TABLE ===")
    rows = table1()
    if args.json:
        text = "[" + ",\n".join(row.model_dump_json(indent=2) for row in rows) + "]"
    elif args.csv:
        text = table_frame(rows).to_csv(index=False)
    else:
        text = format_table(rows)
    outputs = emit(text, args.out)
    record_run(args, outputs, started)
    return 0
