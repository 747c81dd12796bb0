"""
Shared dependencies for the commands: system resolution, the validation gate,
result output and run manifests.
"""
import logging
import sys
import time
from pathlib import Path

from . import __version__
from .config import OUTPUT_DIR
from .exceptions import ValidationFailed
from .models.schemas import RunManifest
from .services.presets import load_preset
from .services.system import EIGSystem, config_hash, load_system_file
from .services.validation import validate

logger = logging.getLogger(__name__)


def resolve_system(ref: str) -> EIGSystem:
    """A path to a system document, a bundled preset name, or 'flower:u,v'."""
    logger.debug(f"Resolving system reference: {ref}")
    path = Path(ref)
    if path.suffix == ".json" and path.exists():
        return load_system_file(path)
    if path.suffix == ".json":
        # presets/dhl.json style references fall back to the bundled copy
        return load_preset(path.stem)
    return load_preset(ref)


def require_valid(system: EIGSystem) -> EIGSystem:
    """Gate every analysis on the standing assumptions."""
    logger.debug("=== VALIDATION GATE ===")
    report = validate(system)
    if not report.valid:
        logger.error(f"{system.name} failed validation with {len(report.violations)} violation(s)")
        raise ValidationFailed(report.violations)
    logger.debug(f"{system.name} passed validation ({len(report.warnings)} warning(s))")
    return system


def emit(text: str, out: str | None = None) -> list[str]:
    """Write a result to `out` (created with parents) or stdout; returns the written paths."""
    if out is None or out == "-":
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
        return []
    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    logger.info(f"Wrote {path}")
    return [str(path)]


def write_manifest(command: str, argv: list[str], outputs: list[str], started: float, directory: str | None = None,
                   system: EIGSystem | None = None, seed: int | None = None) -> Path:
    """Record provenance next to the first output, or in the output directory for stdout runs."""
    manifest = RunManifest(
        command=list(argv),
        config_hash=config_hash(system) if system is not None else None,
        seed=seed,
        tool_version=__version__,
        wall_time=time.time() - started,
        outputs=outputs,
    )
    if outputs:
        path = Path(outputs[0]).with_suffix(".manifest.json")
    else:
        path = Path(directory or OUTPUT_DIR) / f"eigslab-{command}.manifest.json"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(manifest.model_dump_json(indent=2))
    logger.debug(f"Manifest written to {path}")
    return path


def record_run(args, outputs: list[str], started: float, system: EIGSystem | None = None,
               seed: int | None = None) -> Path:
    """write_manifest from parsed command-line arguments."""
    return write_manifest(args.command, args.argv, outputs, started, directory=args.output_dir,
                          system=system, seed=seed)
