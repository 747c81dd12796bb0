"""
Application configuration and environment variables.
"""
import os
import logging
import sys

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

# Results go to stdout, so logs use stderr
logging.basicConfig(
    level=os.getenv("EIGSLAB_LOG_LEVEL", "WARNING").upper(),
    format=LOG_FORMAT,
    handlers=[
        logging.StreamHandler(sys.stderr)
    ]
)

logger = logging.getLogger(__name__)


def _int_env(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw.replace("_", ""))
    except ValueError:
        logger.warning(f"Ignoring non-integer {name}={raw!r}, using {default}")
        return default


# Environment variables
EDGE_CAP = _int_env("EIGSLAB_EDGE_CAP", 50_000_000)
DEFAULT_SEED = _int_env("EIGSLAB_SEED", 20240601)
DEFAULT_WORKERS = max(1, _int_env("EIGSLAB_WORKERS", 1))
OUTPUT_DIR = os.getenv("EIGSLAB_OUTPUT_DIR", ".")

# Numerical defaults
PSI_TOL = 1e-12
PSI_MAX_ITER = 10_000
DIRECT_SOLVE_MAX_VERTICES = 100_000
CG_RTOL = 1e-12
PATH_ENUMERATION_CAP = 10_000
SCALE_FREE_EPS = 1e-9

# Percolation defaults
PERC_POPULATION = 100_000
PERC_LEVELS = 2000
EXACT_MAX_LEVEL = 3


def set_verbosity(verbose: int) -> None:
    """Raise the root log level for -v (INFO) and -vv (DEBUG)."""
    if verbose <= 0:
        return
    level = logging.INFO if verbose == 1 else logging.DEBUG
    logging.getLogger().setLevel(level)


# Log startup configuration
logger.debug("=== STARTUP CONFIGURATION ===")
logger.debug(f"EIGSLAB_EDGE_CAP set: {os.getenv('EIGSLAB_EDGE_CAP') is not None} (cap={EDGE_CAP})")
logger.debug(f"EIGSLAB_SEED set: {os.getenv('EIGSLAB_SEED') is not None} (seed={DEFAULT_SEED})")
logger.debug(f"EIGSLAB_WORKERS set: {os.getenv('EIGSLAB_WORKERS') is not None} (workers={DEFAULT_WORKERS})")
logger.debug(f"EIGSLAB_OUTPUT_DIR: {OUTPUT_DIR}")
