"""
Bundled systems and the parametric (u,v)-flower.
"""
import logging
import re
from pathlib import Path

from ..exceptions import ConfigError
from .system import EIGSystem, RuleGraph, load_system_file

logger = logging.getLogger(__name__)

PRESET_DIR = Path(__file__).resolve().parent.parent / "presets"
FLOWER_PATTERN = re.compile(r"^flower[:(]?\s*(\d+)\s*,\s*(\d+)\s*\)?$")

# rows of the deterministic dimension table, in display order
TABLE_PRESETS = ["dhl", "flower:2,3", "flower:3,2", "vicsek", "laakso", "xi", "fig2"]


def list_presets() -> list[str]:
    return sorted(p.stem for p in PRESET_DIR.glob("*.json"))


def flower(u: int, v: int) -> EIGSystem:
    """Every edge becomes u edge-disjoint parallel paths of length v."""
    if u < 1 or v < 1:
        raise ConfigError(f"flower needs u, v >= 1, got ({u}, {v})", path="flower")
    edges = []
    next_id = 2
    for _ in range(u):
        chain = [0] + list(range(next_id, next_id + v - 1)) + [1]
        next_id += v - 1
        edges.extend((a, b, 1) for a, b in zip(chain, chain[1:]))
    rule = RuleGraph(vertex_count=next_id, edges=tuple(edges), plant_plus=0, plant_minus=1)
    return EIGSystem(
        K=1,
        rules=(rule,),
        initial_colour=1,
        name=f"flower-{u}-{v}",
        description=f"({u},{v})-flower",
    )


def load_preset(name: str) -> EIGSystem:
    """Resolve a preset name: a bundled stem such as 'dhl', or 'flower:u,v'."""
    match = FLOWER_PATTERN.match(name.strip())
    if match:
        return flower(int(match.group(1)), int(match.group(2)))
    path = PRESET_DIR / f"{name}.json"
    if not path.exists():
        logger.error(f"Unknown preset {name!r}; available: {list_presets()}")
        raise ConfigError(f"unknown preset {name!r} (available: {', '.join(list_presets())}, flower:u,v)")
    return load_system_file(path)
