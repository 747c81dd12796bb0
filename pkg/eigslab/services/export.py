"""
Graph and trace export: DOT, JSON and CSV.
"""
import logging

import pandas as pd

from ..models.schemas import TraceResult
from .system import LevelGraph

logger = logging.getLogger(__name__)

# colour index -> DOT colour name; cycles for larger K
PALETTE = ["red", "blue", "darkgreen", "orange", "purple", "brown", "magenta", "cyan"]


def dot_colour(colour: int) -> str:
    return PALETTE[(colour - 1) % len(PALETTE)]


def level_graph_dot(g: LevelGraph, name: str = "Xi") -> str:
    """Directed DOT with per-vertex birth level and per-edge colour."""
    dot = f'digraph "{name}_{g.level}" {{\n'
    dot += "    node [shape=point];\n"
    for v, birth in enumerate(g.birth_level.tolist()):
        attrs = f'birth_level={birth}'
        if v in (g.terminal_plus, g.terminal_minus):
            label = "v+" if v == g.terminal_plus else "v-"
            attrs += f', shape=circle, label="{label}"'
        dot += f"    {v} [{attrs}];\n"
    for u, v, colour in g.edge_list():
        dot += f'    {u} -> {v} [colour={colour}, color="{dot_colour(colour)}"];\n'
    dot += "}\n"
    return dot


def level_graph_json(g: LevelGraph) -> str:
    return g.to_export().model_dump_json(indent=2)


def trace_frame(result: TraceResult) -> pd.DataFrame:
    return pd.DataFrame({"step": range(len(result.vertices)), "vertex": result.vertices})


def trace_csv(result: TraceResult) -> str:
    return trace_frame(result).to_csv(index=False)


def trace_dot(g: LevelGraph, result: TraceResult, name: str = "trace") -> str:
    """Undirected DOT of the graph in grey with traversed edges overlaid in red, pen width by visit count."""
    visits: dict[tuple[int, int], int] = {}
    for u, v in zip(result.vertices, result.vertices[1:]):
        key = (min(u, v), max(u, v))
        visits[key] = visits.get(key, 0) + 1
    top = max(visits.values(), default=1)

    dot = f'graph "{name}" {{\n'
    dot += "    node [shape=point];\n"
    dot += f'    {result.start} [shape=circle, color="red", label="start"];\n'
    seen = set()
    for u, v, _ in g.edge_list():
        key = (min(u, v), max(u, v))
        if key in visits:
            if key in seen:
                continue
            seen.add(key)
            width = 1 + 4 * visits[key] / top
            dot += f'    {u} -- {v} [color="red", penwidth={width:.2f}, visits={visits[key]}];\n'
        else:
            dot += f'    {u} -- {v} [color="grey"];\n'
    dot += "}\n"
    logger.debug(f"trace overlay: {len(visits)} distinct edges visited out of {g.n_edges}")
    return dot
