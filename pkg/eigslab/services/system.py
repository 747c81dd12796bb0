"""
Edge iterated graph systems: rule graphs, level graphs and substitution.

A system replaces every coloured edge by a fresh copy of its colour's rule
graph, gluing the copy at its two planting vertices. Levels are built from a
single initial edge; vertex ids are allocated so that V(Xi^m) is a prefix of
V(Xi^n) for m <= n.
"""
import hashlib
import json
import logging
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np
import networkx as nx
from pydantic import ValidationError
from scipy import sparse
from scipy.sparse.csgraph import shortest_path

from ..config import EDGE_CAP
from ..exceptions import ConfigError, EdgeCapExceeded
from ..models.schemas import SystemConfig, RuleConfig, LevelGraphExport

logger = logging.getLogger(__name__)


# ============================================================================
# DOMAIN TYPES
# ============================================================================

@dataclass(frozen=True)
class RuleGraph:
    """Finite directed coloured graph with planting vertices beta+ and beta-."""
    vertex_count: int
    edges: tuple[tuple[int, int, int], ...]
    plant_plus: int
    plant_minus: int

    @cached_property
    def interior(self) -> tuple[int, ...]:
        """Non-planting vertices in id order; the order new copies are numbered in."""
        return tuple(v for v in range(self.vertex_count) if v not in (self.plant_plus, self.plant_minus))

    @cached_property
    def interior_position(self) -> dict[int, int]:
        return {v: k for k, v in enumerate(self.interior)}

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def colour_counts(self, K: int) -> np.ndarray:
        counts = np.zeros(K, dtype=np.int64)
        for _, _, colour in self.edges:
            counts[colour - 1] += 1
        return counts

    def undirected(self) -> nx.MultiGraph:
        """Underlying undirected multigraph; edge keys are rule edge indices."""
        G = nx.MultiGraph()
        G.add_nodes_from(range(self.vertex_count))
        for idx, (tail, head, colour) in enumerate(self.edges):
            G.add_edge(tail, head, key=idx, colour=colour)
        return G


@dataclass(frozen=True)
class EIGSystem:
    """K colours, one rule per colour, and the colour of the single initial edge."""
    K: int
    rules: tuple[RuleGraph, ...]
    initial_colour: int
    name: str = "system"
    allow_decorations: bool = False
    description: str | None = None

    def rule(self, colour: int) -> RuleGraph:
        return self.rules[colour - 1]

    @property
    def edge_counts(self) -> np.ndarray:
        return np.array([r.edge_count for r in self.rules], dtype=np.int64)

    @property
    def interior_counts(self) -> np.ndarray:
        return np.array([len(r.interior) for r in self.rules], dtype=np.int64)


@dataclass
class LevelGraph:
    """The finite graph Xi^n as parallel edge arrays plus vertex birth levels."""
    level: int
    n_vertices: int
    tails: np.ndarray
    heads: np.ndarray
    colours: np.ndarray
    birth_level: np.ndarray
    terminal_plus: int = 0
    terminal_minus: int = 1
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def n_edges(self) -> int:
        return int(self.tails.shape[0])

    def edge_list(self) -> list[tuple[int, int, int]]:
        return [(int(u), int(v), int(c)) for u, v, c in zip(self.tails, self.heads, self.colours)]

    def degrees(self) -> np.ndarray:
        """Vertex degrees counted with edge multiplicity."""
        return np.bincount(np.concatenate([self.tails, self.heads]), minlength=self.n_vertices)

    def adjacency(self) -> sparse.csr_matrix:
        """Symmetric adjacency matrix; entry (u, v) is the number of u-v edges."""
        if "adjacency" not in self._cache:
            ones = np.ones(self.n_edges, dtype=np.float64)
            A = sparse.coo_matrix(
                (np.concatenate([ones, ones]), (np.concatenate([self.tails, self.heads]),
                                                np.concatenate([self.heads, self.tails]))),
                shape=(self.n_vertices, self.n_vertices),
            ).tocsr()
            A.sum_duplicates()
            self._cache["adjacency"] = A
        return self._cache["adjacency"]

    def neighbour_table(self) -> tuple[np.ndarray, np.ndarray]:
        """CSR (indptr, indices) listing each incident half-edge once, so multi-edges repeat."""
        if "neighbours" not in self._cache:
            src = np.concatenate([self.tails, self.heads])
            dst = np.concatenate([self.heads, self.tails])
            order = np.argsort(src, kind="stable")
            indptr = np.zeros(self.n_vertices + 1, dtype=np.int64)
            np.cumsum(np.bincount(src, minlength=self.n_vertices), out=indptr[1:])
            self._cache["neighbours"] = (indptr, dst[order].astype(np.int64))
        return self._cache["neighbours"]

    def distances_from(self, source: int) -> np.ndarray:
        """Graph distances from `source` (inf for unreachable vertices)."""
        key = ("dist", int(source))
        if key not in self._cache:
            self._cache[key] = shortest_path(self.adjacency(), directed=False, unweighted=True, indices=int(source))
        return self._cache[key]

    def to_export(self) -> LevelGraphExport:
        return LevelGraphExport(
            level=self.level,
            terminal_plus=self.terminal_plus,
            terminal_minus=self.terminal_minus,
            birth_level=[int(b) for b in self.birth_level],
            edges=self.edge_list(),
        )


def edge_arrays(g) -> tuple[int, np.ndarray, np.ndarray, np.ndarray]:
    """(vertex count, tails, heads, colours) for a LevelGraph or RuleGraph."""
    if isinstance(g, LevelGraph):
        return g.n_vertices, g.tails, g.heads, g.colours
    if isinstance(g, RuleGraph):
        arr = np.array(g.edges, dtype=np.int64).reshape(-1, 3)
        return g.vertex_count, arr[:, 0], arr[:, 1], arr[:, 2]
    raise TypeError(f"expected LevelGraph or RuleGraph, got {type(g).__name__}")


# ============================================================================
# LOADING AND SERIALISATION
# ============================================================================

def _error_path(err: dict) -> tuple[str, str]:
    loc = ".".join(str(part) for part in err.get("loc", ()))
    msg = err.get("msg", "").removeprefix("Value error, ")
    # model validators prefix their message with the path below the model
    head, sep, tail = msg.partition(": ")
    if sep and "." in head and " " not in head:
        loc = f"{loc}.{head}" if loc else head
        msg = tail
    return loc or "<root>", msg


def load_system(document: str | bytes | dict, name: str | None = None) -> EIGSystem:
    """Parse a system document (JSON text or decoded dict) into an EIGSystem.

    Only structural checks run here; canonicality and distance-positivity are
    the validators' job.
    """
    logger.debug("=== LOAD SYSTEM ===")
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as e:
            logger.error(f"JSON decode error: {e}")
            raise ConfigError(f"invalid JSON: {e.msg} (line {e.lineno})", path="<root>")

    try:
        config = SystemConfig.model_validate(document)
    except ValidationError as e:
        first = e.errors()[0]
        path, msg = _error_path(first)
        logger.error(f"Schema violation at {path}: {msg}")
        raise ConfigError(msg, path=path)

    system = system_from_config(config, name=name)
    logger.debug(f"Loaded system {system.name}: K={system.K}, edges per rule={list(system.edge_counts)}")
    return system


def load_system_file(path: str | Path) -> EIGSystem:
    path = Path(path)
    logger.debug(f"Reading system document: {path}")
    try:
        text = path.read_text()
    except OSError as e:
        raise ConfigError(f"cannot read {path}: {e.strerror}")
    return load_system(text, name=path.stem)


def system_from_config(config: SystemConfig, name: str | None = None) -> EIGSystem:
    rules = tuple(
        RuleGraph(
            vertex_count=r.vertices,
            edges=tuple((int(t), int(h), int(c)) for t, h, c in r.edges),
            plant_plus=r.plant_plus,
            plant_minus=r.plant_minus,
        )
        for r in config.rules
    )
    return EIGSystem(
        K=config.colours,
        rules=rules,
        initial_colour=config.initial_colour,
        name=config.name or name or "system",
        allow_decorations=config.allow_decorations,
        description=config.description,
    )


def system_to_config(system: EIGSystem) -> SystemConfig:
    return SystemConfig(
        name=system.name,
        description=system.description,
        colours=system.K,
        initial_colour=system.initial_colour,
        allow_decorations=system.allow_decorations,
        rules=[
            RuleConfig(
                vertices=r.vertex_count,
                plant_plus=r.plant_plus,
                plant_minus=r.plant_minus,
                edges=list(r.edges),
            )
            for r in system.rules
        ],
    )


def export_system(system: EIGSystem) -> str:
    return system_to_config(system).model_dump_json(indent=2, exclude_none=True)


def config_hash(system: EIGSystem) -> str:
    """SHA-256 of the canonical JSON form; stable across runs."""
    payload = json.dumps(system_to_config(system).model_dump(mode="json"), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(payload.encode()).hexdigest()


# ============================================================================
# SUBSTITUTION
# ============================================================================

def initial_graph(system: EIGSystem) -> LevelGraph:
    """Xi^0: the single initial edge from v+ (id 0) to v- (id 1)."""
    return LevelGraph(
        level=0,
        n_vertices=2,
        tails=np.array([0], dtype=np.int64),
        heads=np.array([1], dtype=np.int64),
        colours=np.array([system.initial_colour], dtype=np.int64),
        birth_level=np.array([0, 0], dtype=np.int64),
    )


def _exclusive_cumsum(values: np.ndarray) -> np.ndarray:
    out = np.zeros(values.shape[0], dtype=np.int64)
    if values.shape[0] > 1:
        np.cumsum(values[:-1], out=out[1:])
    return out


def substitute(g: LevelGraph, system: EIGSystem, edge_cap: int | None = None) -> LevelGraph:
    """Replace every edge by a fresh copy of its rule graph, all in parallel.

    Old vertex ids are kept; interior vertices of each copy are numbered after
    them, copy by copy in edge-list order, rule vertices in id order.
    """
    cap = EDGE_CAP if edge_cap is None else edge_cap
    colour_idx = g.colours - 1
    per_edge_edges = system.edge_counts[colour_idx]
    predicted = int(per_edge_edges.sum())
    if predicted > cap:
        logger.error(f"Edge cap exceeded: level {g.level + 1} predicted {predicted} > {cap}")
        raise EdgeCapExceeded(predicted, cap, g.level + 1)

    per_edge_interior = system.interior_counts[colour_idx]
    vertex_offsets = g.n_vertices + _exclusive_cumsum(per_edge_interior)
    edge_offsets = _exclusive_cumsum(per_edge_edges)
    n_new = int(per_edge_interior.sum())

    tails = np.empty(predicted, dtype=np.int64)
    heads = np.empty(predicted, dtype=np.int64)
    colours = np.empty(predicted, dtype=np.int64)

    for i, rule in enumerate(system.rules):
        idx = np.flatnonzero(colour_idx == i)
        if idx.size == 0:
            continue

        def endpoint(local: int) -> np.ndarray:
            if local == rule.plant_plus:
                return g.tails[idx]
            if local == rule.plant_minus:
                return g.heads[idx]
            return vertex_offsets[idx] + rule.interior_position[local]

        for j, (tail, head, colour) in enumerate(rule.edges):
            pos = edge_offsets[idx] + j
            tails[pos] = endpoint(tail)
            heads[pos] = endpoint(head)
            colours[pos] = colour

    # planting vertices are distinct and nothing else is identified
    assert not np.any(tails == heads), "substitution produced a self-loop"

    birth = np.concatenate([g.birth_level, np.full(n_new, g.level + 1, dtype=np.int64)])
    logger.debug(f"Substituted level {g.level} -> {g.level + 1}: |V| {g.n_vertices} -> {g.n_vertices + n_new}, |E| {g.n_edges} -> {predicted}")
    return LevelGraph(
        level=g.level + 1,
        n_vertices=g.n_vertices + n_new,
        tails=tails,
        heads=heads,
        colours=colours,
        birth_level=birth,
        terminal_plus=g.terminal_plus,
        terminal_minus=g.terminal_minus,
    )


def build(system: EIGSystem, n: int, edge_cap: int | None = None) -> LevelGraph:
    """n-fold substitution of the single initial edge."""
    if n < 0:
        raise ValueError(f"level must be >= 0, got {n}")
    cap = EDGE_CAP if edge_cap is None else edge_cap
    _, predicted_edges, _ = predict_counts(system, n)
    if predicted_edges > cap:
        logger.error(f"Refusing to build {system.name} level {n}: {predicted_edges} edges > cap {cap}")
        raise EdgeCapExceeded(predicted_edges, cap, n)

    g = initial_graph(system)
    for _ in range(n):
        g = substitute(g, system, edge_cap=cap)
    logger.info(f"Built {system.name} level {n}: {g.n_vertices} vertices, {g.n_edges} edges")
    return g


def predict_counts(system: EIGSystem, n: int) -> tuple[int, int, list[int]]:
    """Exact (|V|, |E|, per-colour edge counts) of Xi^n via the affine count recursion.

    Python integers keep the counts exact at any level.
    """
    K = system.K
    mass = [[int(c) for c in rule.colour_counts(K)] for rule in system.rules]
    interior = [len(rule.interior) for rule in system.rules]

    per_colour = [0] * K
    per_colour[system.initial_colour - 1] = 1
    vertices = 2
    for _ in range(n):
        vertices += sum(per_colour[i] * interior[i] for i in range(K))
        per_colour = [sum(per_colour[i] * mass[i][j] for i in range(K)) for j in range(K)]
    return vertices, sum(per_colour), per_colour


# ============================================================================
# TERMINAL OBSERVABLES
# ============================================================================

def terminal_degree(g: LevelGraph, terminal: int | None = None) -> int:
    v = g.terminal_plus if terminal is None else terminal
    return int(np.count_nonzero(g.tails == v) + np.count_nonzero(g.heads == v))


def terminal_distance(g: LevelGraph) -> int:
    d = g.distances_from(g.terminal_plus)[g.terminal_minus]
    return int(d) if np.isfinite(d) else -1
