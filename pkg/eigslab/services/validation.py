"""
Standing-assumption checks: canonicality of rule graphs and positivity of the
distance family.
"""
import logging

import networkx as nx
from networkx.algorithms.connectivity import local_node_connectivity

from ..models.schemas import Violation, ValidationReport
from .system import EIGSystem, RuleGraph
from .spectral import distance_family

logger = logging.getLogger(__name__)


def _edge_on_terminal_path_flow(rule: RuleGraph, tail: int, head: int) -> bool:
    """Edge {tail, head} lies on a simple beta+ - beta- path iff, with the edge
    subdivided by a new vertex z and a super-sink joined to both terminals,
    z and the sink are joined by two vertex-disjoint paths."""
    H = nx.Graph()
    H.add_nodes_from(range(rule.vertex_count))
    H.add_edges_from((u, v) for u, v, _ in rule.edges)
    z, sink = "z", "sink"
    H.add_edge(z, tail)
    H.add_edge(z, head)
    H.add_edge(sink, rule.plant_plus)
    H.add_edge(sink, rule.plant_minus)
    return local_node_connectivity(H, z, sink) >= 2


def _edges_on_terminal_paths_enumerated(rule: RuleGraph) -> set[int]:
    G = rule.undirected()
    used: set[int] = set()
    for edge_path in nx.all_simple_edge_paths(G, rule.plant_plus, rule.plant_minus):
        used.update(key for _, _, key in edge_path)
    # parallel copies of a used edge are interchangeable
    pairs = {frozenset(rule.edges[k][:2]) for k in used}
    return {k for k, (u, v, _) in enumerate(rule.edges) if frozenset((u, v)) in pairs}


def off_path_edges(rule: RuleGraph, method: str = "flow") -> list[int]:
    """Indices of rule edges on no simple terminal-to-terminal path."""
    if method == "flow":
        return [k for k, (u, v, _) in enumerate(rule.edges) if not _edge_on_terminal_path_flow(rule, u, v)]
    if method == "enumerate":
        used = _edges_on_terminal_paths_enumerated(rule)
        return [k for k in range(rule.edge_count) if k not in used]
    raise ValueError(f"unknown method {method!r} (expected 'flow' or 'enumerate')")


def validate_canonical(system: EIGSystem, method: str = "flow") -> list[Violation]:
    """Every rule edge must lie on a simple beta+ - beta- path of the undirected rule graph.

    Systems flagged `allow_decorations` get kind "decoration" instead of
    "not_canonical"; the validation gate treats those as warnings.
    """
    kind = "decoration" if system.allow_decorations else "not_canonical"
    violations = []
    for colour, rule in enumerate(system.rules, start=1):
        for k in off_path_edges(rule, method):
            tail, head, edge_colour = rule.edges[k]
            violations.append(Violation(
                kind=kind,
                colour=colour,
                edge=(tail, head),
                detail=f"rule {colour} edge {k} ({tail}->{head}, colour {edge_colour}) lies on no simple terminal path",
            ))
    return violations


def validate_distance_positive(system: EIGSystem) -> list[Violation]:
    violations = []
    family = distance_family(system)
    for idx, D in enumerate(family.matrices):
        if (D < 1).any():
            violations.append(Violation(
                kind="distance",
                detail=f"distance family member {idx} {D.tolist()} has a zero entry",
            ))

    if system.K == 1:
        rule = system.rules[0]
        d = nx.shortest_path_length(rule.undirected(), rule.plant_plus, rule.plant_minus)
        if d < 2:
            violations.append(Violation(
                kind="terminal_distance",
                colour=1,
                detail=f"terminal distance {d} in a one-colour rule must be at least 2",
            ))
    return violations


def validate(system: EIGSystem) -> ValidationReport:
    """Run both validators; decorations of a decorated system become warnings."""
    logger.debug(f"=== VALIDATE {system.name} ===")
    canonical = validate_canonical(system)
    warnings = [v for v in canonical if v.kind == "decoration"]
    violations = [v for v in canonical if v.kind != "decoration"]
    violations += validate_distance_positive(system)

    if warnings:
        logger.warning(f"{system.name}: {len(warnings)} decoration edge(s) tolerated")
    for v in violations:
        logger.info(f"{system.name}: {v.kind}: {v.detail}")

    return ValidationReport(
        system=system.name,
        violations=violations,
        warnings=warnings,
        valid=not violations,
    )
