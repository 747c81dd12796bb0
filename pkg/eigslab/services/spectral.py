"""
Combinatorial matrices of a system (mass M, degree N, distance family D)
and spectral radii of nonnegative matrices.
"""
import itertools
import logging
from dataclasses import dataclass

import numpy as np
import networkx as nx

from ..config import PATH_ENUMERATION_CAP
from ..exceptions import PathCountExceeded
from ..models.schemas import MatricesReport
from .system import EIGSystem, RuleGraph

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DistanceFamily:
    """Colour-count matrices of per-colour terminal paths, with the paths that produced them."""
    matrices: tuple[np.ndarray, ...]
    path_choices: tuple[tuple[tuple[int, ...], ...], ...]

    def __len__(self) -> int:
        return len(self.matrices)


# ============================================================================
# MATRIX CONSTRUCTION (exact integers)
# ============================================================================

def mass_matrix(system: EIGSystem) -> np.ndarray:
    """[M]_ij = number of colour-j edges in R_i."""
    return np.vstack([rule.colour_counts(system.K) for rule in system.rules]).astype(np.int64)


def half_edge_index(colour: int, side: str) -> int:
    """Row/column of half-edge type (colour, side) in the degree matrix; side is '+' or '-'."""
    return 2 * (colour - 1) + (0 if side == "+" else 1)


def degree_matrix(system: EIGSystem) -> np.ndarray:
    """2K x 2K half-edge propagation matrix.

    A vertex sitting at the t-end of a colour-j edge keeps, after substitution,
    the half-edges of R_j at beta_j^t: entry [(j,t),(j',t')] counts colour-j'
    edges of R_j whose t'-endpoint (tail for '+', head for '-') is beta_j^t.
    """
    K = system.K
    N = np.zeros((2 * K, 2 * K), dtype=np.int64)
    for j, rule in enumerate(system.rules, start=1):
        for side, plant in (("+", rule.plant_plus), ("-", rule.plant_minus)):
            row = half_edge_index(j, side)
            for tail, head, colour in rule.edges:
                if tail == plant:
                    N[row, half_edge_index(colour, "+")] += 1
                if head == plant:
                    N[row, half_edge_index(colour, "-")] += 1
    return N


def terminal_paths(rule: RuleGraph, colour: int, cap: int = PATH_ENUMERATION_CAP) -> list[tuple[tuple[int, ...], np.ndarray]]:
    """All simple beta+ - beta- paths of a rule as (vertex path, colour counts).

    Parallel edges of different colours give different paths.
    """
    G = rule.undirected()
    K = max(c for _, _, c in rule.edges)
    paths = []
    for edge_path in nx.all_simple_edge_paths(G, rule.plant_plus, rule.plant_minus):
        if len(paths) >= cap:
            logger.error(f"Colour {colour}: more than {cap} simple terminal paths")
            raise PathCountExceeded(colour, cap)
        counts = np.zeros(K, dtype=np.int64)
        vertices = [rule.plant_plus]
        for u, v, key in edge_path:
            counts[rule.edges[key][2] - 1] += 1
            vertices.append(v)
        paths.append((tuple(vertices), counts))
    return paths


def distance_family(system: EIGSystem, cap: int = PATH_ENUMERATION_CAP) -> DistanceFamily:
    """Every combination of one terminal path per colour, as K x K count matrices, deduplicated."""
    K = system.K
    per_colour = []
    for colour, rule in enumerate(system.rules, start=1):
        unique: dict[tuple[int, ...], tuple[int, ...]] = {}
        for vertices, counts in terminal_paths(rule, colour, cap):
            row = tuple(int(c) for c in np.pad(counts, (0, K - counts.shape[0])))
            unique.setdefault(row, vertices)
        per_colour.append(sorted(unique.items()))
        logger.debug(f"Colour {colour}: {len(unique)} distinct terminal colour-count vectors")

    matrices, choices = [], []
    for combo in itertools.product(*per_colour):
        matrices.append(np.array([row for row, _ in combo], dtype=np.int64))
        choices.append(tuple(vertices for _, vertices in combo))
    return DistanceFamily(matrices=tuple(matrices), path_choices=tuple(choices))


# ============================================================================
# SPECTRAL RADII
# ============================================================================

def spectral_radius(A, tol: float = 1e-12, max_iter: int = 10_000) -> float:
    """Perron root of a square nonnegative matrix.

    Power iteration on the shifted matrix A + I (primitive whenever A is
    irreducible) with Collatz-Wielandt bounds as the stopping test; falls
    back to a dense eigenvalue computation when the iterate loses positivity
    or the bounds stall.
    """
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    if np.any(A < 0):
        raise ValueError("spectral_radius expects a nonnegative matrix")
    n = A.shape[0]
    if n == 0:
        return 0.0

    B = A + np.eye(n)
    x = np.ones(n) / n
    for _ in range(max_iter):
        y = B @ x
        if np.any(y <= 0):
            break
        ratios = y / x
        lo, hi = ratios.min(), ratios.max()
        x = y / y.sum()
        if hi - lo <= tol * hi:
            return float(0.5 * (lo + hi) - 1.0)
        if np.any(x < 1e-300):
            break

    rho = float(np.max(np.abs(np.linalg.eigvals(A))))
    logger.debug(f"spectral_radius: dense fallback for {n}x{n} matrix, rho={rho:.12g}")
    return rho


def rho_min(family: DistanceFamily) -> float:
    """Smallest spectral radius over the members of the distance family."""
    if len(family) == 0:
        raise ValueError("distance family is empty")
    return min(spectral_radius(D) for D in family.matrices)


def matrices_report(system: EIGSystem) -> MatricesReport:
    M = mass_matrix(system)
    N = degree_matrix(system)
    family = distance_family(system)
    return MatricesReport(
        system=system.name,
        mass_matrix=M.tolist(),
        degree_matrix=N.tolist(),
        distance_family=[D.tolist() for D in family.matrices],
        path_choices=[[list(p) for p in choice] for choice in family.path_choices],
        rho_M=spectral_radius(M),
        rho_N=spectral_radius(N),
        rho_min_D=rho_min(family),
    )


# ============================================================================
# TERMINAL DEGREE PROPAGATION
# ============================================================================

def predict_terminal_degree(system: EIGSystem, n: int, side: str = "+") -> int:
    """Degree of v+ (or v-) in Xi^n from n applications of the degree matrix."""
    N = [[int(c) for c in row] for row in degree_matrix(system)]
    h = [0] * (2 * system.K)
    h[half_edge_index(system.initial_colour, side)] = 1
    for _ in range(n):
        h = [sum(h[r] * N[r][c] for r in range(len(h))) for c in range(len(h))]
    return sum(h)
