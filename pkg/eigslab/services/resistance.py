"""
Effective resistance on multigraph resistor networks and the renormalisation
map Psi of a system.

Two interchangeable backends compute two-terminal resistance:
  laplacian  grounded sparse Laplacian solve (direct, or Jacobi-preconditioned CG
             on large graphs)
  reduction  star-mesh elimination of every non-terminal vertex, which covers
             series, parallel and dangling-end reductions
"""
import heapq
import logging
from functools import lru_cache

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components
from scipy.sparse.linalg import LinearOperator, cg, spsolve

from ..config import CG_RTOL, DIRECT_SOLVE_MAX_VERTICES, PSI_MAX_ITER, PSI_TOL
from ..exceptions import ConvergenceError, EigsLabError
from ..models.schemas import PsiEigenpair, PsiTrace, RenormalisationCheck, WalkBoundCheck
from .system import EIGSystem, LevelGraph, RuleGraph, build, edge_arrays

logger = logging.getLogger(__name__)

BACKENDS = ("laplacian", "reduction")


# ============================================================================
# NETWORK PREPARATION
# ============================================================================

def _check_weights(weights, n_edges: int) -> np.ndarray:
    if weights is None:
        return np.ones(n_edges, dtype=np.float64)
    r = np.asarray(weights, dtype=np.float64).reshape(-1)
    if r.shape[0] != n_edges:
        raise ValueError(f"expected {n_edges} edge resistances, got {r.shape[0]}")
    if not np.all(np.isfinite(r)):
        raise ValueError("edge resistances must be finite")
    if np.any(r < 0):
        raise ValueError("edge resistances must be nonnegative")
    return r


def _contract_zero_edges(n: int, tails: np.ndarray, heads: np.ndarray, r: np.ndarray):
    """Merge the endpoints of zero-resistance edges; drop edges that become loops."""
    zero = r == 0
    if not zero.any():
        return n, tails, heads, r, np.arange(n)
    Z = sparse.coo_matrix((np.ones(int(zero.sum())), (tails[zero], heads[zero])), shape=(n, n))
    n_comp, labels = connected_components(Z, directed=False)
    t, h = labels[tails], labels[heads]
    keep = t != h
    return n_comp, t[keep], h[keep], r[keep], labels


def _laplacian(n: int, tails: np.ndarray, heads: np.ndarray, conductance: np.ndarray) -> sparse.csr_matrix:
    rows = np.concatenate([tails, heads, tails, heads])
    cols = np.concatenate([heads, tails, tails, heads])
    vals = np.concatenate([-conductance, -conductance, conductance, conductance])
    return sparse.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()


def _solve_grounded(L: sparse.csr_matrix, rhs: np.ndarray) -> np.ndarray:
    """Solve the grounded (positive definite) Laplacian system."""
    n = L.shape[0]
    if n <= DIRECT_SOLVE_MAX_VERTICES:
        return np.atleast_1d(spsolve(L.tocsc(), rhs))

    diag = L.diagonal()
    inv_diag = 1.0 / diag
    jacobi = LinearOperator((n, n), matvec=lambda v: inv_diag * v, dtype=np.float64)
    x, info = cg(L, rhs, rtol=CG_RTOL, maxiter=10 * n, M=jacobi)
    if info != 0:
        residual = float(np.linalg.norm(L @ x - rhs) / np.linalg.norm(rhs))
        logger.error(f"CG did not converge on {n} unknowns (info={info}, relative residual {residual:.3e})")
        raise ConvergenceError(10 * n, residual, x[:8])
    logger.debug(f"CG solve on {n} unknowns converged")
    return x


def _laplacian_resistance(n: int, tails: np.ndarray, heads: np.ndarray, r: np.ndarray, a: int, b: int) -> float:
    conductance = 1.0 / r
    A = sparse.coo_matrix((np.ones(tails.shape[0]), (tails, heads)), shape=(n, n))
    _, labels = connected_components(A, directed=False)
    if labels[a] != labels[b]:
        return float("inf")

    # restrict to the component of a and ground b
    component = np.flatnonzero(labels == labels[a])
    index = np.full(n, -1, dtype=np.int64)
    index[component] = np.arange(component.shape[0])
    inside = labels[tails] == labels[a]
    L = _laplacian(component.shape[0], index[tails[inside]], index[heads[inside]], conductance[inside])
    keep = np.ones(component.shape[0], dtype=bool)
    keep[index[b]] = False
    L_g = L[keep][:, keep]

    a_local = int(np.count_nonzero(keep[: index[a]]))
    rhs = np.zeros(L_g.shape[0])
    rhs[a_local] = 1.0
    potential = _solve_grounded(L_g, rhs)
    return float(potential[a_local])


def _reduction_resistance(n: int, tails: np.ndarray, heads: np.ndarray, r: np.ndarray, a: int, b: int) -> float:
    """Star-mesh elimination of all vertices other than a and b, minimum degree first."""
    cond: dict[int, dict[int, float]] = {}
    for u, v, res in zip(tails.tolist(), heads.tolist(), r.tolist()):
        c = 1.0 / res
        cond.setdefault(u, {})[v] = cond.get(u, {}).get(v, 0.0) + c
        cond.setdefault(v, {})[u] = cond.get(v, {}).get(u, 0.0) + c

    heap = [(len(nbrs), v) for v, nbrs in cond.items() if v not in (a, b)]
    heapq.heapify(heap)
    while heap:
        degree, k = heapq.heappop(heap)
        if k not in cond or degree != len(cond[k]):
            continue
        nbrs = cond.pop(k)
        total = sum(nbrs.values())
        for u in nbrs:
            del cond[u][k]
        items = list(nbrs.items())
        for i, (u, cu) in enumerate(items):
            for v, cv in items[i + 1:]:
                c = cu * cv / total
                cond[u][v] = cond[u].get(v, 0.0) + c
                cond[v][u] = cond[v].get(u, 0.0) + c
        for u in nbrs:
            if u not in (a, b):
                heapq.heappush(heap, (len(cond[u]), u))

    c_ab = cond.get(a, {}).get(b, 0.0)
    return float("inf") if c_ab == 0.0 else 1.0 / c_ab


# ============================================================================
# PUBLIC RESISTANCE API
# ============================================================================

def effective_resistance(g: LevelGraph | RuleGraph, weights=None, a: int | None = None, b: int | None = None,
                         backend: str = "laplacian") -> float:
    """Two-terminal effective resistance; `weights` are per-edge resistances (default 1).

    Terminals default to v+/v- (LevelGraph) or beta+/beta- (RuleGraph).
    Returns inf when a and b are disconnected.
    """
    n, tails, heads, _ = edge_arrays(g)
    if a is None:
        a = g.terminal_plus if isinstance(g, LevelGraph) else g.plant_plus
    if b is None:
        b = g.terminal_minus if isinstance(g, LevelGraph) else g.plant_minus
    if a == b:
        raise ValueError("effective resistance needs two distinct vertices")
    if not (0 <= a < n and 0 <= b < n):
        raise ValueError(f"vertices ({a}, {b}) outside 0..{n - 1}")
    if backend not in BACKENDS:
        raise ValueError(f"unknown backend {backend!r} (expected one of {BACKENDS})")

    r = _check_weights(weights, tails.shape[0])
    n, tails, heads, r, labels = _contract_zero_edges(n, tails, heads, r)
    a, b = int(labels[a]), int(labels[b])
    if a == b:
        return 0.0

    if backend == "laplacian":
        return _laplacian_resistance(n, tails, heads, r, a, b)
    return _reduction_resistance(n, tails, heads, r, a, b)


def grounded_resistance(g: LevelGraph | RuleGraph, weights, v: int, A) -> float:
    """R(v, A^c): resistance from v to the complement of A, all of it held at potential 0."""
    n, tails, heads, _ = edge_arrays(g)
    inside = np.zeros(n, dtype=bool)
    inside[np.asarray(list(A), dtype=np.int64)] = True
    if not inside[v]:
        raise ValueError(f"vertex {v} must belong to A")
    if inside.all():
        raise EigsLabError("grounded resistance needs a nonempty complement of A")

    # complement collapses to one ground vertex with id n
    relabel = np.where(inside, np.arange(n), n)
    t, h = relabel[tails], relabel[heads]
    r = _check_weights(weights, tails.shape[0])
    keep = t != h
    n_merged, t, h, r, labels = _contract_zero_edges(n + 1, t[keep], h[keep], r[keep])
    a, b = int(labels[v]), int(labels[n])
    if a == b:
        return 0.0
    return _laplacian_resistance(n_merged, t, h, r, a, b)


# ============================================================================
# RENORMALISATION MAP
# ============================================================================

@lru_cache(maxsize=None)
def _rule_colour_index(rule: RuleGraph) -> np.ndarray:
    return np.array([c - 1 for _, _, c in rule.edges], dtype=np.int64)


def _check_resistance_vector(system: EIGSystem, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if x.shape[0] != system.K:
        raise ValueError(f"expected {system.K} colour resistances, got {x.shape[0]}")
    if not np.all(np.isfinite(x)) or np.any(x < 0):
        raise ValueError("colour resistances must be finite and nonnegative")
    return x


def psi(system: EIGSystem, x, backend: str = "laplacian") -> np.ndarray:
    """Psi(x): each rule's terminal resistance when colour j edges carry resistance x_j."""
    x = _check_resistance_vector(system, x)
    return np.array([
        effective_resistance(rule, x[_rule_colour_index(rule)], rule.plant_plus, rule.plant_minus, backend=backend)
        for rule in system.rules
    ])


def psi_power(system: EIGSystem, x, n: int) -> np.ndarray:
    for _ in range(n):
        x = psi(system, x)
    return np.asarray(x, dtype=np.float64)


def hilbert_distance(x: np.ndarray, y: np.ndarray) -> float:
    """Hilbert projective metric between positive vectors."""
    log_ratio = np.log(np.asarray(x) / np.asarray(y))
    return float(log_ratio.max() - log_ratio.min())


def psi_eigenpair(system: EIGSystem, tol: float = PSI_TOL, max_iter: int = PSI_MAX_ITER) -> PsiEigenpair:
    """Perron eigenpair of Psi by l1-normalised iteration from the uniform vector."""
    logger.debug(f"=== PSI EIGENPAIR {system.name} ===")
    x = np.full(system.K, 1.0 / system.K)
    gap = residual = float("inf")
    for iteration in range(1, max_iter + 1):
        y = psi(system, x)
        if np.any(y <= 0) or not np.all(np.isfinite(y)):
            raise EigsLabError(f"Psi produced a non-positive or infinite value {y.tolist()}; check distance-positivity")
        rho = float(y.sum())
        residual = float(np.max(np.abs(y - rho * x)))
        x_next = y / rho
        gap = hilbert_distance(x_next, x)
        if iteration % 100 == 0:
            logger.debug(f"iteration {iteration}: rho={rho:.15g} gap={gap:.3e} residual={residual:.3e}")
        if gap < tol and residual < tol:
            logger.info(f"{system.name}: rho(Psi)={rho:.12g} after {iteration} iterations")
            return PsiEigenpair(rho=rho, v=x.tolist(), iterations=iteration, residual=residual, projective_gap=gap)
        x = x_next

    logger.error(f"{system.name}: Psi iteration did not converge in {max_iter} steps (gap {gap:.3e})")
    raise ConvergenceError(max_iter, residual, x)


def psi_trace(system: EIGSystem, n: int, eigenpair: PsiEigenpair | None = None) -> PsiTrace:
    """Unnormalised iterates Psi^k(1) for k = 0..n with growth ratios, c*_k and projective distance to v."""
    pair = eigenpair or psi_eigenpair(system)
    v = np.asarray(pair.v)
    x = np.ones(system.K)
    iterates, ratios, c_star, distance = [x.tolist()], [], [float(x.sum())], [hilbert_distance(x, v)]
    for k in range(1, n + 1):
        y = psi(system, x)
        ratios.append((y / x).tolist())
        iterates.append(y.tolist())
        c_star.append(float(y.sum() / pair.rho ** k))
        distance.append(hilbert_distance(y, v))
        x = y
    return PsiTrace(iterates=iterates, ratios=ratios, c_star=c_star, projective_distance=distance)


def verify_renormalisation(system: EIGSystem, n: int, x=None, edge_cap: int | None = None) -> RenormalisationCheck:
    """Compare the terminal resistance of Xi^n (colour resistances x) with [Psi^n(x)]_iota."""
    x = _check_resistance_vector(system, np.ones(system.K) if x is None else x)
    g = build(system, n, edge_cap=edge_cap)
    lhs = effective_resistance(g, x[g.colours - 1])
    rhs = float(psi_power(system, x, n)[system.initial_colour - 1])
    discrepancy = abs(lhs - rhs)
    logger.info(f"{system.name} level {n}: direct {lhs:.12g} vs renormalised {rhs:.12g} (|diff| {discrepancy:.2e})")
    return RenormalisationCheck(system=system.name, level=n, x=x.tolist(), lhs=lhs, rhs=rhs, discrepancy=discrepancy)


def check_walk_dimension_bound(g: LevelGraph, pairs=None) -> list[WalkBoundCheck]:
    """|E| * R(u,v) >= d(u,v)^2 for each pair (default: the two terminals)."""
    pairs = pairs or [(g.terminal_plus, g.terminal_minus)]
    checks = []
    for u, v in pairs:
        d = g.distances_from(u)[v]
        product = g.n_edges * effective_resistance(g, None, u, v)
        checks.append(WalkBoundCheck(
            u=int(u), v=int(v),
            energy_product=product,
            distance_squared=float(d) ** 2,
            holds=bool(product >= float(d) ** 2 * (1 - 1e-12)),
        ))
    return checks
