"""
Simple random walks on level graphs: exit times from balls, commute times,
return probabilities and raw traces.

Walks are simulated in blocks of trials, vectorised over the block. Each
block draws from its own generator seeded by (seed, stream tag, block index),
so results do not depend on how many workers run the blocks.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy import stats

from ..config import DEFAULT_SEED, DEFAULT_WORKERS
from ..exceptions import InsufficientData, UsageError
from ..models.schemas import (
    CommuteTimeResult, ExitTimeSample, ReturnProbabilityResult, TraceResult, WalkDimensionEstimate,
)
from .resistance import effective_resistance
from .spectral import distance_family, rho_min
from .system import EIGSystem, LevelGraph, build

logger = logging.getLogger(__name__)

BLOCK_SIZE = 256
DEFAULT_MAX_STEPS = 1_000_000
EXACT_RETURN_MAX_VERTICES = 100_000

# stream tags keep different experiments on different random streams
EXIT_STREAM = 1
COMMUTE_STREAM = 2
RETURN_STREAM = 3
TRACE_STREAM = 4


def block_rng(seed: int, stream: int, block: int) -> np.random.Generator:
    return np.random.default_rng([seed, stream, block])


def _blocks(trials: int) -> list[tuple[int, int]]:
    return [(b, min(BLOCK_SIZE, trials - b * BLOCK_SIZE)) for b in range(math.ceil(trials / BLOCK_SIZE))]


def _run_blocks(fn, trials: int, workers: int) -> list:
    """Run fn(block_index, size) for every block; results come back in block order."""
    blocks = _blocks(trials)
    if workers <= 1 or len(blocks) == 1:
        return [fn(b, size) for b, size in blocks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda args: fn(*args), blocks))


def resolve_vertex(g: LevelGraph, spec) -> int:
    """'terminal+', 'terminal-', '+', '-' or a vertex id."""
    if isinstance(spec, str):
        key = spec.strip()
        if key in ("terminal+", "+", "v+"):
            return g.terminal_plus
        if key in ("terminal-", "-", "v-"):
            return g.terminal_minus
        try:
            spec = int(key)
        except ValueError:
            raise UsageError(f"cannot parse vertex {spec!r}; use terminal+, terminal- or an id")
    if not 0 <= int(spec) < g.n_vertices:
        raise UsageError(f"vertex {spec} outside 0..{g.n_vertices - 1}")
    return int(spec)


# ============================================================================
# STEPPING
# ============================================================================

def srw_step(g: LevelGraph, v: int, rng: np.random.Generator) -> int:
    """One step to a uniformly chosen incident half-edge, so multi-edges count with multiplicity."""
    indptr, indices = g.neighbour_table()
    degree = indptr[v + 1] - indptr[v]
    if degree == 0:
        raise ValueError(f"vertex {v} is isolated")
    return int(indices[indptr[v] + rng.integers(degree)])


def _step_many(indptr: np.ndarray, indices: np.ndarray, positions: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    start = indptr[positions]
    degree = indptr[positions + 1] - start
    offset = (rng.random(positions.shape[0]) * degree).astype(np.int64)
    return indices[start + offset]


def _mean_and_stderr(values: np.ndarray) -> tuple[float, float]:
    if values.shape[0] == 0:
        return float("nan"), float("nan")
    if values.shape[0] == 1:
        return float(values[0]), 0.0
    return float(values.mean()), float(values.std(ddof=1) / math.sqrt(values.shape[0]))


# ============================================================================
# EXIT TIMES
# ============================================================================

def _exit_block(g: LevelGraph, v: int, inside: np.ndarray, size: int, max_steps: int, rng) -> np.ndarray:
    """Exit times of `size` walks from v; -1 marks a censored walk."""
    indptr, indices = g.neighbour_table()
    taus = np.full(size, -1, dtype=np.int64)
    if not inside[v]:
        taus[:] = 0
        return taus
    active = np.arange(size)
    positions = np.full(size, v, dtype=np.int64)
    for step in range(1, max_steps + 1):
        positions = _step_many(indptr, indices, positions, rng)
        left = ~inside[positions]
        if left.any():
            taus[active[left]] = step
            active = active[~left]
            positions = positions[~left]
            if active.shape[0] == 0:
                break
    return taus


def exit_times(g: LevelGraph, v: int, radii, trials: int = 1000, max_steps: int = DEFAULT_MAX_STEPS,
               seed: int = DEFAULT_SEED, workers: int = DEFAULT_WORKERS, radius_m=None) -> list[ExitTimeSample]:
    """Mean exit time from the open ball {u : d(v,u) < r} for each radius.

    Walks still inside after max_steps are censored: excluded from the mean and counted.
    """
    if trials < 1 or max_steps < 1:
        raise UsageError("trials and max_steps must be >= 1")
    distances = g.distances_from(v)
    samples = []
    for idx, r in enumerate(radii):
        inside = distances < r
        tag = idx if radius_m is None else radius_m[idx]

        def run(block: int, size: int, inside=inside, tag=tag):
            return _exit_block(g, v, inside, size, max_steps, block_rng(seed, EXIT_STREAM * 1000 + tag, block))

        taus = np.concatenate(_run_blocks(run, trials, workers))
        finished = taus[taus >= 0]
        censored = int(trials - finished.shape[0])
        mean, stderr = _mean_and_stderr(finished.astype(np.float64))
        if censored:
            logger.warning(f"radius {r:g}: {censored}/{trials} walks censored at {max_steps} steps")
        samples.append(ExitTimeSample(
            radius_m=None if radius_m is None else int(radius_m[idx]),
            radius=float(r),
            mean_tau=mean,
            stderr=stderr,
            trials=trials,
            censored=censored,
            censored_fraction=censored / trials,
        ))
        logger.debug(f"radius {r:g}: ball size {int(inside.sum())}, mean exit time {mean:.4g} +- {stderr:.2g}")
    return samples


def walk_dimension_estimate(system: EIGSystem, n: int, m_range, start="terminal+", trials: int = 1000,
                            max_steps: int = DEFAULT_MAX_STEPS, seed: int = DEFAULT_SEED,
                            workers: int = DEFAULT_WORKERS, edge_cap: int | None = None,
                            predicted: float | None = None, g: LevelGraph | None = None) -> WalkDimensionEstimate:
    """Least-squares slope of log E[tau] against log r over radii r = rho_min(D)^m.

    `g` is the level-n graph when the caller already built it.
    """
    m_values = [int(m) for m in m_range]
    if len(m_values) < 3:
        raise InsufficientData(f"walk dimension regression needs at least 3 radii, got {len(m_values)}")
    if g is None:
        g = build(system, n, edge_cap=edge_cap)
    elif g.level != n:
        raise UsageError(f"graph is level {g.level}, expected level {n}")
    v = resolve_vertex(g, start)
    rho = rho_min(distance_family(system))
    radii = [rho ** m for m in m_values]
    logger.info(f"{system.name} level {n}: exit times from vertex {v} at radii {[round(r, 3) for r in radii]}")

    samples = exit_times(g, v, radii, trials=trials, max_steps=max_steps, seed=seed, workers=workers,
                         radius_m=m_values)
    usable = [s for s in samples if s.trials > s.censored and s.mean_tau > 0]
    if len(usable) < 3:
        raise InsufficientData(f"only {len(usable)} radii had uncensored exit times")
    fit = stats.linregress([math.log(s.radius) for s in usable], [math.log(s.mean_tau) for s in usable])
    return WalkDimensionEstimate(
        system=system.name,
        level=n,
        start=v,
        slope=float(fit.slope),
        stderr=float(fit.stderr),
        predicted=predicted,
        samples=samples,
    )


# ============================================================================
# COMMUTE TIMES
# ============================================================================

def _commute_block(g: LevelGraph, a: int, b: int, size: int, max_steps: int, rng) -> np.ndarray:
    indptr, indices = g.neighbour_table()
    times = np.full(size, -1, dtype=np.int64)
    active = np.arange(size)
    positions = np.full(size, a, dtype=np.int64)
    target = np.full(size, b, dtype=np.int64)
    for step in range(1, max_steps + 1):
        positions = _step_many(indptr, indices, positions, rng)
        hit = positions == target
        returned = hit & (target == a)
        if returned.any():
            times[active[returned]] = step
            keep = ~returned
            active, positions, target, hit = active[keep], positions[keep], target[keep], hit[keep]
            if active.shape[0] == 0:
                break
        target[hit] = a
    return times


def commute_time(g: LevelGraph, a: int, b: int, trials: int = 10_000, max_steps: int = DEFAULT_MAX_STEPS,
                 seed: int = DEFAULT_SEED, workers: int = DEFAULT_WORKERS) -> CommuteTimeResult:
    """Empirical a -> b -> a commute time against the identity value 2|E| R_eff(a, b)."""
    if a == b:
        raise UsageError("commute time needs two distinct vertices")
    identity = 2 * g.n_edges * effective_resistance(g, None, a, b)

    def run(block: int, size: int):
        return _commute_block(g, a, b, size, max_steps, block_rng(seed, COMMUTE_STREAM, block))

    times = np.concatenate(_run_blocks(run, trials, workers))
    finished = times[times >= 0].astype(np.float64)
    censored = int(trials - finished.shape[0])
    if censored:
        logger.warning(f"commute {a}<->{b}: {censored}/{trials} walks censored at {max_steps} steps")
    mean, stderr = _mean_and_stderr(finished)
    logger.info(f"commute {a}<->{b}: empirical {mean:.4f} +- {stderr:.4f}, identity {identity:.4f}")
    return CommuteTimeResult(a=a, b=b, empirical_mean=mean, stderr=stderr, identity_value=identity,
                             trials=trials, censored=censored)


# ============================================================================
# RETURN PROBABILITIES
# ============================================================================

def geometric_times(t0: int, count: int) -> list[int]:
    """t_j = floor(t0 * 2^j), duplicates removed."""
    return sorted({int(math.floor(t0 * 2 ** j)) for j in range(count)})


def _exact_return(g: LevelGraph, v: int, times: list[int]) -> list[float]:
    A = g.adjacency()
    degree = np.asarray(A.sum(axis=1)).ravel()
    p = np.zeros(g.n_vertices)
    p[v] = 1.0
    wanted = {2 * t for t in times}
    values = {}
    for step in range(1, max(wanted) + 1):
        p = A @ (p / degree)
        if step in wanted:
            values[step] = float(p[v])
    return [values[2 * t] for t in times]


def _return_block(g: LevelGraph, v: int, times: list[int], size: int, rng) -> np.ndarray:
    indptr, indices = g.neighbour_table()
    positions = np.full(size, v, dtype=np.int64)
    hits = np.zeros((len(times), size), dtype=bool)
    wanted = {2 * t: k for k, t in enumerate(times)}
    for step in range(1, 2 * max(times) + 1):
        positions = _step_many(indptr, indices, positions, rng)
        if step in wanted:
            hits[wanted[step]] = positions == v
    return hits


def return_probability(g: LevelGraph, v: int, times: list[int], method: str = "auto", trials: int = 10_000,
                       seed: int = DEFAULT_SEED, workers: int = DEFAULT_WORKERS) -> ReturnProbabilityResult:
    """P(X_2t = v) for each t; spectral estimate -2 * slope of log P against log t.

    Exact transition-operator iteration is used when the graph is small enough.
    Points indistinguishable from zero are excluded from the fit.
    """
    times = sorted({int(t) for t in times})
    if not times or times[0] < 1:
        raise UsageError("return times must be positive integers")
    if method == "auto":
        method = "exact" if g.n_vertices <= EXACT_RETURN_MAX_VERTICES else "monte_carlo"

    if method == "exact":
        probabilities = _exact_return(g, v, times)
        stderrs = [0.0] * len(times)
        excluded = [t for t, p in zip(times, probabilities) if p <= 1e-300]
    elif method == "monte_carlo":
        def run(block: int, size: int):
            return _return_block(g, v, times, size, block_rng(seed, RETURN_STREAM, block))

        hits = np.concatenate(_run_blocks(run, trials, workers), axis=1)
        counts = hits.sum(axis=1)
        probabilities = (counts / trials).tolist()
        stderrs = [math.sqrt(p * (1 - p) / trials) for p in probabilities]
        excluded = [t for t, c in zip(times, counts) if c == 0]
    else:
        raise UsageError(f"unknown method {method!r} (expected auto, exact or monte_carlo)")

    if excluded:
        logger.warning(f"return probability at vertex {v}: times {excluded} indistinguishable from 0, excluded")

    usable = [(t, p) for t, p in zip(times, probabilities) if t not in excluded]
    estimate = stderr = None
    if len(usable) >= 2:
        fit = stats.linregress([math.log(t) for t, _ in usable], [math.log(p) for _, p in usable])
        estimate = float(-2 * fit.slope)
        stderr = float(2 * fit.stderr) if len(usable) > 2 else 0.0
    return ReturnProbabilityResult(
        vertex=v,
        method=method,
        times=times,
        probabilities=probabilities,
        stderrs=stderrs,
        excluded=excluded,
        spectral_dim_estimate=estimate,
        stderr=stderr,
    )


# ============================================================================
# TRACES
# ============================================================================

def trace(g: LevelGraph, start: int, steps: int, seed: int = DEFAULT_SEED) -> TraceResult:
    """Reproducible vertex sequence of length steps + 1."""
    if steps < 0:
        raise UsageError("steps must be >= 0")
    indptr, indices = g.neighbour_table()
    rng = np.random.default_rng([seed, TRACE_STREAM])
    uniforms = rng.random(steps)
    path = np.empty(steps + 1, dtype=np.int64)
    path[0] = v = start
    for k in range(steps):
        degree = indptr[v + 1] - indptr[v]
        v = int(indices[indptr[v] + int(uniforms[k] * degree)])
        path[k + 1] = v
    return TraceResult(start=start, steps=steps, seed=seed, vertices=path.tolist())
