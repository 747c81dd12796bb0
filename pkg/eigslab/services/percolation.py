"""
Critical percolation on the diamond hierarchical lattice, reduced to a
two-terminal random recursion: with probability p_series a cell becomes two
independent copies in series, with probability p_diamond it becomes a diamond
of four copies.

Population dynamics runs the recursion on a fixed-size pool of log
resistances, resampling with replacement at every level.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import stats
from scipy.special import logsumexp

from ..config import DEFAULT_SEED, DEFAULT_WORKERS, EXACT_MAX_LEVEL, PERC_LEVELS, PERC_POPULATION
from ..exceptions import InsufficientData, UsageError
from ..models.schemas import (
    AlphaEstimate, ClusterDimensionReport, DispersionLevel, DispersionStats, ExactAtom, ExactDistribution,
    LevelStats, MomentDiagnostics, PercParams,
)
from .spectral import spectral_radius

logger = logging.getLogger(__name__)

P_C = (math.sqrt(5) - 1) / 2
ALPHA_LOWER_BOUND = math.log((14 - 4 * math.sqrt(5)) / 3)
LOG2 = math.log(2)

CHUNK_SIZE = 65_536
POPULATION_STREAM = 11


def perc_params(p: float) -> PercParams:
    if not 0 < p < 1:
        raise UsageError(f"p must lie in (0, 1), got {p}")
    p2, p4 = p * p, p ** 4
    return PercParams(
        p=p,
        p_diamond=p4 / (2 * p2 - p4),
        p_series=(2 * p2 - 2 * p4) / (2 * p2 - p4),
        p_c=P_C,
    )


def parse_p(value: str | float) -> float:
    """'pc' or a number."""
    if isinstance(value, str) and value.strip().lower() in ("pc", "p_c", "critical"):
        return P_C
    try:
        return float(value)
    except ValueError:
        raise UsageError(f"cannot parse p={value!r}; use a number in (0,1) or 'pc'")


# ============================================================================
# POPULATION DYNAMICS
# ============================================================================

@dataclass
class PercPopulation:
    log_values: np.ndarray
    level: int = 0
    seed: int | None = None

    @classmethod
    def initial(cls, size: int, seed: int | None = None) -> "PercPopulation":
        return cls(log_values=np.zeros(size), level=0, seed=seed)


def _draw(pool: np.ndarray, p_diamond: float, rng: np.random.Generator, size: int) -> np.ndarray:
    """`size` new log resistances from uniformly resampled pool members."""
    picks = pool[rng.integers(0, pool.shape[0], size=(size, 4))]
    diamond = rng.random(size) < p_diamond
    branch_a = np.logaddexp(picks[:, 0], picks[:, 1])
    branch_b = np.logaddexp(picks[:, 2], picks[:, 3])
    # parallel branches: 1/R = 1/A + 1/B
    parallel = -np.logaddexp(-branch_a, -branch_b)
    return np.where(diamond, parallel, branch_a)


def step_population(pop: PercPopulation, params: PercParams, rng: np.random.Generator) -> PercPopulation:
    if pop.log_values.shape[0] < 4:
        raise UsageError("population size must be at least 4")
    values = _draw(pop.log_values, params.p_diamond, rng, pop.log_values.shape[0])
    return PercPopulation(log_values=values, level=pop.level + 1, seed=pop.seed)


def _step_chunked(pop: PercPopulation, params: PercParams, seed: int, workers: int) -> PercPopulation:
    """One level with per-chunk generators seeded by (seed, level, chunk); worker count does not matter."""
    size = pop.log_values.shape[0]
    chunks = [(c, min(CHUNK_SIZE, size - c * CHUNK_SIZE)) for c in range(math.ceil(size / CHUNK_SIZE))]

    def run(chunk: int, n: int) -> np.ndarray:
        rng = np.random.default_rng([seed, POPULATION_STREAM, pop.level + 1, chunk])
        return _draw(pop.log_values, params.p_diamond, rng, n)

    if workers <= 1 or len(chunks) == 1:
        parts = [run(c, n) for c, n in chunks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda args: run(*args), chunks))
    return PercPopulation(log_values=np.concatenate(parts), level=pop.level + 1, seed=seed)


def level_stats(pop: PercPopulation) -> LevelStats:
    L = pop.log_values
    n = max(pop.level, 1)
    log_size = math.log(L.shape[0])
    log_mean = float(logsumexp(L) - log_size)
    log_mean_inv = float(logsumexp(-L) - log_size)
    log_second = float(logsumexp(2 * L) - log_size)
    quenched = float(L.mean()) / n
    annealed = log_mean / n
    return LevelStats(
        level=pop.level,
        quenched=quenched,
        annealed=annealed,
        gap=annealed - quenched,
        pop_std=float(L.std()) / n,
        product_moment=math.exp(log_mean + log_mean_inv),
        second_moment_ratio=math.exp(log_second - 2 * log_mean),
        log_mean_R=log_mean,
    )


def estimate_alpha(p: float, population_size: int = PERC_POPULATION, n_levels: int = PERC_LEVELS,
                   seed: int = DEFAULT_SEED, workers: int = DEFAULT_WORKERS,
                   trajectory_every: int = 1) -> AlphaEstimate:
    """Quenched (1/n) E log R_n and annealed (1/n) log E R_n from population dynamics."""
    if n_levels < 1:
        raise UsageError("n_levels must be >= 1")
    params = perc_params(p)
    logger.debug("=== POPULATION DYNAMICS ===")
    logger.debug(f"p={p:.6f} p_diamond={params.p_diamond:.6f} population={population_size} levels={n_levels}")

    pop = PercPopulation.initial(population_size, seed)
    trajectory = []
    for _ in range(n_levels):
        pop = _step_chunked(pop, params, seed, workers)
        # 1 <= R_n <= 2^n
        assert pop.log_values.min() >= -1e-9 and pop.log_values.max() <= pop.level * LOG2 + 1e-9
        if pop.level % trajectory_every == 0 or pop.level == n_levels:
            trajectory.append(level_stats(pop))
        if pop.level % 100 == 0:
            logger.debug(f"level {pop.level}: quenched {pop.log_values.mean() / pop.level:.6f}")

    final = trajectory[-1] if trajectory[-1].level == n_levels else level_stats(pop)
    stderr = float(pop.log_values.std(ddof=1) / math.sqrt(population_size) / n_levels)
    logger.info(f"alpha(p={p:.6f}): quenched {final.quenched:.6f}, annealed {final.annealed:.6f}, gap {final.gap:.2e}")
    return AlphaEstimate(
        p=p,
        population=population_size,
        levels=n_levels,
        seed=seed,
        quenched=final.quenched,
        annealed=final.annealed,
        gap=final.gap,
        stderr=stderr,
        trajectory=trajectory,
    )


def concentration_exponent(trajectory: list[LevelStats], min_level: int = 10) -> float:
    """Decay exponent c of stdev((1/n) log R_n) ~ n^-c, fitted in log-log."""
    points = [(s.level, s.pop_std) for s in trajectory if s.level >= min_level and s.pop_std > 0]
    if len(points) < 3:
        raise InsufficientData("need at least 3 levels to fit the concentration exponent")
    fit = stats.linregress([math.log(n) for n, _ in points], [math.log(s) for _, s in points])
    return float(-fit.slope)


# ============================================================================
# EXACT SMALL-LEVEL DISTRIBUTIONS
# ============================================================================

def _sum_distribution(d: dict) -> dict:
    out: dict = {}
    for x, px in d.items():
        for y, py in d.items():
            out[x + y] = out.get(x + y, 0) + px * py
    return out


def exact_distribution(p, n: int) -> dict[Fraction, float | Fraction]:
    """Law of R_n as {value: probability}; values are exact rationals.

    Probabilities are exact too when p is given as a Fraction.
    """
    if n < 0:
        raise UsageError("level must be >= 0")
    if n > EXACT_MAX_LEVEL:
        raise InsufficientData(f"exact distribution is capped at level {EXACT_MAX_LEVEL}, asked for {n}")
    if isinstance(p, Fraction):
        p_diamond = p ** 4 / (2 * p ** 2 - p ** 4)
    else:
        p_diamond = perc_params(float(p)).p_diamond
    p_series = 1 - p_diamond

    dist: dict = {Fraction(1): 1}
    for _ in range(n):
        branch = _sum_distribution(dist)
        nxt: dict = {}
        for value, prob in branch.items():
            nxt[value] = nxt.get(value, 0) + p_series * prob
        for a, pa in branch.items():
            for b, pb in branch.items():
                value = a * b / (a + b)
                nxt[value] = nxt.get(value, 0) + p_diamond * pa * pb
        dist = nxt
    return dict(sorted(dist.items()))


def exact_report(p, n: int) -> ExactDistribution:
    dist = exact_distribution(p, n)
    return ExactDistribution(
        p=float(p),
        level=n,
        atoms=[ExactAtom(value=f"{v.numerator}/{v.denominator}", approx=float(v), probability=float(q))
               for v, q in dist.items()],
    )


# ============================================================================
# MOMENT DIAGNOSTICS
# ============================================================================

def _log_moments(source) -> tuple[float, float, float]:
    """log E[R], log E[1/R], log E[R^2] of a population (log values) or an exact distribution."""
    if isinstance(source, PercPopulation):
        source = source.log_values
    if isinstance(source, dict):
        values = np.array([float(v) for v in source], dtype=np.float64)
        probs = np.array([float(q) for q in source.values()], dtype=np.float64)
        return (math.log(float(probs @ values)), math.log(float(probs @ (1 / values))),
                math.log(float(probs @ values ** 2)))
    L = np.asarray(source, dtype=np.float64)
    log_size = math.log(L.shape[0])
    return (float(logsumexp(L) - log_size), float(logsumexp(-L) - log_size), float(logsumexp(2 * L) - log_size))


def moment_bounds(p_diamond: float) -> tuple[str, float | None, float]:
    """(case, product bound, second-moment ratio bound) for a given p_diamond."""
    if p_diamond <= 0.5:
        return "p_diamond<=1/2", 11 / 5, 2.0
    if p_diamond <= 1 / math.sqrt(3):
        return "1/2<p_diamond<=1/sqrt3", 11 / 5, 3.0
    return "p_diamond>1/sqrt3", None, (2 - p_diamond) / (2 * p_diamond - 1)


def moment_diagnostics(source, params: PercParams, level: int, log_mean_history: list[float] | None = None,
                       slack: float = 0.01) -> MomentDiagnostics:
    """Moments of R_n and checks of the product, second-moment, growth and submultiplicativity bounds.

    `log_mean_history[k]` is log E[R_k] for k = 0..level-1 when available.
    """
    log_mean, log_mean_inv, log_second = _log_moments(source)
    product = math.exp(log_mean + log_mean_inv)
    second = math.exp(log_second - 2 * log_mean)
    case, product_bound, second_bound = moment_bounds(params.p_diamond)

    growth = lower = submultiplicative = None
    if log_mean_history and len(log_mean_history) >= level and level >= 1:
        growth = math.exp(log_mean - log_mean_history[level - 1])
        lower = 2 - 4 / 3 * params.p_diamond
        history = list(log_mean_history[:level]) + [log_mean]
        submultiplicative = all(
            history[k + m] <= history[k] + history[m] + math.log1p(slack)
            for k in range(1, level) for m in range(1, level - k + 1)
        )

    return MomentDiagnostics(
        level=level,
        mean_R=math.exp(log_mean),
        mean_inv_R=math.exp(log_mean_inv),
        product=product,
        second_moment_ratio=second,
        case=case,
        product_bound=product_bound,
        second_moment_bound=second_bound,
        product_ok=math.isfinite(product) if product_bound is None else product <= product_bound * (1 + slack),
        second_moment_ok=second <= second_bound * (1 + slack),
        growth_ratio=growth,
        growth_lower_bound=lower,
        submultiplicative=submultiplicative,
    )


def moment_sweep(p: float, levels: list[int], population_size: int = PERC_POPULATION, seed: int = DEFAULT_SEED,
                 workers: int = DEFAULT_WORKERS, slack: float = 0.01) -> list[MomentDiagnostics]:
    """Moment diagnostics of one population run at the requested levels."""
    params = perc_params(p)
    wanted = set(levels)
    pop = PercPopulation.initial(population_size, seed)
    history = [0.0]
    reports = []
    for _ in range(max(levels)):
        pop = _step_chunked(pop, params, seed, workers)
        if pop.level in wanted:
            reports.append(moment_diagnostics(pop, params, pop.level, history, slack=slack))
        history.append(_log_moments(pop)[0])
    return reports


# ============================================================================
# NO DETERMINISTIC LIMIT
# ============================================================================

def no_deterministic_limit_demo(p: float, lam: float, n: int, population_size: int = PERC_POPULATION,
                                seed: int = DEFAULT_SEED, report_levels: list[int] | None = None,
                                workers: int = DEFAULT_WORKERS) -> DispersionStats:
    """Quantile spread of lam^n R_n across levels; relative IQR staying positive means no concentration."""
    if lam <= 0:
        raise UsageError("lambda must be positive")
    params = perc_params(p)
    wanted = set(report_levels or [k for k in (1, 10, 50, 100, 200, 500, 1000, 2000) if k <= n] or [n])
    pop = PercPopulation.initial(population_size, seed)
    levels = []
    for _ in range(n):
        pop = _step_chunked(pop, params, seed, workers)
        if pop.level in wanted:
            scaled = pop.level * math.log(lam) + pop.log_values
            q25, q50, q75 = np.quantile(scaled, [0.25, 0.5, 0.75])
            with np.errstate(over="ignore", under="ignore"):
                levels.append(DispersionLevel(
                    level=pop.level,
                    median=float(np.exp(q50)),
                    iqr=float(np.exp(q75) - np.exp(q25)),
                    relative_iqr=float(np.exp(q75 - q50) - np.exp(q25 - q50)),
                ))
    return DispersionStats(p=p, lam=lam, levels=levels)


# ============================================================================
# CLUSTER MEAN MATRICES
# ============================================================================

def cluster_mean_matrices(p: float) -> tuple[np.ndarray, np.ndarray]:
    """Four-type mean offspring matrices E(M) (4x4) and E(N) (8x8), types red, blue, green, black.

    Black carries no offspring, so its row and column are zero.
    """
    E_M = np.array([
        [8 * p ** 2, 4 * p ** 4, 4 * p ** 5, 0],
        [4 * p ** 2, 4 * p ** 2, 4 * p ** 3, 0],
        [2 * p ** 2, 0, 2, 0],
        [0, 0, 0, 0],
    ], dtype=np.float64)
    E_N = np.zeros((8, 8), dtype=np.float64)
    E_N[0, [0, 2, 4]] = [4 * p ** 2, 2 * p ** 4, 2 * p ** 5]
    E_N[1, [1, 3, 5]] = [4 * p ** 2, 2 * p ** 4, 2 * p ** 5]
    E_N[2, [0, 2, 4]] = [2 * p ** 2, 2 * p ** 2, 2 * p ** 3]
    E_N[3, [1, 3, 5]] = [2 * p ** 2, 2 * p ** 2, 2 * p ** 3]
    E_N[4, [0, 4]] = [2 * p, 2 * p ** 2]
    E_N[5, 5] = 2 * p
    return E_M, E_N


def cluster_dimension_report(p: float = P_C, alpha: float | None = None, population_size: int = PERC_POPULATION,
                             n_levels: int = PERC_LEVELS, seed: int = DEFAULT_SEED,
                             workers: int = DEFAULT_WORKERS) -> ClusterDimensionReport:
    """Dimensions of the critical cluster from the live blocks of the mean matrices and alpha(p)."""
    perc_params(p)
    E_M, E_N = cluster_mean_matrices(p)
    lambda_M = spectral_radius(E_M[:3, :3])
    lambda_N = spectral_radius(E_N[:6, :6])
    if alpha is None:
        logger.info("No alpha given; running population dynamics")
        alpha = estimate_alpha(p, population_size, n_levels, seed, workers).quenched

    dim_B = math.log(lambda_M) / LOG2
    dim_D = math.log(lambda_M) / math.log(lambda_N) if lambda_N > 1 else math.inf
    dim_R = alpha / LOG2
    dim_W = dim_B + dim_R
    inverse_D = 0.0 if math.isinf(dim_D) else 1 / dim_D
    return ClusterDimensionReport(
        p=p,
        lambda_M=lambda_M,
        lambda_N=lambda_N,
        alpha=alpha,
        dim_B=dim_B,
        dim_D=dim_D,
        dim_R=dim_R,
        dim_W=dim_W,
        dim_S_finite_born=2 * dim_B * (1 - inverse_D) / dim_W,
        dim_S_generic=2 * dim_B / dim_W,
    )
