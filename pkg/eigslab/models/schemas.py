"""
Pydantic models for input documents and result records.
"""
import networkx as nx
from pydantic import BaseModel, ConfigDict, Field, model_validator


# ============================================================================
# SYSTEM DOCUMENTS
# ============================================================================

class RuleConfig(BaseModel):
    """One rule graph R_i with its two planting vertices."""
    model_config = ConfigDict(extra="forbid")

    vertices: int = Field(ge=2)
    plant_plus: int = Field(ge=0)
    plant_minus: int = Field(ge=0)
    edges: list[tuple[int, int, int]] = Field(min_length=1)  # (tail, head, colour)

    @model_validator(mode="after")
    def check_structure(self):
        if self.plant_plus == self.plant_minus:
            raise ValueError("plant_plus and plant_minus must differ")
        for name in ("plant_plus", "plant_minus"):
            if getattr(self, name) >= self.vertices:
                raise ValueError(f"{name}={getattr(self, name)} is not a vertex id below {self.vertices}")
        for idx, (tail, head, _) in enumerate(self.edges):
            if not (0 <= tail < self.vertices and 0 <= head < self.vertices):
                raise ValueError(f"edges.{idx}: endpoint outside 0..{self.vertices - 1}")
            if tail == head:
                raise ValueError(f"edges.{idx}: self-loop at vertex {tail}")

        # underlying undirected graph must be connected
        G = nx.MultiGraph()
        G.add_nodes_from(range(self.vertices))
        G.add_edges_from((tail, head) for tail, head, _ in self.edges)
        if not nx.is_connected(G):
            raise ValueError(f"rule graph is disconnected ({nx.number_connected_components(G)} components)")
        return self


class SystemConfig(BaseModel):
    """JSON document describing an EIGS with a single-edge initial graph."""
    model_config = ConfigDict(extra="forbid")

    name: str | None = None
    description: str | None = None
    colours: int = Field(ge=1)
    initial_colour: int = Field(ge=1)
    allow_decorations: bool = False  # tolerate edges on no terminal path (tree presets)
    rules: list[RuleConfig]

    @model_validator(mode="after")
    def check_colours(self):
        if len(self.rules) != self.colours:
            raise ValueError(f"expected {self.colours} rules (one per colour), got {len(self.rules)}")
        if self.initial_colour > self.colours:
            raise ValueError(f"initial_colour {self.initial_colour} outside 1..{self.colours}")
        for ridx, rule in enumerate(self.rules):
            for eidx, (_, _, colour) in enumerate(rule.edges):
                if not 1 <= colour <= self.colours:
                    raise ValueError(f"rules.{ridx}.edges.{eidx}: colour {colour} outside 1..{self.colours}")
        return self


# ============================================================================
# VALIDATION MODELS
# ============================================================================

class Violation(BaseModel):
    """A single breach of the standing assumptions."""
    kind: str  # "not_canonical", "decoration", "distance", "terminal_distance"
    colour: int | None = None
    edge: tuple[int, int] | None = None
    detail: str


class ValidationReport(BaseModel):
    system: str
    violations: list[Violation]
    warnings: list[Violation] = []
    valid: bool


# ============================================================================
# GRAPH EXPORT MODELS
# ============================================================================

class LevelGraphExport(BaseModel):
    level: int
    terminal_plus: int
    terminal_minus: int
    birth_level: list[int]
    edges: list[tuple[int, int, int]]


class BuildSummary(BaseModel):
    system: str
    level: int
    vertices: int
    edges: int
    edges_per_colour: list[int]
    predicted_vertices: int
    predicted_edges: int
    terminal_degree: int
    predicted_terminal_degree: int
    terminal_distance: int
    rho_min_power: float  # rho_min(D)^level, the scale of terminal_distance


# ============================================================================
# SPECTRAL MODELS
# ============================================================================

class MatricesReport(BaseModel):
    system: str
    mass_matrix: list[list[int]]
    degree_matrix: list[list[int]]
    distance_family: list[list[list[int]]]
    path_choices: list[list[list[int]]]  # per family member: per colour the vertex path
    rho_M: float
    rho_N: float
    rho_min_D: float


# ============================================================================
# RESISTANCE MODELS
# ============================================================================

class PsiEigenpair(BaseModel):
    """Perron eigenpair of the renormalisation map."""
    rho: float = Field(gt=0)
    v: list[float]
    iterations: int
    residual: float
    projective_gap: float


class PsiTrace(BaseModel):
    iterates: list[list[float]]
    ratios: list[list[float]]
    c_star: list[float]
    projective_distance: list[float]


class RenormalisationCheck(BaseModel):
    system: str
    level: int
    x: list[float]
    lhs: float
    rhs: float
    discrepancy: float


class WalkBoundCheck(BaseModel):
    """|E| R(u,v) >= d(u,v)^2 for one vertex pair."""
    u: int
    v: int
    energy_product: float
    distance_squared: float
    holds: bool


# ============================================================================
# DIMENSION MODELS
# ============================================================================

class SpectralInputs(BaseModel):
    rho_M: float
    rho_N: float
    rho_min_D: float
    rho_Psi: float


class DimensionReport(BaseModel):
    """All exponents of one system (one row of the dimension table)."""
    model_config = ConfigDict(ser_json_inf_nan="constants")

    system: str
    dim_B: float
    dim_D: float  # +inf when not scale-free
    dim_R: float
    dim_W: float
    dim_S_finite_born: float
    dim_S_generic: float
    recurrent: bool
    scale_free: bool
    regime: str  # "positive", "marginal", "negative"
    inputs: SpectralInputs


class LocalDimensions(BaseModel):
    system: str
    mass_loc: float | None = None
    res_loc: float | None = None
    degenerate: bool = False


class TableRow(BaseModel):
    """Computed dimensions next to published reference values."""
    model_config = ConfigDict(ser_json_inf_nan="constants")

    report: DimensionReport
    reference: dict[str, float] = {}
    reference_recurrent: bool | None = None
    deltas: dict[str, float] = {}


# ============================================================================
# WALK MODELS
# ============================================================================

class ExitTimeSample(BaseModel):
    model_config = ConfigDict(ser_json_inf_nan="constants")

    radius_m: int | None = None
    radius: float
    mean_tau: float
    stderr: float  # nan when every trial was censored
    trials: int
    censored: int = 0
    censored_fraction: float = 0.0


class WalkDimensionEstimate(BaseModel):
    system: str
    level: int
    start: int
    slope: float
    stderr: float
    predicted: float | None = None
    samples: list[ExitTimeSample]


class CommuteTimeResult(BaseModel):
    a: int
    b: int
    empirical_mean: float
    stderr: float
    identity_value: float
    trials: int
    censored: int = 0

    @property
    def z_score(self) -> float:
        if self.stderr == 0:
            return 0.0 if self.empirical_mean == self.identity_value else float("inf")
        return abs(self.empirical_mean - self.identity_value) / self.stderr


class ReturnProbabilityResult(BaseModel):
    model_config = ConfigDict(ser_json_inf_nan="constants")

    vertex: int
    method: str  # "exact" or "monte_carlo"
    times: list[int]
    probabilities: list[float]
    stderrs: list[float]
    excluded: list[int] = []
    spectral_dim_estimate: float | None = None
    stderr: float | None = None
    caveat: str = (
        "discrete return-probability slope; a heuristic proxy for the diffusion "
        "spectral dimension, not a tolerance-backed estimate"
    )


class TraceResult(BaseModel):
    start: int
    steps: int
    seed: int
    vertices: list[int]


# ============================================================================
# PERCOLATION MODELS
# ============================================================================

class PercParams(BaseModel):
    p: float = Field(gt=0, lt=1)
    p_diamond: float
    p_series: float
    p_c: float


class LevelStats(BaseModel):
    level: int
    quenched: float
    annealed: float
    gap: float
    pop_std: float
    product_moment: float
    second_moment_ratio: float
    log_mean_R: float


class AlphaEstimate(BaseModel):
    p: float
    population: int
    levels: int
    seed: int
    quenched: float
    annealed: float
    gap: float
    stderr: float
    resampling: str = "with-replacement"
    trajectory: list[LevelStats] = []


class MomentDiagnostics(BaseModel):
    level: int
    mean_R: float
    mean_inv_R: float
    product: float
    second_moment_ratio: float
    case: str
    product_bound: float | None = None
    second_moment_bound: float | None = None
    product_ok: bool
    second_moment_ok: bool
    growth_ratio: float | None = None
    growth_lower_bound: float | None = None
    submultiplicative: bool | None = None


class DispersionLevel(BaseModel):
    model_config = ConfigDict(ser_json_inf_nan="constants")

    level: int
    median: float
    iqr: float
    relative_iqr: float


class DispersionStats(BaseModel):
    p: float
    lam: float
    levels: list[DispersionLevel]


class ExactAtom(BaseModel):
    value: str  # exact rational as "a/b"
    approx: float
    probability: float


class ExactDistribution(BaseModel):
    p: float
    level: int
    atoms: list[ExactAtom]


class ClusterDimensionReport(BaseModel):
    model_config = ConfigDict(ser_json_inf_nan="constants")

    p: float
    lambda_M: float
    lambda_N: float
    alpha: float
    dim_B: float
    dim_D: float
    dim_R: float
    dim_W: float
    dim_S_finite_born: float
    dim_S_generic: float
    heuristic: bool = True
    note: str = "walk and spectral exponents are heuristic for the random cluster"


# ============================================================================
# RUN MANIFEST
# ============================================================================

class RunManifest(BaseModel):
    """Provenance record written next to every result file."""
    command: list[str]
    config_hash: str | None = None
    seed: int | None = None
    tool_version: str
    wall_time: float
    outputs: list[str]
