"""
Models package initialization.
"""
from .schemas import (
    # System documents
    RuleConfig,
    SystemConfig,
    # Validation
    Violation,
    ValidationReport,
    # Graphs
    LevelGraphExport,
    BuildSummary,
    # Spectral and resistance
    MatricesReport,
    PsiEigenpair,
    PsiTrace,
    RenormalisationCheck,
    WalkBoundCheck,
    # Dimensions
    SpectralInputs,
    DimensionReport,
    LocalDimensions,
    TableRow,
    # Walks
    ExitTimeSample,
    WalkDimensionEstimate,
    CommuteTimeResult,
    ReturnProbabilityResult,
    TraceResult,
    # Percolation
    PercParams,
    LevelStats,
    AlphaEstimate,
    MomentDiagnostics,
    DispersionLevel,
    DispersionStats,
    ExactAtom,
    ExactDistribution,
    ClusterDimensionReport,
    # Provenance
    RunManifest,
)

__all__ = [
    "RuleConfig",
    "SystemConfig",
    "Violation",
    "ValidationReport",
    "LevelGraphExport",
    "BuildSummary",
    "MatricesReport",
    "PsiEigenpair",
    "PsiTrace",
    "RenormalisationCheck",
    "WalkBoundCheck",
    "SpectralInputs",
    "DimensionReport",
    "LocalDimensions",
    "TableRow",
    "ExitTimeSample",
    "WalkDimensionEstimate",
    "CommuteTimeResult",
    "ReturnProbabilityResult",
    "TraceResult",
    "PercParams",
    "LevelStats",
    "AlphaEstimate",
    "MomentDiagnostics",
    "DispersionLevel",
    "DispersionStats",
    "ExactAtom",
    "ExactDistribution",
    "ClusterDimensionReport",
    "RunManifest",
]
