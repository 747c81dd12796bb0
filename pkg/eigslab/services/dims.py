"""
Dimensions and classifications of a system, and the reference dimension table.
"""
import logging
import math

import pandas as pd

from ..config import SCALE_FREE_EPS
from ..exceptions import EigsLabError
from ..models.schemas import DimensionReport, LocalDimensions, PsiEigenpair, SpectralInputs, TableRow
from .presets import TABLE_PRESETS, load_preset
from .resistance import psi_eigenpair
from .spectral import degree_matrix, distance_family, mass_matrix, rho_min, spectral_radius
from .system import EIGSystem

logger = logging.getLogger(__name__)

RECURRENCE_EPS = 1e-9

DIM_FIELDS = ["dim_B", "dim_D", "dim_R", "dim_W", "dim_S_finite_born", "dim_S_generic"]

_L = math.log

# published values of the deterministic rows (inf = not scale-free)
REFERENCE_VALUES: dict[str, tuple[dict[str, float], bool]] = {
    "dhl": (dict(dim_B=2, dim_D=2, dim_R=0, dim_W=2, dim_S_finite_born=1, dim_S_generic=2), False),
    "flower-2-3": (dict(dim_B=1 + _L(2) / _L(3), dim_D=1 + _L(3) / _L(2), dim_R=1 - _L(2) / _L(3), dim_W=2,
                        dim_S_finite_born=1, dim_S_generic=1 + _L(2) / _L(3)), True),
    "flower-3-2": (dict(dim_B=1 + _L(3) / _L(2), dim_D=1 + _L(2) / _L(3), dim_R=1 - _L(3) / _L(2), dim_W=2,
                        dim_S_finite_born=1, dim_S_generic=1 + _L(3) / _L(2)), False),
    "vicsek": (dict(dim_B=_L(5) / _L(3), dim_D=math.inf, dim_R=1, dim_W=1 + _L(5) / _L(3),
                    dim_S_finite_born=2 * _L(5) / _L(15), dim_S_generic=2 * _L(5) / _L(15)), True),
    # laakso and xi are kept as published; the shipped canonical rules give smaller dim_R
    "laakso": (dict(dim_B=_L(6) / _L(4), dim_D=math.inf, dim_R=1, dim_W=1 + _L(6) / _L(4),
                    dim_S_finite_born=2 * _L(6) / _L(24), dim_S_generic=2 * _L(6) / _L(24)), True),
    "xi": (dict(dim_B=_L(6) / _L(3), dim_D=math.inf, dim_R=_L(11 / 3) / _L(3), dim_W=_L(22) / _L(3),
                dim_S_finite_born=2 * _L(6) / _L(22), dim_S_generic=2 * _L(6) / _L(22)), True),
    "fig2": (dict(dim_B=2.4461, dim_D=2.4461, dim_R=0.1455, dim_W=2.5916,
                  dim_S_finite_born=1.1160, dim_S_generic=1.8877), True),
}


def _regime(dim_R: float) -> str:
    if dim_R > RECURRENCE_EPS:
        return "positive"
    if dim_R < -RECURRENCE_EPS:
        return "negative"
    return "marginal"


def dimensions(system: EIGSystem, eigenpair: PsiEigenpair | None = None) -> DimensionReport:
    """Box, degree, resistance, walk and spectral dimensions from M, N, D and Psi."""
    rho_M = spectral_radius(mass_matrix(system))
    rho_N = spectral_radius(degree_matrix(system))
    rho_D = rho_min(distance_family(system))
    if rho_D <= 1:
        logger.error(f"{system.name}: rho_min(D)={rho_D} <= 1")
        raise EigsLabError(f"rho_min of the distance family is {rho_D:.6g} <= 1; the system is not distance-positive")
    rho_Psi = (eigenpair or psi_eigenpair(system)).rho

    scale_free = rho_N > 1 + SCALE_FREE_EPS
    dim_B = math.log(rho_M) / math.log(rho_D)
    dim_D = math.log(rho_M) / math.log(rho_N) if scale_free else math.inf
    dim_R = math.log(rho_Psi) / math.log(rho_D)
    dim_W = dim_B + dim_R
    inverse_D = 0.0 if math.isinf(dim_D) else 1.0 / dim_D

    report = DimensionReport(
        system=system.name,
        dim_B=dim_B,
        dim_D=dim_D,
        dim_R=dim_R,
        dim_W=dim_W,
        dim_S_finite_born=2 * dim_B * (1 - inverse_D) / dim_W,
        dim_S_generic=2 * dim_B / dim_W,
        recurrent=rho_Psi > 1 + RECURRENCE_EPS,
        scale_free=scale_free,
        regime=_regime(dim_R),
        inputs=SpectralInputs(rho_M=rho_M, rho_N=rho_N, rho_min_D=rho_D, rho_Psi=rho_Psi),
    )
    logger.info(f"{system.name}: dim_B={dim_B:.4f} dim_D={dim_D:.4f} dim_R={dim_R:.4f} dim_W={dim_W:.4f}")
    return report


def local_dimensions(system: EIGSystem) -> LocalDimensions:
    rho_N = spectral_radius(degree_matrix(system))
    if rho_N <= 1 + SCALE_FREE_EPS:
        return LocalDimensions(system=system.name, degenerate=True)
    mass_loc = math.log(rho_N) / math.log(rho_min(distance_family(system)))
    return LocalDimensions(system=system.name, mass_loc=mass_loc, res_loc=-mass_loc)


# ============================================================================
# REFERENCE TABLE
# ============================================================================

def table1(presets: list[str] | None = None) -> list[TableRow]:
    rows = []
    for name in presets or TABLE_PRESETS:
        report = dimensions(load_preset(name))
        reference, recurrent = REFERENCE_VALUES.get(report.system, ({}, None))
        deltas = {}
        for key, expected in reference.items():
            value = getattr(report, key)
            deltas[key] = 0.0 if math.isinf(value) and math.isinf(expected) else value - expected
        rows.append(TableRow(report=report, reference=reference, reference_recurrent=recurrent, deltas=deltas))
    return rows


def table_frame(rows: list[TableRow]) -> pd.DataFrame:
    records = []
    for row in rows:
        record = {"system": row.report.system}
        for key in DIM_FIELDS:
            record[key] = getattr(row.report, key)
        record["class"] = "Recc." if row.report.recurrent else "Tran."
        record["regime"] = row.report.regime
        for key in DIM_FIELDS:
            record[f"ref_{key}"] = row.reference.get(key)
            record[f"delta_{key}"] = row.deltas.get(key)
        records.append(record)
    return pd.DataFrame.from_records(records)


def format_table(rows: list[TableRow]) -> str:
    """Aligned text table in the published column order, with deltas where a reference exists."""
    header = f"{'system':<12}" + "".join(f"{k:>20}" for k in DIM_FIELDS) + f"{'class':>8}"
    lines = [header, "-" * len(header)]
    for row in rows:
        cells = []
        for key in DIM_FIELDS:
            value = getattr(row.report, key)
            cell = "inf" if math.isinf(value) else f"{value:.4f}"
            if key in row.deltas and abs(row.deltas[key]) >= 5e-4:
                cell += f" ({row.deltas[key]:+.4f})"
            cells.append(f"{cell:>20}")
        klass = "Recc." if row.report.recurrent else "Tran."
        lines.append(f"{row.report.system:<12}" + "".join(cells) + f"{klass:>8}")
    return "\n".join(lines)
