"""Generic size and read-cost models for the three fragmentation strategies.

Layouts split a table horizontally (whole rows together), vertically (each
column its own run), or hybrid (row groups stored column-wise).  Every model
here is driven by a LayoutGeometry describing the physical overheads of a
concrete format and by DataStats describing the table; nothing in this
module knows about any particular file format.

Size conventions:
  * body sizes keep fractional row-group counts; only row-group metadata
    and the sorted-selection branch round up, since those are materialized
    per started group,
  * a scan re-reads the per-task metadata once per chunk, because each
    distributed task opens the file independently,
  * variable-length columns carry 4 extra bytes each; DataStats folds that
    into its normalized column/row sizes so the equations stay clean.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

from .system import (
    CostEstimate,
    SystemProfile,
    read_estimate,
    seeks,
    used_chunks,
)

VARLEN_OVERHEAD = 4  # length prefix bytes per variable-length column

LayoutKind = Literal["horizontal", "vertical", "hybrid"]

HORIZONTAL: LayoutKind = "horizontal"
VERTICAL: LayoutKind = "vertical"
HYBRID: LayoutKind = "hybrid"


class KindMismatchError(ValueError):
    """An operation was applied to a geometry of the wrong layout kind."""


class IncompleteGeometryError(ValueError):
    """A geometry lacks a field its layout kind requires."""


@dataclass(frozen=True)
class DataStats:
    """Per-intermediate-result statistics.

    `avg_row_size` and `avg_col_size` are raw value widths; the normalized
    `row_size` / `col_size` properties add the 4-byte overhead of each
    variable-length column.  Row and column averages are independent inputs
    (one is not derived from the other).
    """

    row_count: int
    avg_row_size: float
    avg_col_size: float
    col_count: int
    varlen_col_count: int = 0

    def __post_init__(self) -> None:
        if self.row_count < 0:
            raise ValueError("row_count must be >= 0")
        if self.col_count < 1:
            raise ValueError("col_count must be >= 1")
        if not 0 <= self.varlen_col_count <= self.col_count:
            raise ValueError("varlen_col_count must be in [0, col_count]")
        if self.row_count > 0 and (self.avg_row_size <= 0 or self.avg_col_size <= 0):
            raise ValueError("row/col sizes must be > 0 for a non-empty table")

    @property
    def col_size(self) -> float:
        """Average column size with the varlen adjustment folded in."""
        return self.avg_col_size + VARLEN_OVERHEAD * self.varlen_col_count / self.col_count

    @property
    def row_size(self) -> float:
        """Average row size with the varlen adjustment folded in."""
        return self.avg_row_size + VARLEN_OVERHEAD * self.varlen_col_count


@dataclass(frozen=True)
class LayoutGeometry:
    """Physical-layout constants of a concrete format, in bytes.

    per_task_meta is what every task re-reads (typically header + footer).
    row_meta / body_meta apply to horizontal layouts, vcol_meta to vertical
    ones, hybrid_col_meta / rowgroup_meta / rowgroup_size to hybrid ones.
    """

    kind: LayoutKind
    header_size: float = 0.0
    footer_size: float = 0.0
    per_task_meta: float = 0.0
    row_meta: float = 0.0
    body_meta: float = 0.0
    vcol_meta: float = 0.0
    hybrid_col_meta: float = 0.0
    rowgroup_meta: float = 0.0
    rowgroup_size: float = 0.0

    def __post_init__(self) -> None:
        for name in ("header_size", "footer_size", "per_task_meta", "row_meta",
                     "body_meta", "vcol_meta", "hybrid_col_meta",
                     "rowgroup_meta", "rowgroup_size"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.kind not in (HORIZONTAL, VERTICAL, HYBRID):
            raise ValueError(f"unknown layout kind {self.kind!r}")
        if self.kind == HYBRID and self.rowgroup_size <= 0:
            raise IncompleteGeometryError("hybrid geometry needs rowgroup_size > 0")


OpKind = Literal["scan", "project", "select"]


@dataclass(frozen=True)
class OperationProfile:
    """One downstream operation reading a materialized result."""

    kind: OpKind
    ref_cols: int | None = None
    selectivity: float | None = None
    sorted: bool = False
    frequency: float = 1.0

    def __post_init__(self) -> None:
        if self.kind not in ("scan", "project", "select"):
            raise ValueError(f"unknown operation kind {self.kind!r}")
        if self.kind == "project":
            if self.ref_cols is None or self.ref_cols < 1:
                raise ValueError("project needs ref_cols >= 1")
        if self.kind == "select":
            if self.selectivity is None or not 0.0 <= self.selectivity <= 1.0:
                raise ValueError("select needs selectivity in [0, 1]")
        if self.frequency <= 0:
            raise ValueError("frequency must be > 0")

    @classmethod
    def scan(cls, frequency: float = 1.0) -> "OperationProfile":
        return cls(kind="scan", frequency=frequency)

    @classmethod
    def project(cls, ref_cols: int, frequency: float = 1.0) -> "OperationProfile":
        return cls(kind="project", ref_cols=ref_cols, frequency=frequency)

    @classmethod
    def select(cls, selectivity: float, sorted: bool = False,
               frequency: float = 1.0) -> "OperationProfile":
        return cls(kind="select", selectivity=selectivity, sorted=sorted,
                   frequency=frequency)


@dataclass(frozen=True)
class SizeBreakdown:
    """Header / body / footer bytes of one layout."""

    header: float
    body: float
    footer: float

    @property
    def total(self) -> float:
        return self.header + self.body + self.footer


def _require_kind(geo: LayoutGeometry, kind: LayoutKind) -> None:
    if geo.kind != kind:
        raise KindMismatchError(f"expected {kind} geometry, got {geo.kind}")


# --- body sizes -------------------------------------------------------------

def horizontal_body_size(stats: DataStats, geo: LayoutGeometry) -> float:
    """(row + per-row meta) * rows, plus fixed body metadata."""
    _require_kind(geo, HORIZONTAL)
    return (stats.row_size + geo.row_meta) * stats.row_count + geo.body_meta


def vertical_one_col_size(stats: DataStats, geo: LayoutGeometry) -> float:
    """One stored column: col * rows plus its metadata."""
    _require_kind(geo, VERTICAL)
    return stats.col_size * stats.row_count + geo.vcol_meta


def vertical_body_size(stats: DataStats, geo: LayoutGeometry) -> float:
    return vertical_one_col_size(stats, geo) * stats.col_count


def hybrid_row_groups(stats: DataStats, geo: LayoutGeometry) -> float:
    """Fractional row-group count: column bytes (with per-column meta) / group size."""
    _require_kind(geo, HYBRID)
    col_bytes = (stats.col_size * stats.row_count + geo.hybrid_col_meta) * stats.col_count
    return col_bytes / geo.rowgroup_size


def hybrid_meta_size(stats: DataStats, geo: LayoutGeometry) -> float:
    """Row-group metadata; a started group stores it even when not full."""
    return math.ceil(hybrid_row_groups(stats, geo)) * geo.rowgroup_meta


def hybrid_body_size(stats: DataStats, geo: LayoutGeometry) -> float:
    return hybrid_row_groups(stats, geo) * geo.rowgroup_size + hybrid_meta_size(stats, geo)


_BODY_BY_KIND = {
    HORIZONTAL: horizontal_body_size,
    VERTICAL: vertical_body_size,
    HYBRID: hybrid_body_size,
}


def total_layout_size(stats: DataStats, geo: LayoutGeometry) -> SizeBreakdown:
    """Header + body + footer for the geometry's layout kind."""
    body = _BODY_BY_KIND[geo.kind](stats, geo)
    return SizeBreakdown(header=geo.header_size, body=body, footer=geo.footer_size)


# --- scan -------------------------------------------------------------------

def scan_size(stats: DataStats, geo: LayoutGeometry, sys: SystemProfile) -> float:
    """Full layout plus one per-task metadata re-read per chunk."""
    layout = total_layout_size(stats, geo).total
    return layout + used_chunks(layout, sys) * geo.per_task_meta


def scan_cost(stats: DataStats, geo: LayoutGeometry, sys: SystemProfile) -> CostEstimate:
    """Transfer the scan size; seek once per chunk of the base layout."""
    layout = total_layout_size(stats, geo).total
    chunks = used_chunks(scan_size(stats, geo, sys), sys)
    return read_estimate(chunks, seeks(layout, sys), sys)


# --- vertical projection ----------------------------------------------------

def project_size_vertical(op: OperationProfile, stats: DataStats,
                          geo: LayoutGeometry) -> float:
    _require_kind(geo, VERTICAL)
    if op.kind != "project":
        raise ValueError("vertical projection needs a project operation")
    if op.ref_cols > stats.col_count:
        raise ValueError("ref_cols exceeds col_count")
    one_col = vertical_one_col_size(stats, geo)
    return geo.header_size + geo.footer_size + one_col * op.ref_cols


def project_cost_vertical(op: OperationProfile, stats: DataStats,
                          geo: LayoutGeometry, sys: SystemProfile) -> CostEstimate:
    """Each referenced column is its own run on disk: one seek set per column."""
    chunks = used_chunks(project_size_vertical(op, stats, geo), sys)
    per_col_seeks = seeks(vertical_one_col_size(stats, geo), sys)
    return read_estimate(chunks, op.ref_cols * per_col_seeks, sys)


# --- hybrid projection ------------------------------------------------------

def rows_per_row_group(stats: DataStats, geo: LayoutGeometry) -> float:
    groups = hybrid_row_groups(stats, geo)
    if groups == 0:
        raise ValueError("empty table has no row groups")
    return stats.row_count / groups


def project_size_hybrid(op: OperationProfile, stats: DataStats,
                        geo: LayoutGeometry, sys: SystemProfile) -> float:
    """Referenced column bytes per group, group metadata, per-task re-reads."""
    _require_kind(geo, HYBRID)
    if op.kind != "project":
        raise ValueError("hybrid projection needs a project operation")
    if op.ref_cols > stats.col_count:
        raise ValueError("ref_cols exceeds col_count")
    groups = hybrid_row_groups(stats, geo)
    if groups == 0:
        ref_bytes = 0.0
    else:
        rows_pg = rows_per_row_group(stats, geo)
        ref_bytes = (stats.col_size * rows_pg + geo.hybrid_col_meta) * op.ref_cols
    layout = total_layout_size(stats, geo).total
    return (geo.header_size + geo.footer_size
            + (ref_bytes + geo.rowgroup_meta) * groups
            + used_chunks(layout, sys) * hybrid_meta_size(stats, geo))


def project_cost_hybrid(op: OperationProfile, stats: DataStats,
                        geo: LayoutGeometry, sys: SystemProfile) -> CostEstimate:
    """Seek term covers the whole file, not just the projected columns."""
    chunks = used_chunks(project_size_hybrid(op, stats, geo, sys), sys)
    layout = total_layout_size(stats, geo).total
    return read_estimate(chunks, seeks(layout, sys), sys)


# --- hybrid selection -------------------------------------------------------

def row_group_hit_probability(selectivity: float, rows_per_group: float) -> float:
    """P(a group holds at least one matching row) = 1 - (1 - SF)^rows.

    Computed in log-space so tiny selectivities with huge exponents stay
    stable: 1 - exp(rows * log1p(-SF)).
    """
    if not 0.0 <= selectivity <= 1.0:
        raise ValueError("selectivity must be in [0, 1]")
    if rows_per_group < 0:
        raise ValueError("rows_per_group must be >= 0")
    if selectivity == 0.0 or rows_per_group == 0:
        return 0.0
    if selectivity == 1.0:
        return 1.0
    return -math.expm1(rows_per_group * math.log1p(-selectivity))


def selected_rows_size(op: OperationProfile, stats: DataStats,
                       geo: LayoutGeometry) -> float:
    """Bytes of matching rows across all columns: (col * SF * rows + meta) * cols."""
    if op.kind != "select":
        raise ValueError("needs a select operation")
    return ((stats.col_size * op.selectivity * stats.row_count + geo.hybrid_col_meta)
            * stats.col_count)


def selected_row_groups(op: OperationProfile, stats: DataStats,
                        geo: LayoutGeometry) -> float:
    """Expected fetched groups: hit probability per group when unsorted;
    matching rows are contiguous when sorted, so just their ceil'd span."""
    _require_kind(geo, HYBRID)
    groups = hybrid_row_groups(stats, geo)
    if op.sorted:
        return math.ceil(selected_rows_size(op, stats, geo) / geo.rowgroup_size)
    if groups == 0:
        return 0.0
    hit = row_group_hit_probability(op.selectivity, rows_per_row_group(stats, geo))
    return groups * hit


def select_size_hybrid(op: OperationProfile, stats: DataStats,
                       geo: LayoutGeometry, sys: SystemProfile) -> float:
    layout = total_layout_size(stats, geo).total
    return (geo.header_size + geo.footer_size
            + selected_row_groups(op, stats, geo) * geo.rowgroup_size
            + used_chunks(layout, sys) * hybrid_meta_size(stats, geo))


def select_cost_hybrid(op: OperationProfile, stats: DataStats,
                       geo: LayoutGeometry, sys: SystemProfile) -> CostEstimate:
    size = select_size_hybrid(op, stats, geo, sys)
    return read_estimate(used_chunks(size, sys), seeks(size, sys), sys)


# --- dispatcher ---------------------------------------------------------------

def read_cost(op: OperationProfile, stats: DataStats, geo: LayoutGeometry,
              sys: SystemProfile) -> CostEstimate:
    """Cost of one downstream operation under the layout's native support.

    Horizontal layouts scan for everything; vertical layouts support
    projection natively but scan for selection; hybrid layouts support both.
    """
    if op.kind == "scan":
        return scan_cost(stats, geo, sys)
    if geo.kind == HORIZONTAL:
        return scan_cost(stats, geo, sys)
    if geo.kind == VERTICAL:
        if op.kind == "project":
            return project_cost_vertical(op, stats, geo, sys)
        return scan_cost(stats, geo, sys)
    if op.kind == "project":
        return project_cost_hybrid(op, stats, geo, sys)
    return select_cost_hybrid(op, stats, geo, sys)
