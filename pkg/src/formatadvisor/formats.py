"""Concrete HDFS format descriptors and their section-size calculators.

Three bundled formats:

  seqfile  -- key/value rows: 4-byte record length, 4-byte key length, one
              1-byte separator between value columns (two fewer separators
              than columns, the key needs none), a 16-byte sync marker every
              2000 body bytes, 30-byte header, no footer.
  avro     -- rows with an 8-byte per-row header, 4000-byte blocks each
              closed by 8 bytes of block metadata plus a 16-byte sync
              marker; header carries version/codec/sync plus ~30 bytes of
              schema per column; no footer.
  parquet  -- hybrid: 128 MB row groups, each column chunk split into
              ~1 MB pages (4-byte definition and repetition levels per
              page), 16-byte sync per column chunk, 8-byte row counter plus
              sync per group; footer holds schema plus 40 bytes of column
              statistics per row group and per page.

A synthetic vertical descriptor exercises the column-store model; the real
HDFS vertical formats were subsumed by hybrid ones, so none is modeled as a
named format.

`as_geometry` maps a descriptor (plus table statistics, since headers,
footers and block overheads depend on column counts and row volumes) onto
the generic LayoutGeometry.  The mapping keeps the generic totals equal to
the section calculators for horizontal formats and within a few per-page
bytes for parquet.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from types import MappingProxyType
from typing import Mapping

from .layouts import (
    HORIZONTAL,
    HYBRID,
    VERTICAL,
    DataStats,
    LayoutGeometry,
    LayoutKind,
    SizeBreakdown,
)


class UnknownFormatError(ValueError):
    """No section calculator is registered for this format name."""


@dataclass(frozen=True)
class FormatDescriptor:
    """A named format: its layout kind and physical byte constants."""

    name: str
    kind: LayoutKind
    constants: Mapping[str, float]

    def __post_init__(self) -> None:
        frozen = MappingProxyType(dict(self.constants))
        object.__setattr__(self, "constants", frozen)
        for key, value in frozen.items():
            if value < 0:
                raise ValueError(f"{self.name}: constant {key} must be >= 0")

    def __getitem__(self, key: str) -> float:
        return self.constants[key]

    def with_overrides(self, overrides: Mapping[str, float]) -> "FormatDescriptor":
        unknown = set(overrides) - set(self.constants)
        if unknown:
            raise KeyError(f"{self.name}: unknown constants {sorted(unknown)}")
        merged = dict(self.constants)
        merged.update(overrides)
        return FormatDescriptor(self.name, self.kind, merged)


SEQFILE = FormatDescriptor("seqfile", HORIZONTAL, {
    "header": 30,
    "record_length": 4,
    "key_length": 4,
    "col_separator": 1,
    "sync_marker": 16,
    "sync_block": 2000,
    "footer": 0,
})

AVRO = FormatDescriptor("avro", HORIZONTAL, {
    "version": 5,
    "codec": 4,
    "sync_marker": 16,
    "col_schema": 30,
    "block": 4000,
    "row_meta": 8,
    "block_meta": 8,
    "footer": 0,
})

PARQUET = FormatDescriptor("parquet", HYBRID, {
    "header": 4,
    "definition_level": 4,
    "repetition_level": 4,
    "row_counter": 8,
    "sync_marker": 16,
    "version": 4,
    "col_schema": 30,
    "col_stats_meta": 40,
    "magic": 4,
    "footer_length": 4,
    "row_group": 1.28e8,
    "page": 1.05e6,
})


def synthetic_vertical(header: float = 32, footer: float = 16,
                       col_separator: float = 8) -> FormatDescriptor:
    """A plain column store: columns laid out back to back with a fixed
    separator; exists to exercise the vertical model, not to mimic a real
    HDFS format."""
    return FormatDescriptor("vertical", VERTICAL, {
        "header": header,
        "footer": footer,
        "col_separator": col_separator,
    })


BUILTIN_FORMATS: dict[str, FormatDescriptor] = {
    "seqfile": SEQFILE,
    "avro": AVRO,
    "parquet": PARQUET,
    "vertical": synthetic_vertical(),
}


def get_format(name: str) -> FormatDescriptor:
    try:
        return BUILTIN_FORMATS[name]
    except KeyError:
        raise UnknownFormatError(f"unknown format {name!r}") from None


def seqfile_row_size(stats: DataStats, fd: FormatDescriptor = SEQFILE) -> float:
    """Record length + key length + column bytes + separators.

    Tables with fewer than 3 columns get no separators (the key column
    needs none and a single value column has nothing to separate), so the
    (cols - 2) separator count clamps at zero.
    """
    if stats.col_count < 2:
        warnings.warn("seqfile models key + value columns; separator count "
                      "clamped to 0 for a single-column table", stacklevel=2)
    separators = max(stats.col_count - 2, 0)
    return (fd["record_length"] + fd["key_length"]
            + stats.col_size * stats.col_count
            + fd["col_separator"] * separators)


def seqfile_sections(stats: DataStats, fd: FormatDescriptor = SEQFILE) -> SizeBreakdown:
    row = seqfile_row_size(stats, fd)
    total_rows = row * stats.row_count
    sync = math.ceil(total_rows / fd["sync_block"]) * fd["sync_marker"]
    return SizeBreakdown(header=fd["header"], body=total_rows + sync,
                         footer=fd["footer"])


def avro_header_size(stats: DataStats, fd: FormatDescriptor = AVRO) -> float:
    return (fd["version"] + stats.col_count * fd["col_schema"]
            + fd["codec"] + fd["sync_marker"])


def avro_sections(stats: DataStats, fd: FormatDescriptor = AVRO) -> SizeBreakdown:
    total_rows = (stats.row_size + fd["row_meta"]) * stats.row_count
    blocks = math.ceil(total_rows / fd["block"])
    block_meta = (fd["block_meta"] + fd["sync_marker"]) * blocks
    return SizeBreakdown(header=avro_header_size(stats, fd),
                         body=total_rows + block_meta, footer=fd["footer"])


def parquet_row_groups(stats: DataStats, fd: FormatDescriptor = PARQUET) -> float:
    """Fractional group count; each column chunk carries one sync marker."""
    col_bytes = (stats.col_size * stats.row_count + fd["sync_marker"]) * stats.col_count
    return col_bytes / fd["row_group"]


def parquet_pages_per_group(stats: DataStats, fd: FormatDescriptor = PARQUET) -> float:
    """Fractional pages in one full row group, across all its column chunks."""
    groups = parquet_row_groups(stats, fd)
    if groups == 0:
        return 0.0
    rows_pg = stats.row_count / groups
    return (stats.col_size * rows_pg + fd["sync_marker"]) * stats.col_count / fd["page"]


def parquet_sections(stats: DataStats, fd: FormatDescriptor = PARQUET) -> SizeBreakdown:
    groups = parquet_row_groups(stats, fd)
    if stats.row_count == 0 or groups == 0:
        footer = (fd["version"] + fd["col_schema"] * stats.col_count
                  + fd["magic"] + fd["footer_length"])
        return SizeBreakdown(header=fd["header"], body=0.0, footer=footer)
    pages = parquet_pages_per_group(stats, fd)
    per_page = fd["definition_level"] + fd["repetition_level"] + fd["page"]
    body = (per_page * pages + fd["row_counter"] + fd["sync_marker"]) * groups
    footer = (fd["version"] + fd["col_schema"] * stats.col_count
              + fd["magic"] + fd["footer_length"]
              + math.ceil(groups) * fd["col_stats_meta"] * (1.0 + pages))
    return SizeBreakdown(header=fd["header"], body=body, footer=footer)


def vertical_sections(stats: DataStats, fd: FormatDescriptor) -> SizeBreakdown:
    body = (stats.col_size * stats.row_count + fd["col_separator"]) * stats.col_count
    return SizeBreakdown(header=fd["header"], body=body, footer=fd["footer"])


_SECTIONS = {
    "seqfile": seqfile_sections,
    "avro": avro_sections,
    "parquet": parquet_sections,
    "vertical": vertical_sections,
}


def sections(stats: DataStats, fd: FormatDescriptor) -> SizeBreakdown:
    """Header/body/footer estimate for a named format."""
    try:
        calc = _SECTIONS[fd.name]
    except KeyError:
        raise UnknownFormatError(f"unknown format {fd.name!r}") from None
    return calc(stats, fd)


def as_geometry(fd: FormatDescriptor, stats: DataStats) -> LayoutGeometry:
    """Map a format's constants onto the generic layout variables.

    Needs the table statistics because schema headers, footers and
    block-interval overheads scale with column count and data volume.
    SeqFile's generic body uses the stats row size where the section
    calculator composes the row from column sizes; the two agree whenever
    row_size == col_size * col_count.
    """
    if fd.name == "seqfile":
        separators = max(stats.col_count - 2, 0)
        row_meta = (fd["record_length"] + fd["key_length"]
                    + fd["col_separator"] * separators)
        row = seqfile_row_size(stats, fd)
        sync = math.ceil(row * stats.row_count / fd["sync_block"]) * fd["sync_marker"]
        return LayoutGeometry(kind=HORIZONTAL, header_size=fd["header"],
                              footer_size=fd["footer"], row_meta=row_meta,
                              body_meta=sync, per_task_meta=fd["header"] + fd["footer"])
    if fd.name == "avro":
        header = avro_header_size(stats, fd)
        total_rows = (stats.row_size + fd["row_meta"]) * stats.row_count
        blocks = math.ceil(total_rows / fd["block"])
        block_meta = (fd["block_meta"] + fd["sync_marker"]) * blocks
        return LayoutGeometry(kind=HORIZONTAL, header_size=header,
                              footer_size=fd["footer"], row_meta=fd["row_meta"],
                              body_meta=block_meta, per_task_meta=header + fd["footer"])
    if fd.name == "parquet":
        footer = parquet_sections(stats, fd).footer
        return LayoutGeometry(kind=HYBRID, header_size=fd["header"],
                              footer_size=footer,
                              hybrid_col_meta=fd["sync_marker"],
                              rowgroup_meta=fd["row_counter"] + fd["sync_marker"],
                              rowgroup_size=fd["row_group"],
                              per_task_meta=fd["header"] + footer)
    if fd.name == "vertical":
        return LayoutGeometry(kind=VERTICAL, header_size=fd["header"],
                              footer_size=fd["footer"], vcol_meta=fd["col_separator"],
                              per_task_meta=fd["header"] + fd["footer"])
    raise UnknownFormatError(f"unknown format {fd.name!r}")
