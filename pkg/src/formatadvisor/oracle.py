"""Independent ground-truth generators for validating the cost model.

Three oracles, deliberately built from the physical file structures rather
than from the estimation formulas:

  * reference writers -- lay out a synthetic table byte by byte per format
    (headers, per-row metadata, sync markers, blocks, row groups, pages,
    footers) and account every section exactly.  Rows are uniform, so the
    accounting walks sync/block/group boundaries instead of individual
    rows; the per-row loop and the boundary walk are provably identical
    for fixed-width rows (the tests check this against a naive loop).
  * a Monte Carlo row-group-hit estimator -- places the matching rows of a
    selection uniformly without replacement and counts touched groups.
  * a stochastic I/O replayer -- charges seek time per touched chunk and
    transfer time per byte for an explicit access plan, with per-chunk
    locality draws; plus a plan builder that turns (operation, format)
    into the extents a real reader would fetch.

The writers are structural emulations, not wire-compatible files: byte
counts are what the cost model predicts, so byte counts are what the
oracle must pin down.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import fmean
from typing import Iterable, Literal, Sequence

import numpy as np

from .formats import FormatDescriptor, UnknownFormatError
from .layouts import (
    HORIZONTAL,
    VERTICAL,
    VARLEN_OVERHEAD,
    DataStats,
    OperationProfile,
    SizeBreakdown,
)
from .system import SystemProfile


@dataclass(frozen=True)
class SyntheticTable:
    """A fixed-width table standing in for a materialized result.

    Only widths matter: every row of column i occupies col_widths[i] bytes,
    plus a 4-byte length prefix when the column is variable-length.
    """

    row_count: int
    col_widths: tuple[int, ...]
    varlen: tuple[bool, ...] = ()
    sort_key: int | None = None
    seed: int = 0

    def __post_init__(self) -> None:
        if self.row_count < 0:
            raise ValueError("row_count must be >= 0")
        if not self.col_widths:
            raise ValueError("need at least one column")
        if any(w <= 0 for w in self.col_widths):
            raise ValueError("column widths must be > 0")
        if not self.varlen:
            object.__setattr__(self, "varlen", (False,) * len(self.col_widths))
        if len(self.varlen) != len(self.col_widths):
            raise ValueError("varlen flags must match column count")
        if self.sort_key is not None and not 0 <= self.sort_key < len(self.col_widths):
            raise ValueError("sort_key out of range")

    @property
    def col_count(self) -> int:
        return len(self.col_widths)

    @property
    def effective_widths(self) -> tuple[int, ...]:
        return tuple(w + (VARLEN_OVERHEAD if v else 0)
                     for w, v in zip(self.col_widths, self.varlen))

    @property
    def row_bytes(self) -> int:
        return sum(self.effective_widths)

    def to_stats(self) -> DataStats:
        """The statistics the advisor would collect for this table."""
        return DataStats(
            row_count=self.row_count,
            avg_row_size=float(sum(self.col_widths)),
            avg_col_size=fmean(self.col_widths),
            col_count=self.col_count,
            varlen_col_count=sum(self.varlen),
        )


@dataclass(frozen=True)
class GroupLayout:
    """One row group in a hybrid reference file."""

    offset: int
    length: int
    rows: int
    column_extents: tuple[tuple[int, int], ...]
    pages: int


@dataclass(frozen=True)
class ReferenceFile:
    """Exact byte accounting of one written table."""

    format: str
    sections: SizeBreakdown
    sync_units: int = 0
    row_groups: int = 0
    pages: int = 0
    column_extents: tuple[tuple[int, int], ...] = ()
    groups: tuple[GroupLayout, ...] = ()

    @property
    def total(self) -> int:
        return int(self.sections.total)

    @property
    def header_extent(self) -> tuple[int, int]:
        return (0, int(self.sections.header))

    @property
    def footer_extent(self) -> tuple[int, int]:
        return (self.total - int(self.sections.footer), int(self.sections.footer))


def _rows_per_boundary(unit_bytes: int, boundary: float) -> int:
    """Rows written before a counter that resets at `boundary` bytes fires."""
    return max(1, math.ceil(boundary / unit_bytes)) if unit_bytes > 0 else 1


def _write_seqfile(table: SyntheticTable, fd: FormatDescriptor) -> ReferenceFile:
    header = int(fd["header"])
    separators = max(table.col_count - 2, 0)
    row = (int(fd["record_length"]) + int(fd["key_length"])
           + table.row_bytes + int(fd["col_separator"]) * separators)
    # a marker goes in after every run of rows whose bytes reach sync_block
    per_marker = _rows_per_boundary(row, fd["sync_block"])
    markers = table.row_count // per_marker
    body = row * table.row_count + markers * int(fd["sync_marker"])
    return ReferenceFile(
        format="seqfile",
        sections=SizeBreakdown(header=header, body=body, footer=int(fd["footer"])),
        sync_units=markers,
    )


def _write_avro(table: SyntheticTable, fd: FormatDescriptor) -> ReferenceFile:
    header = (int(fd["version"]) + table.col_count * int(fd["col_schema"])
              + int(fd["codec"]) + int(fd["sync_marker"]))
    row = table.row_bytes + int(fd["row_meta"])
    per_block = _rows_per_boundary(row, fd["block"])
    # every started block is closed with block metadata plus a sync marker
    blocks = math.ceil(table.row_count / per_block)
    body = row * table.row_count + blocks * (int(fd["block_meta"]) + int(fd["sync_marker"]))
    return ReferenceFile(
        format="avro",
        sections=SizeBreakdown(header=header, body=body, footer=int(fd["footer"])),
        sync_units=blocks,
    )


def _write_parquet(table: SyntheticTable, fd: FormatDescriptor) -> ReferenceFile:
    header = int(fd["header"])
    page_size = int(fd["page"])
    sync = int(fd["sync_marker"])
    per_page_meta = int(fd["definition_level"]) + int(fd["repetition_level"])
    group_meta = int(fd["row_counter"]) + sync
    rows_pg = _rows_per_boundary(table.row_bytes, fd["row_group"])

    groups: list[GroupLayout] = []
    offset = header
    stats_bytes = 0
    total_pages = 0
    remaining = table.row_count
    while remaining > 0:
        rows = min(rows_pg, remaining)
        col_extents = []
        col_off = offset
        group_pages = 0
        for width in table.effective_widths:
            data = width * rows
            pages = math.ceil(data / page_size)
            length = data + per_page_meta * pages + sync
            col_extents.append((col_off, length))
            col_off += length
            group_pages += pages
        length = (col_off - offset) + group_meta
        groups.append(GroupLayout(offset=offset, length=length, rows=rows,
                                  column_extents=tuple(col_extents),
                                  pages=group_pages))
        stats_bytes += int(fd["col_stats_meta"]) * (1 + group_pages)
        total_pages += group_pages
        offset += length
        remaining -= rows

    body = offset - header
    footer = (int(fd["version"]) + int(fd["col_schema"]) * table.col_count
              + int(fd["magic"]) + int(fd["footer_length"]) + stats_bytes)
    return ReferenceFile(
        format="parquet",
        sections=SizeBreakdown(header=header, body=body, footer=footer),
        row_groups=len(groups),
        pages=total_pages,
        groups=tuple(groups),
    )


def _write_vertical(table: SyntheticTable, fd: FormatDescriptor) -> ReferenceFile:
    header = int(fd["header"])
    sep = int(fd["col_separator"])
    extents = []
    offset = header
    for width in table.effective_widths:
        length = width * table.row_count + sep
        extents.append((offset, length))
        offset += length
    return ReferenceFile(
        format="vertical",
        sections=SizeBreakdown(header=header, body=offset - header,
                               footer=int(fd["footer"])),
        column_extents=tuple(extents),
    )


_WRITERS = {
    "seqfile": _write_seqfile,
    "avro": _write_avro,
    "parquet": _write_parquet,
    "vertical": _write_vertical,
}


def write_reference_file(table: SyntheticTable, fd: FormatDescriptor,
                         path: str | None = None) -> ReferenceFile:
    """Account (and optionally emit) the byte stream of `table` in format `fd`.

    With `path` the structural stream is written out with placeholder
    payloads and its length asserted against the accounting; intended for
    inspection of small tables, the emission loops over rows.
    """
    try:
        writer = _WRITERS[fd.name]
    except KeyError:
        raise UnknownFormatError(f"no reference writer for format {fd.name!r}") from None
    ref = writer(table, fd)
    if path is not None:
        _dump(table, fd, ref, path)
    return ref


def _dump(table: SyntheticTable, fd: FormatDescriptor, ref: ReferenceFile,
          path: str) -> None:
    rng = np.random.default_rng(table.seed)
    marker = rng.integers(0, 256, 16, dtype=np.uint8).tobytes()
    written = 0

    with open(path, "wb") as out:
        def put(n: int, tag: bytes = b"\x00") -> None:
            nonlocal written
            out.write(tag * n if tag != b"\x00" else bytes(n))
            written += n

        put(int(ref.sections.header), b"H")
        if fd.name == "seqfile":
            row = (int(fd["record_length"]) + int(fd["key_length"]) + table.row_bytes
                   + int(fd["col_separator"]) * max(table.col_count - 2, 0))
            since = 0
            for _ in range(table.row_count):
                put(row)
                since += row
                if since >= fd["sync_block"]:
                    out.write(marker)
                    written += len(marker)
                    since = 0
        elif fd.name == "avro":
            row = table.row_bytes + int(fd["row_meta"])
            since = 0
            started = False
            for _ in range(table.row_count):
                put(row)
                since += row
                started = True
                if since >= fd["block"]:
                    put(int(fd["block_meta"]), b"B")
                    out.write(marker)
                    written += len(marker)
                    since = 0
                    started = False
            if started:
                put(int(fd["block_meta"]), b"B")
                out.write(marker)
                written += len(marker)
        elif fd.name == "parquet":
            page_size = int(fd["page"])
            per_page_meta = int(fd["definition_level"]) + int(fd["repetition_level"])
            for group in ref.groups:
                for width in table.effective_widths:
                    data = width * group.rows
                    put(data + per_page_meta * math.ceil(data / page_size))
                    out.write(marker)
                    written += len(marker)
                put(int(fd["row_counter"]), b"R")
                out.write(marker)
                written += len(marker)
        elif fd.name == "vertical":
            for width in table.effective_widths:
                put(width * table.row_count)
                put(int(fd["col_separator"]), b"S")
        put(int(ref.sections.footer), b"F")

    if written != ref.total:
        raise AssertionError(f"emitted {written} bytes, accounted {ref.total}")


# --- row-group hit Monte Carlo ------------------------------------------------

def monte_carlo_rg_hit(rows_per_group: int, group_count: int, selectivity: float,
                       trials: int, seed: int = 0) -> float:
    """Simulated P(row group touched) for a selection with the given SF.

    Each trial places round(SF * N) matching rows uniformly without
    replacement over N = rows_per_group * group_count rows and counts the
    fraction of groups holding at least one match.  Sampling walks the
    groups with conditional hypergeometric draws, which is the exact
    placement distribution.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if rows_per_group < 0 or group_count < 1:
        raise ValueError("need rows_per_group >= 0 and group_count >= 1")
    if not 0.0 <= selectivity <= 1.0:
        raise ValueError("selectivity must be in [0, 1]")
    total = rows_per_group * group_count
    matches = round(selectivity * total)
    if total == 0 or matches == 0:
        return 0.0
    if matches == total:
        return 1.0

    rng = np.random.default_rng(seed)
    good = np.full(trials, matches, dtype=np.int64)
    remaining = total
    hit = np.zeros(trials, dtype=np.int64)
    for _ in range(group_count):
        draws = rng.hypergeometric(good, remaining - good, rows_per_group)
        hit += draws > 0
        good -= draws
        remaining -= rows_per_group
    return float(np.mean(hit / group_count))


def _sample_hit_mask(rng: np.random.Generator, group_rows: Sequence[int],
                     matches: int) -> list[bool]:
    """One uniform placement of `matches` rows; True per group with a hit."""
    remaining = sum(group_rows)
    good = matches
    mask = []
    for rows in group_rows:
        if good <= 0 or remaining <= 0:
            mask.append(False)
            continue
        draw = int(rng.hypergeometric(good, remaining - good, rows))
        mask.append(draw > 0)
        good -= draw
        remaining -= rows
    return mask


# --- replay simulator ---------------------------------------------------------

Locality = Literal["local", "remote", "stochastic"]


@dataclass(frozen=True)
class Extent:
    offset: int
    length: int
    locality: Locality = "stochastic"

    def __post_init__(self) -> None:
        if self.offset < 0:
            raise ValueError("offset must be >= 0")
        if self.length <= 0:
            raise ValueError("length must be > 0")


@dataclass(frozen=True)
class AccessPlan:
    extents: tuple[Extent, ...]
    mode: Literal["read", "write"] = "read"

    @classmethod
    def build(cls, extents: Iterable[tuple[int, int] | Extent],
              mode: Literal["read", "write"] = "read",
              locality: Locality = "stochastic") -> "AccessPlan":
        out = []
        for e in extents:
            if not isinstance(e, Extent):
                e = Extent(offset=int(e[0]), length=int(e[1]), locality=locality)
            out.append(e)
        return cls(extents=tuple(out), mode=mode)


def replay_io(plan: AccessPlan, sys: SystemProfile, seed: int = 0) -> float:
    """Seconds to execute the plan: one seek per touched chunk, transfer at
    disk bandwidth, network transfer for remote chunks (probability 1 - p
    for stochastic ones) and (R - 1) sequential copies for writes.

    Locality is drawn once per absolute chunk index from the seed, so two
    plans replayed under the same seed see the same cluster placement --
    paired comparisons across formats are not washed out by luck.
    """
    if not plan.extents:
        return 0.0
    chunk = sys.chunk_size
    last_chunk = max(int((e.offset + e.length - 1) // chunk) for e in plan.extents)
    rng = np.random.default_rng(seed)
    local = rng.random(last_chunk + 1) < sys.locality_probability

    seconds = 0.0
    for e in plan.extents:
        first = int(e.offset // chunk)
        last = int((e.offset + e.length - 1) // chunk)
        for ci in range(first, last + 1):
            lo = max(e.offset, ci * chunk)
            hi = min(e.offset + e.length, (ci + 1) * chunk)
            nbytes = hi - lo
            seconds += sys.seek_overhead + nbytes / sys.disk_bandwidth
            if plan.mode == "write":
                seconds += (sys.replication_factor - 1) * nbytes / sys.network_bandwidth
            elif e.locality == "remote" or (e.locality == "stochastic" and not local[ci]):
                seconds += nbytes / sys.network_bandwidth
    return seconds


def _meta_extents(ref: ReferenceFile, sys: SystemProfile) -> list[tuple[int, int]]:
    """Header/footer re-read extents, one set per task (= per chunk)."""
    tasks = max(1, math.ceil(ref.total / sys.chunk_size))
    out = []
    for _ in range(tasks):
        if ref.sections.header > 0:
            out.append(ref.header_extent)
        if ref.sections.footer > 0:
            out.append(ref.footer_extent)
    return out


def _scan_extents(ref: ReferenceFile) -> list[tuple[int, int]]:
    return [(0, ref.total)] if ref.total > 0 else []


def build_access_plan(op: OperationProfile, table: SyntheticTable,
                      fd: FormatDescriptor, sys: SystemProfile,
                      seed: int = 0) -> AccessPlan:
    """The extents a reader of this layout fetches for the operation.

    Scans (and any operation a horizontal layout serves) read the whole
    file.  Vertical projections fetch each referenced column as its own
    extent, columns picked evenly spread so the per-column seeks are real.
    Hybrid projections fetch the leading ref_cols column chunks of every
    group, which are contiguous and read as one run per group.  Hybrid
    selections fetch the groups that actually contain matches, decided by
    placing the matching rows of the synthetic table, not by the analytic
    hit probability.  Every task re-reads header and footer.
    """
    ref = write_reference_file(table, fd)
    if ref.total == 0:
        return AccessPlan(extents=())

    extents: list[tuple[int, int]]
    if op.kind == "scan" or fd.kind == HORIZONTAL or (fd.kind == VERTICAL
                                                      and op.kind == "select"):
        extents = _scan_extents(ref)
    elif fd.kind == VERTICAL:
        if op.ref_cols > table.col_count:
            raise ValueError("ref_cols exceeds column count")
        idx = sorted({round(i * (table.col_count - 1) / max(op.ref_cols - 1, 1))
                      for i in range(op.ref_cols)})
        extents = [ref.column_extents[i] for i in idx]
    elif op.kind == "project":
        if op.ref_cols > table.col_count:
            raise ValueError("ref_cols exceeds column count")
        extents = []
        for group in ref.groups:
            chunks = group.column_extents[:op.ref_cols]
            extents.append((chunks[0][0], sum(length for _, length in chunks)))
            last_off, last_len = group.column_extents[-1]
            meta_start = last_off + last_len  # group metadata trails the chunks
            extents.append((meta_start, group.offset + group.length - meta_start))
    else:  # hybrid select
        mask = select_hit_mask(table, fd, op, seed)
        extents = [(g.offset, g.length) for g, hit in zip(ref.groups, mask) if hit]

    extents += _meta_extents(ref, sys)
    return AccessPlan.build(extents)


def select_hit_mask(table: SyntheticTable, fd: FormatDescriptor,
                    op: OperationProfile, seed: int = 0) -> list[bool]:
    """Which row groups a selection touches, from actual placement."""
    ref = write_reference_file(table, fd)
    group_rows = [g.rows for g in ref.groups]
    matches = round(op.selectivity * table.row_count)
    if matches == 0:
        return [False] * len(group_rows)
    if op.sorted:
        # one-sided range predicate on the sort column: the matching rows
        # are a prefix of the file, so the touched groups are the leading
        # ones covering `matches` rows
        mask = []
        first = 0
        for rows in group_rows:
            mask.append(first < matches)
            first += rows
        return mask
    rng = np.random.default_rng(seed)
    return _sample_hit_mask(rng, group_rows, matches)


def simulate_operation(op: OperationProfile, table: SyntheticTable,
                       fd: FormatDescriptor, sys: SystemProfile,
                       seed: int = 0) -> float:
    """Replay the access plan the layout implies; returns seconds."""
    plan = build_access_plan(op, table, fd, sys, seed)
    return replay_io(plan, sys, seed)


def simulate_select_bytes(table: SyntheticTable, fd: FormatDescriptor,
                          selectivity: float, sorted: bool,
                          trials: int, seed: int = 0) -> float:
    """Average bytes a selection reads, over `trials` placements of the
    matching rows; the ground truth for selection-size validation."""
    ref = write_reference_file(table, fd)
    op = OperationProfile.select(selectivity, sorted=sorted)
    fixed = ref.sections.header + ref.sections.footer
    total = 0.0
    for t in range(trials):
        mask = select_hit_mask(table, fd, op, seed + t)
        total += fixed + sum(g.length for g, hit in zip(ref.groups, mask) if hit)
    return total / trials
