"""Concrete format section calculators and the geometry mapping."""

import math

import pytest

from formatadvisor.formats import (
    AVRO,
    PARQUET,
    SEQFILE,
    UnknownFormatError,
    as_geometry,
    avro_sections,
    get_format,
    parquet_pages_per_group,
    parquet_row_groups,
    parquet_sections,
    sections,
    seqfile_row_size,
    seqfile_sections,
    synthetic_vertical,
)
from formatadvisor.layouts import DataStats, total_layout_size
from formatadvisor.oracle import SyntheticTable, write_reference_file


def stats(rows, col, cols, varlen=0, row=None):
    return DataStats(row_count=rows, avg_row_size=row if row is not None else col * cols,
                     avg_col_size=col, col_count=cols, varlen_col_count=varlen)


class TestSeqFile:
    def test_row_size(self):
        assert seqfile_row_size(stats(40, 10.0, 4)) == 50  # 4+4+40+2 separators

    def test_sections(self):
        got = seqfile_sections(stats(40, 10.0, 4))
        assert (got.header, got.body, got.footer) == (30, 2016, 0)
        assert got.total == 2046

    def test_empty(self):
        got = seqfile_sections(stats(0, 10.0, 4))
        assert got.body == 0 and got.total == 30

    def test_sync_marker_interval(self):
        # 40 rows of 50 B hit the 2000-byte sync block exactly once
        got = seqfile_sections(stats(40, 10.0, 4))
        assert got.body == 40 * 50 + 16

    def test_separator_clamp(self):
        with pytest.warns(UserWarning):
            row = seqfile_row_size(stats(10, 10.0, 1))
        assert row == 4 + 4 + 10  # no negative separators

    def test_linear_between_sync_boundaries(self):
        # both row counts produce the same marker count: exact linearity
        a = seqfile_sections(stats(79, 10.0, 4)).total
        b = seqfile_sections(stats(77, 10.0, 4)).total
        assert a - b == 2 * 50


class TestAvro:
    def test_header(self):
        assert avro_sections(stats(0, 8.0, 10)).header == 325

    def test_empty(self):
        got = avro_sections(stats(0, 8.0, 10))
        assert got.body == 0 and got.total == 325

    def test_block_metadata(self):
        got = avro_sections(stats(40, 9.2, 10, row=92.0))
        assert got.body == 40 * 100 + 24  # one 4000-byte block unit

    def test_larger_for_seqfile_beyond_two_columns(self):
        for cols in (3, 8, 20):
            s = stats(100_000, 10.0, cols)
            assert seqfile_sections(s).total > avro_sections(s).total
        # at two columns the per-row overheads tie (8 bytes each)
        two = stats(1, 10.0, 2)
        assert seqfile_row_size(two) - two.row_size == AVRO["row_meta"]


class TestParquet:
    def test_row_groups_and_footer_stats(self):
        s = stats(1_000_000, 8.0, 16)
        groups = parquet_row_groups(s)
        assert groups == pytest.approx(1.000002)
        pages = parquet_pages_per_group(s)
        got = parquet_sections(s)
        schema = 4 + 30 * 16 + 4 + 4
        assert got.footer == pytest.approx(schema + 2 * 40 * (1 + pages))
        assert got.header == 4

    def test_empty(self):
        got = parquet_sections(stats(0, 8.0, 16))
        assert got.body == 0
        assert got.total == 4 + (4 + 30 * 16 + 4 + 4)

    def test_footer_linear_in_cols(self):
        deltas = []
        for cols in (8, 16, 24):
            s = DataStats(row_count=1000, avg_row_size=8.0 * cols,
                          avg_col_size=8.0, col_count=cols)
            deltas.append(parquet_sections(s).footer)
        # same single row group; footer grows by schema+stats per column
        assert deltas[1] - deltas[0] == pytest.approx(deltas[2] - deltas[1], rel=1e-6)

    def test_footer_stats_scale_with_started_groups(self):
        one = stats(1_000_000, 8.0, 16)    # just over one row group
        three = stats(2_900_000, 8.0, 16)  # just under three
        schema = 4 + 30 * 16 + 4 + 4
        s1 = parquet_sections(one).footer - schema
        s3 = parquet_sections(three).footer - schema
        assert math.ceil(parquet_row_groups(one)) == 2
        assert math.ceil(parquet_row_groups(three)) == 3
        assert s3 / s1 == pytest.approx(3 / 2, rel=1e-3)

    def test_small_table_against_writer(self):
        table = SyntheticTable(row_count=50_000, col_widths=(12,) * 10)
        est = parquet_sections(table.to_stats()).total
        act = write_reference_file(table, PARQUET).total
        assert abs(est - act) / act <= 0.05


class TestDispatchAndOverrides:
    def test_sections_dispatch(self):
        s = stats(10, 8.0, 4)
        assert sections(s, SEQFILE) == seqfile_sections(s)
        with pytest.raises(UnknownFormatError):
            get_format("orc")

    def test_overrides(self):
        fat = AVRO.with_overrides({"col_schema": 64})
        assert avro_sections(stats(0, 8.0, 10), fat).header == 5 + 640 + 4 + 16
        with pytest.raises(KeyError):
            AVRO.with_overrides({"no_such_knob": 1})

    def test_negative_constant_rejected(self):
        with pytest.raises(ValueError):
            AVRO.with_overrides({"codec": -1})


class TestGeometryMapping:
    def test_kinds_and_fixed_fields(self):
        s = stats(1000, 8.0, 10)
        g_seq = as_geometry(SEQFILE, s)
        assert g_seq.kind == "horizontal" and g_seq.footer_size == 0
        g_avro = as_geometry(AVRO, s)
        assert g_avro.row_meta == 8
        g_parq = as_geometry(PARQUET, s)
        assert g_parq.kind == "hybrid" and g_parq.rowgroup_size == 1.28e8
        assert g_parq.hybrid_col_meta == 16 and g_parq.rowgroup_meta == 24

    @pytest.mark.parametrize("fd", [SEQFILE, AVRO])
    def test_horizontal_geometry_total_matches_sections(self, fd):
        # exact whenever row_size == col_size * col_count
        for rows in (0, 40, 12_345, 1_000_000):
            s = stats(rows, 11.0, 7)
            est = sections(s, fd).total
            via_geo = total_layout_size(s, as_geometry(fd, s)).total
            assert via_geo == pytest.approx(est, rel=1e-12)

    def test_parquet_geometry_total_close_to_sections(self):
        # the generic hybrid body charges per-column metadata once per file
        # where the format body spreads it per fractional group; the gap is
        # a few hundred bytes and fades as files grow
        for rows, tol in ((1000, 5e-3), (100_000, 1e-4), (5_000_000, 1e-5)):
            s = stats(rows, 8.0, 16)
            est = sections(s, PARQUET).total
            via_geo = total_layout_size(s, as_geometry(PARQUET, s)).total
            assert via_geo == pytest.approx(est, rel=tol)

    def test_vertical_geometry(self):
        fd = synthetic_vertical(header=32, footer=16, col_separator=8)
        s = stats(1000, 8.0, 5)
        geo = as_geometry(fd, s)
        assert geo.kind == "vertical" and geo.vcol_meta == 8
        assert total_layout_size(s, geo).total == 32 + (8000 + 8) * 5 + 16

    def test_writer_agreement_within_band(self):
        table = SyntheticTable(row_count=200_000, col_widths=(6, 8, 8, 12, 20, 30),
                               varlen=(False, False, True, False, False, True))
        s = table.to_stats()
        for fd in (SEQFILE, AVRO, PARQUET):
            est = sections(s, fd).total
            act = write_reference_file(table, fd).total
            assert abs(est - act) / act <= 0.05
