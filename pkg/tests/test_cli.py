"""CLI surface: verbs, exit codes, output modes."""

import json

import pytest

from formatadvisor import fixtures
from formatadvisor.cli import main
from formatadvisor.workflow import StatsCatalog


@pytest.fixture()
def fixture_files(tmp_path):
    wf_path = tmp_path / "wf.json"
    cat_path = tmp_path / "cat.json"
    wf_path.write_text(json.dumps(fixtures.nine_node_workflow_document()))
    fixtures.nine_node_catalog().save(cat_path)
    return str(wf_path), str(cat_path)


def run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


class TestEstimateSize:
    def test_seqfile_oracle_match(self, capsys):
        code, out, _ = run(capsys, ["estimate-size", "--format", "seqfile",
                                    "--rows", "40", "--cols", "4",
                                    "--col-size", "10", "--oracle"])
        assert code == 0
        assert "total: 2046" in out
        assert "error 0%" in out

    def test_avro_empty(self, capsys):
        code, out, _ = run(capsys, ["estimate-size", "--format", "avro",
                                    "--rows", "0", "--cols", "10",
                                    "--col-size", "8"])
        assert code == 0 and "total: 325" in out

    def test_unknown_format_exit_3(self, capsys):
        code, _, err = run(capsys, ["estimate-size", "--format", "orc",
                                    "--rows", "1", "--cols", "1", "--col-size", "1"])
        assert code == 3 and "unknown format" in err

    def test_invalid_stats_exit_2(self, capsys):
        code, _, _ = run(capsys, ["estimate-size", "--format", "avro",
                                  "--rows", "-5", "--cols", "4", "--col-size", "8"])
        assert code == 2

    def test_json_mode_full_precision(self, capsys):
        code, out, _ = run(capsys, ["estimate-size", "--format", "parquet",
                                    "--rows", "1000000", "--cols", "16",
                                    "--col-size", "8", "--output", "json"])
        assert code == 0
        doc = json.loads(out)
        assert doc["estimated"]["header"] == 4

    def test_text_and_json_values_agree(self, capsys):
        args = ["estimate-size", "--format", "seqfile", "--rows", "40",
                "--cols", "4", "--col-size", "10"]
        _, text, _ = run(capsys, args)
        _, machine, _ = run(capsys, args + ["--output", "json"])
        total = json.loads(machine)["estimated"]["total"]
        assert f"total: {total:.6g}" in text


class TestChoose:
    def test_cost_column(self, capsys, fixture_files):
        wf, cat = fixture_files
        code, out, _ = run(capsys, ["choose", "--workflow", wf, "--catalog", cat,
                                    "--output", "json"])
        assert code == 0
        doc = json.loads(out)
        got = {d["node"]: d["format"] for d in doc["decisions"]}
        assert got == fixtures.EXPECTED_COST_CHOICE
        assert all(d["decided_by"] == "cost" for d in doc["decisions"])

    def test_rule_column_without_catalog(self, capsys, fixture_files):
        wf, _ = fixture_files
        code, out, _ = run(capsys, ["choose", "--workflow", wf, "--output", "json"])
        assert code == 0
        doc = json.loads(out)
        got = {d["node"]: d["format"] for d in doc["decisions"]}
        assert got == fixtures.EXPECTED_RULE_CHOICE
        assert all(d["decided_by"] == "rule" for d in doc["decisions"])

    def test_forced_rule_selection_ignores_stats(self, capsys, fixture_files):
        wf, cat = fixture_files
        code, out, _ = run(capsys, ["choose", "--workflow", wf, "--catalog", cat,
                                    "--selection", "rule", "--output", "json"])
        assert code == 0
        doc = json.loads(out)
        assert all(d["decided_by"] == "rule" for d in doc["decisions"])
        got = {d["node"]: d["format"] for d in doc["decisions"]}
        assert got == fixtures.EXPECTED_RULE_CHOICE  # stats present but unused

    def test_candidate_restriction(self, capsys, fixture_files):
        wf, cat = fixture_files
        code, out, _ = run(capsys, ["choose", "--workflow", wf, "--catalog", cat,
                                    "--candidates", "seqfile,avro",
                                    "--output", "json"])
        assert code == 0
        doc = json.loads(out)
        assert {d["format"] for d in doc["decisions"]} <= {"seqfile", "avro"}

    def test_restore_modes(self, capsys, fixture_files):
        wf, _ = fixture_files
        _, out, _ = run(capsys, ["choose", "--workflow", wf,
                                 "--restore", "aggressive", "--output", "json"])
        doc = json.loads(out)
        assert len(doc["selected"]) == 6

    def test_forced_cost_without_stats_exit_2(self, capsys, fixture_files):
        wf, _ = fixture_files
        code, _, err = run(capsys, ["choose", "--workflow", wf,
                                    "--selection", "cost"])
        assert code == 2 and "complete statistics" in err

    def test_bad_workflow_exit_2(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{ nope")
        code, _, _ = run(capsys, ["choose", "--workflow", str(bad)])
        assert code == 2

    def test_corrupt_catalog_exit_4(self, capsys, fixture_files, tmp_path):
        wf, _ = fixture_files
        bad = tmp_path / "bad_cat.json"
        bad.write_text(json.dumps({"schema_version": 42}))
        code, _, _ = run(capsys, ["choose", "--workflow", wf, "--catalog", str(bad)])
        assert code == 4

    def test_record_updates_catalog(self, capsys, fixture_files, tmp_path):
        wf, cat = fixture_files
        out_cat = tmp_path / "updated.json"
        before = StatsCatalog.load(cat)
        code, _, _ = run(capsys, ["choose", "--workflow", wf, "--catalog", cat,
                                  "--record", "--catalog-out", str(out_cat)])
        assert code == 0
        after = StatsCatalog.load(out_cat)
        assert after.version == before.version + 9
        assert len(after.entries) == 9


class TestValidate:
    ARGS = ["validate", "--seed", "3", "--trials", "2000", "--configs", "12"]

    def test_quick_run_passes(self, capsys):
        code, out, _ = run(capsys, self.ARGS)
        assert code == 0
        assert "PASS overall" in out

    def test_machine_output_deterministic(self, capsys):
        _, a, _ = run(capsys, self.ARGS + ["--output", "json"])
        _, b, _ = run(capsys, self.ARGS + ["--output", "json"])
        assert a == b
        _, c, _ = run(capsys, self.ARGS + ["--output", "csv"])
        _, d, _ = run(capsys, self.ARGS + ["--output", "csv"])
        assert c == d

    def test_report_file(self, capsys, tmp_path):
        path = tmp_path / "report.json"
        code, out, _ = run(capsys, self.ARGS + ["--output", "json",
                                                "--report", str(path)])
        assert code == 0
        assert json.loads(path.read_text())["passed"] is True

    def test_tolerance_failure_exits_1(self, capsys, monkeypatch):
        from formatadvisor import validation

        def failing(seed, tolerance=5.0):
            suite = validation.SuiteResult(name="size", tolerance=tolerance,
                                           metric="pct")
            suite.add("forced", 2.0, 1.0, 100.0, False)
            return suite

        monkeypatch.setattr(validation, "size_suite", failing)
        code, out, _ = run(capsys, self.ARGS)
        assert code == 1
        assert "FAIL" in out


class TestCrossover:
    def test_bundled_stats_single_crossover(self, capsys):
        code, out, _ = run(capsys, ["crossover", "--output", "json"])
        assert code == 0
        doc = json.loads(out)
        assert len(doc["crossings"]) == 1
        assert 0.0 < doc["crossover_fraction"] < 1.0
        last = doc["points"][-1]
        assert last["fraction"] == 1.0
        assert min(last["avro"], last["seqfile"]) <= last["parquet"]
        first = doc["points"][0]
        assert first["parquet"] < min(first["avro"], first["seqfile"])

    def test_csv_mode(self, capsys):
        code, out, _ = run(capsys, ["crossover", "--output", "csv"])
        assert code == 0
        header = out.splitlines()[0]
        assert header.startswith("ref_cols,fraction")


class TestCatalogCmd:
    def test_init_and_inspect(self, capsys, tmp_path):
        path = tmp_path / "cat.json"
        code, _, _ = run(capsys, ["catalog", "init", str(path)])
        assert code == 0
        code, out, _ = run(capsys, ["catalog", "inspect", str(path)])
        assert code == 0 and "0 entries" in out

    def test_inspect_corrupt_exit_4(self, capsys, tmp_path):
        path = tmp_path / "cat.json"
        path.write_text("[]")
        code, _, _ = run(capsys, ["catalog", "inspect", str(path)])
        assert code == 4

    def test_copy_roundtrip(self, capsys, tmp_path):
        src = tmp_path / "a.json"
        dst = tmp_path / "b.json"
        fixtures.nine_node_catalog().save(src)
        code, _, _ = run(capsys, ["catalog", "copy", str(src), str(dst)])
        assert code == 0
        assert StatsCatalog.load(dst) == StatsCatalog.load(src)


class TestConfig:
    def test_profile_from_config(self, capsys, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"system": {"seek_time": 0.0}}))
        code, out, _ = run(capsys, ["estimate-size", "--format", "avro",
                                    "--rows", "0", "--cols", "10",
                                    "--col-size", "8", "--config", str(cfg)])
        assert code == 0

    def test_format_override_via_config(self, capsys, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"formats": {"avro": {"col_schema": 60}}}))
        code, out, _ = run(capsys, ["estimate-size", "--format", "avro",
                                    "--rows", "0", "--cols", "10",
                                    "--col-size", "8", "--config", str(cfg),
                                    "--output", "json"])
        assert code == 0
        assert json.loads(out)["estimated"]["total"] == 5 + 600 + 4 + 16

    def test_env_var_profile(self, capsys, tmp_path, monkeypatch):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"system": {"chunk_size": 6.4e7}}))
        monkeypatch.setenv("FORMATADVISOR_PROFILE", str(cfg))
        code, _, _ = run(capsys, ["estimate-size", "--format", "avro",
                                  "--rows", "0", "--cols", "10", "--col-size", "8"])
        assert code == 0

    def test_set_overrides(self, capsys):
        code, _, _ = run(capsys, ["estimate-size", "--format", "avro",
                                  "--rows", "0", "--cols", "10", "--col-size", "8",
                                  "--set", "seek_time=0.01"])
        assert code == 0
        code, _, _ = run(capsys, ["estimate-size", "--format", "avro",
                                  "--rows", "0", "--cols", "10", "--col-size", "8",
                                  "--set", "bogus_field=1"])
        assert code == 2


class TestFixturesCmd:
    def test_writes_documents(self, capsys, tmp_path):
        out_dir = tmp_path / "fx"
        code, _, _ = run(capsys, ["fixtures", str(out_dir)])
        assert code == 0
        assert (out_dir / "nine_node_workflow.json").exists()
        assert (out_dir / "nine_node_catalog.json").exists()
        assert (out_dir / "crossover_stats.json").exists()
