"""Command-line interface.

Verbs: estimate-size, choose, validate, crossover, catalog, fixtures.
Exit codes: 0 success, 1 validation failure, 2 input error, 3 unknown
entity, 4 catalog version mismatch.  Machine-readable output (json/csv) is
byte-identical across runs for the same arguments and seed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys as _sys
from dataclasses import asdict, fields
from pathlib import Path

from . import fixtures, validation
from .formats import (
    FormatDescriptor,
    UnknownFormatError,
    as_geometry,
    get_format,
    sections,
)
from .layouts import DataStats, OperationProfile, read_cost
from .oracle import SyntheticTable, write_reference_file
from .selector import FormatChoice, choose_format, explain, rule_based_choice
from .system import SystemProfile
from .workflow import (
    CatalogSchemaError,
    NodeStats,
    StatsCatalog,
    WorkflowParseError,
    fingerprint,
    outgoing_operations,
    parse_workflow,
    select_materialization_nodes,
)

PROFILE_ENV = "FORMATADVISOR_PROFILE"

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_INPUT = 2
EXIT_UNKNOWN = 3
EXIT_VERSION = 4


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _load_config_document(path: str) -> dict:
    text = Path(path).read_text()
    if path.endswith(".toml"):
        try:
            import tomllib
        except ImportError as exc:  # python 3.10
            raise CliError(EXIT_INPUT, "toml config needs python >= 3.11") from exc
        return tomllib.loads(text)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise CliError(EXIT_INPUT, f"bad config {path}: {exc}") from exc


def _build_profile(args) -> SystemProfile:
    """Profile from the config document plus --set overrides on top."""
    config_path = getattr(args, "config", None) or os.environ.get(PROFILE_ENV)
    doc = _load_config_document(config_path) if config_path else {}
    values = dict(doc.get("system", {}))
    profile_fields = {f.name: f.type for f in fields(SystemProfile)}
    for item in getattr(args, "set", None) or []:
        if "=" not in item:
            raise CliError(EXIT_INPUT, f"--set wants key=value, got {item!r}")
        key, raw = item.split("=", 1)
        values[key.strip()] = raw.strip()
    kwargs = {}
    for key, raw in values.items():
        if key not in profile_fields:
            raise CliError(EXIT_INPUT, f"unknown system profile field {key!r}")
        if key == "replication_factor":
            kwargs[key] = int(float(raw))
        elif key == "charge_rotation":
            kwargs[key] = str(raw).lower() in ("1", "true", "yes")
        else:
            kwargs[key] = float(raw)
    try:
        profile = SystemProfile(**kwargs)
    except ValueError as exc:
        raise CliError(EXIT_INPUT, f"invalid system profile: {exc}") from exc
    setattr(args, "_config_doc", doc)
    return profile


def _candidate_formats(args) -> list[FormatDescriptor]:
    doc = getattr(args, "_config_doc", {})
    overrides = doc.get("formats", {})
    names = [n.strip() for n in (args.candidates or "seqfile,avro,parquet").split(",") if n.strip()]
    out = []
    for name in names:
        try:
            fd = get_format(name)
        except UnknownFormatError as exc:
            raise CliError(EXIT_UNKNOWN, str(exc)) from exc
        if name in overrides:
            try:
                fd = fd.with_overrides(overrides[name])
            except KeyError as exc:
                raise CliError(EXIT_INPUT, f"bad format override: {exc}") from exc
        out.append(fd)
    return out


def _emit(args, text_lines: list[str], report: dict, csv_rows: list[list]) -> None:
    if args.output == "json":
        payload = json.dumps(report, sort_keys=True)
    elif args.output == "csv":
        buf = io.StringIO()
        csv.writer(buf, lineterminator="\n").writerows(csv_rows)
        payload = buf.getvalue().rstrip("\n")
    else:
        payload = "\n".join(text_lines)
    if getattr(args, "report", None):
        Path(args.report).write_text(payload + "\n")
    print(payload)


def _g(x) -> str:
    """Text-mode numbers at 6 significant digits."""
    if isinstance(x, float):
        return f"{x:.6g}"
    return str(x)


# --- estimate-size ------------------------------------------------------------

def _stats_from_args(args) -> DataStats:
    if args.stats_file:
        doc = json.loads(Path(args.stats_file).read_text())
        try:
            return DataStats(**doc)
        except (TypeError, ValueError) as exc:
            raise CliError(EXIT_INPUT, f"bad stats file: {exc}") from exc
    if args.rows is None or args.cols is None or args.col_size is None:
        raise CliError(EXIT_INPUT, "need --rows, --cols and --col-size (or --stats-file)")
    row_size = args.row_size if args.row_size is not None else args.col_size * args.cols
    try:
        return DataStats(
            row_count=args.rows,
            avg_row_size=row_size,
            avg_col_size=args.col_size,
            col_count=args.cols,
            varlen_col_count=args.varlen_cols,
        )
    except ValueError as exc:
        raise CliError(EXIT_INPUT, f"invalid stats: {exc}") from exc


def cmd_estimate_size(args) -> int:
    _build_profile(args)
    try:
        fd = get_format(args.format)
    except UnknownFormatError as exc:
        raise CliError(EXIT_UNKNOWN, str(exc)) from exc
    overrides = getattr(args, "_config_doc", {}).get("formats", {}).get(fd.name)
    if overrides:
        fd = fd.with_overrides(overrides)
    stats = _stats_from_args(args)

    report: dict = {"format": fd.name, "stats": asdict(stats)}
    est = sections(stats, fd)
    report["estimated"] = {"header": est.header, "body": est.body,
                           "footer": est.footer, "total": est.total}
    lines = [f"format: {fd.name}",
             f"header: {_g(est.header)}  body: {_g(est.body)}  "
             f"footer: {_g(est.footer)}  total: {_g(est.total)}"]
    csv_rows = [["format", "section", "estimated", "actual", "error_pct"]]

    if args.oracle:
        if stats.avg_col_size != int(stats.avg_col_size):
            raise CliError(EXIT_INPUT, "--oracle needs integer column sizes")
        width = int(stats.avg_col_size)
        varlen = tuple(i < stats.varlen_col_count for i in range(stats.col_count))
        table = SyntheticTable(row_count=stats.row_count,
                               col_widths=(width,) * stats.col_count,
                               varlen=varlen)
        ref = write_reference_file(table, fd, path=args.dump)
        actual = ref.sections
        err = ((est.total - actual.total) / actual.total * 100.0
               if actual.total else 0.0)
        report["actual"] = {"header": actual.header, "body": actual.body,
                            "footer": actual.footer, "total": actual.total}
        report["error_pct"] = err
        lines.append(f"oracle: total {_g(actual.total)}  error {_g(err)}%")
        for name in ("header", "body", "footer", "total"):
            csv_rows.append([fd.name, name, getattr(est, name),
                             getattr(actual, name), ""])
        csv_rows[-1][4] = repr(err)
    else:
        for name in ("header", "body", "footer", "total"):
            csv_rows.append([fd.name, name, getattr(est, name), "", ""])

    _emit(args, lines, report, csv_rows)
    return EXIT_OK


# --- choose -------------------------------------------------------------------

def _inline_stats(document: dict) -> dict[str, DataStats]:
    out = {}
    for node in document.get("nodes", []):
        if "stats" in node:
            try:
                out[str(node["id"])] = DataStats(**node["stats"])
            except (TypeError, ValueError) as exc:
                raise CliError(EXIT_INPUT,
                               f"bad inline stats for {node.get('id')!r}: {exc}") from exc
    return out


def cmd_choose(args) -> int:
    profile = _build_profile(args)
    candidates = _candidate_formats(args)
    try:
        document = json.loads(Path(args.workflow).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(EXIT_INPUT, f"cannot read workflow: {exc}") from exc
    try:
        wf = parse_workflow(document)
    except WorkflowParseError as exc:
        raise CliError(EXIT_INPUT, f"bad workflow: {exc}") from exc
    inline = _inline_stats(document)

    catalog = StatsCatalog()
    if args.catalog:
        try:
            catalog = StatsCatalog.load(args.catalog)
        except CatalogSchemaError as exc:
            raise CliError(EXIT_VERSION, str(exc)) from exc

    selected = sorted(select_materialization_nodes(wf, mode=args.restore))
    decisions = []
    for nid in selected:
        fp = fingerprint(wf, nid)
        data = inline.get(nid)
        try:
            if args.selection == "rule":  # ignore any statistics on purpose
                kinds = [wf.nodes[c].kind for c in sorted(wf.consumers(nid))]
                choice = FormatChoice(format=rule_based_choice(kinds),
                                      decided_by="rule")
            else:
                choice = choose_format(wf, nid, catalog, candidates, profile,
                                       amortization_reads=args.amortization_reads,
                                       inline_stats=data)
        except ValueError as exc:
            raise CliError(EXIT_INPUT, f"cannot decide node {nid!r}: {exc}") from exc
        if args.selection == "cost" and choice.decided_by != "cost":
            raise CliError(EXIT_INPUT,
                           f"node {nid!r} lacks complete statistics for --selection cost")
        decisions.append((nid, fp, choice))
        if args.record:
            stats = NodeStats(data=data if data is not None
                              else (catalog.lookup(fp).data if catalog.lookup(fp) else None),
                              ops=tuple(outgoing_operations(wf, nid)))
            catalog.record(fp, stats)

    lines = []
    csv_rows = [["node", "fingerprint", "decided_by", "format", "total_cost"]]
    report_nodes = []
    for nid, fp, choice in decisions:
        cost = "" if choice.total_cost is None else _g(choice.total_cost)
        lines.append(f"{nid}: {choice.format} (by {choice.decided_by}"
                     + (f", cost {cost}" if cost else "") + ")")
        csv_rows.append([nid, fp, choice.decided_by, choice.format,
                         "" if choice.total_cost is None else repr(choice.total_cost)])
        report_nodes.append({"node": nid, "fingerprint": fp, **explain(choice)})
    report = {"selected": selected, "decisions": report_nodes,
              "restore_mode": args.restore}

    if args.record:
        out_path = args.catalog_out or args.catalog
        if not out_path:
            raise CliError(EXIT_INPUT, "--record needs --catalog or --catalog-out")
        catalog.save(out_path)
        lines.append(f"catalog recorded: {out_path} (version {catalog.version})")

    _emit(args, lines, report, csv_rows)
    return EXIT_OK


# --- validate -------------------------------------------------------------------

def cmd_validate(args) -> int:
    _build_profile(args)
    report = validation.run_all(seed=args.seed, trials=args.trials,
                                configs=args.configs)
    lines = []
    csv_rows = [["suite", "case", "estimated", "actual", "error", "metric",
                 "tolerance", "ok"]]
    for suite in report["suites"]:
        status = "PASS" if suite["passed"] else "FAIL"
        bound = suite["tolerance"]
        unit = {"pct": "%", "abs": "", "mismatch": "%"}[suite["metric"]]
        lines.append(f"{status} {suite['name']} "
                     f"({len(suite['cases'])} cases, tolerance {_g(bound)}{unit})")
        for case in suite["cases"]:
            csv_rows.append([suite["name"], case["case"],
                             repr(case["estimated"]), repr(case["actual"]),
                             repr(case["error"]), suite["metric"],
                             repr(bound), case["ok"]])
            if not case["ok"]:
                lines.append(f"  FAIL {case['case']}: estimated "
                             f"{_g(case['estimated'])} actual {_g(case['actual'])} "
                             f"error {_g(case['error'])}")
    lines.append(("PASS" if report["passed"] else "FAIL")
                 + f" overall (seed {report['seed']})")
    _emit(args, lines, report, csv_rows)
    return EXIT_OK if report["passed"] else EXIT_VALIDATION


# --- crossover -------------------------------------------------------------------

def cmd_crossover(args) -> int:
    profile = _build_profile(args)
    candidates = _candidate_formats(args)
    if args.stats_file:
        try:
            stats = DataStats(**json.loads(Path(args.stats_file).read_text()))
        except (OSError, TypeError, ValueError) as exc:
            raise CliError(EXIT_INPUT, f"bad stats file: {exc}") from exc
    else:
        stats = fixtures.crossover_stats()

    horizontal = [fd for fd in candidates if fd.kind == "horizontal"]
    hybrid = [fd for fd in candidates if fd.kind == "hybrid"]
    if not horizontal or not hybrid:
        raise CliError(EXIT_INPUT, "crossover needs horizontal and hybrid candidates")

    points = []
    for k in range(1, stats.col_count + 1):
        op = OperationProfile.project(k)
        costs = {fd.name: read_cost(op, stats, as_geometry(fd, stats), profile).weighted_cost
                 for fd in candidates}
        best_h = min(costs[fd.name] for fd in horizontal)
        best_y = min(costs[fd.name] for fd in hybrid)
        points.append({"ref_cols": k, "fraction": k / stats.col_count,
                       **costs, "gap": best_y - best_h})

    crossings = []
    for prev, cur in zip(points, points[1:]):
        if prev["gap"] < 0 <= cur["gap"] or prev["gap"] >= 0 > cur["gap"]:
            t = abs(prev["gap"]) / (abs(prev["gap"]) + abs(cur["gap"]))
            crossings.append(prev["fraction"]
                             + t * (cur["fraction"] - prev["fraction"]))

    report = {"stats": asdict(stats), "points": points, "crossings": crossings,
              "crossover_fraction": crossings[0] if len(crossings) == 1 else None}
    lines = [f"columns: {stats.col_count}, rows: {stats.row_count}"]
    for p in points:
        cols = "  ".join(f"{name}={_g(p[name])}"
                         for name in sorted(p) if name not in ("ref_cols", "fraction", "gap"))
        lines.append(f"ref_cols={p['ref_cols']:>3} fraction={_g(p['fraction'])}  {cols}")
    if len(crossings) == 1:
        lines.append(f"crossover fraction: {_g(crossings[0])}")
    else:
        lines.append(f"crossings found: {len(crossings)}")
    csv_rows = [["ref_cols", "fraction"] + [fd.name for fd in candidates] + ["gap"]]
    for p in points:
        csv_rows.append([p["ref_cols"], repr(p["fraction"])]
                        + [repr(p[fd.name]) for fd in candidates] + [repr(p["gap"])])
    _emit(args, lines, report, csv_rows)
    return EXIT_OK


# --- catalog -------------------------------------------------------------------

def cmd_catalog(args) -> int:
    if args.action == "init":
        StatsCatalog().save(args.path)
        print(f"initialized empty catalog at {args.path}")
        return EXIT_OK
    try:
        catalog = StatsCatalog.load(args.path)
    except CatalogSchemaError as exc:
        raise CliError(EXIT_VERSION, str(exc)) from exc
    if args.action == "copy":
        if not args.dest:
            raise CliError(EXIT_INPUT, "catalog copy needs DEST")
        catalog.save(args.dest)
        print(f"copied catalog to {args.dest} (version {catalog.version})")
        return EXIT_OK

    lines = [f"catalog version {catalog.version}, {len(catalog.entries)} entries"]
    report = {"version": catalog.version, "entries": {}}
    for fp, stats in sorted(catalog.entries.items()):
        data = stats.data
        desc = ("no data" if data is None
                else f"rows={data.row_count} cols={data.col_count}")
        lines.append(f"{fp}: {desc}, {len(stats.ops)} ops, "
                     + ("complete" if stats.complete else "incomplete"))
        report["entries"][fp] = {
            "data": None if data is None else asdict(data),
            "ops": [None if op is None else asdict(op) for op in stats.ops],
            "complete": stats.complete,
        }
    csv_rows = [["fingerprint", "rows", "cols", "ops", "complete"]]
    for fp, stats in sorted(catalog.entries.items()):
        csv_rows.append([fp,
                         stats.data.row_count if stats.data else "",
                         stats.data.col_count if stats.data else "",
                         len(stats.ops), stats.complete])
    _emit(args, lines, report, csv_rows)
    return EXIT_OK


# --- fixtures -------------------------------------------------------------------

def cmd_fixtures(args) -> int:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    wf_doc = fixtures.nine_node_workflow_document()
    (out / "nine_node_workflow.json").write_text(json.dumps(wf_doc, indent=2))
    fixtures.nine_node_catalog().save(out / "nine_node_catalog.json")
    (out / "crossover_stats.json").write_text(
        json.dumps(asdict(fixtures.crossover_stats()), indent=2))
    print(f"fixtures written to {out}")
    return EXIT_OK


# --- parser -------------------------------------------------------------------

def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="system/format config document (json or toml); "
                        f"defaults to ${PROFILE_ENV} when set")
    parser.add_argument("--set", action="append", metavar="KEY=VALUE",
                        help="override one system profile field")
    parser.add_argument("--output", choices=("text", "json", "csv"), default="text")
    parser.add_argument("--report", help="also write the output to this file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="formatadvisor",
        description="Estimate storage-format sizes and I/O costs for "
                    "materialized workflow results, and choose formats.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate-size", help="per-section size estimate for one format")
    _add_common(p)
    p.add_argument("--format", required=True)
    p.add_argument("--rows", type=int)
    p.add_argument("--cols", type=int)
    p.add_argument("--col-size", type=float)
    p.add_argument("--row-size", type=float)
    p.add_argument("--varlen-cols", type=int, default=0)
    p.add_argument("--stats-file", help="json DataStats document")
    p.add_argument("--oracle", action="store_true",
                   help="compare against the reference writer")
    p.add_argument("--dump", help="with --oracle: also emit the structural file here")
    p.set_defaults(func=cmd_estimate_size)

    p = sub.add_parser("choose", help="select materialization nodes and formats")
    _add_common(p)
    p.add_argument("--workflow", required=True, help="workflow json document")
    p.add_argument("--catalog", help="statistics catalog json")
    p.add_argument("--catalog-out", help="where --record writes the catalog")
    p.add_argument("--restore", choices=("conservative", "aggressive", "both"),
                   default="both")
    p.add_argument("--selection", choices=("auto", "rule", "cost"), default="auto")
    p.add_argument("--candidates", help="comma-separated format names")
    p.add_argument("--amortization-reads", type=float, default=1.0)
    p.add_argument("--record", action="store_true",
                   help="record node statistics back into the catalog")
    p.set_defaults(func=cmd_choose)

    p = sub.add_parser("validate", help="run the oracle validation suites")
    _add_common(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=100_000,
                   help="Monte Carlo trials for the rg-hit suite")
    p.add_argument("--configs", type=int, default=200,
                   help="randomized configurations for the ordering suite")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("crossover", help="projected-column-fraction cost crossover")
    _add_common(p)
    p.add_argument("--stats-file", help="json DataStats document (default: bundled)")
    p.add_argument("--candidates", help="comma-separated format names")
    p.set_defaults(func=cmd_crossover)

    p = sub.add_parser("catalog", help="inspect or initialize a statistics catalog")
    _add_common(p)
    p.add_argument("action", choices=("inspect", "init", "copy"))
    p.add_argument("path")
    p.add_argument("dest", nargs="?")
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("fixtures", help="write the bundled fixture documents")
    p.add_argument("out_dir")
    p.set_defaults(func=cmd_fixtures)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return exc.code
    except UnknownFormatError as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return EXIT_UNKNOWN
    except CatalogSchemaError as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return EXIT_VERSION
    except (WorkflowParseError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    _sys.exit(main())
