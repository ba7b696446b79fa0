"""Validation sweeps: estimates vs. the built-in oracles.

Each suite mirrors one published validation axis at desk scale: file-size
accuracy per format, projection-size accuracy, selection-size accuracy
(sorted and unsorted), the analytic row-group hit probability against its
Monte Carlo twin, and preservation of the cost ordering against the replay
simulator.  Every case row carries (estimated, actual, error, tolerance)
so reports double as plot data.

Sweeps stay within the model's domain: files of one megabyte and up.  The
estimators charge whole-file constants (footer statistics per started row
group, for instance) that a sub-chunk-scale file never amortizes, so
accuracy bands are stated for DFS-sized inputs, matching how the model is
used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .formats import AVRO, PARQUET, SEQFILE, as_geometry, sections
from .layouts import (
    OperationProfile,
    project_size_hybrid,
    read_cost,
    row_group_hit_probability,
    scan_cost,
    select_size_hybrid,
)
from .oracle import (
    SyntheticTable,
    monte_carlo_rg_hit,
    simulate_operation,
    simulate_select_bytes,
    write_reference_file,
)
from .system import DEFAULT_PROFILE, SystemProfile

FORMATS = (SEQFILE, AVRO, PARQUET)


@dataclass
class SuiteResult:
    name: str
    tolerance: float
    metric: str  # "pct" | "abs" | "mismatch"
    cases: list[dict] = field(default_factory=list)
    passed: bool = True

    def add(self, case: str, estimated, actual, error: float, ok: bool) -> None:
        self.cases.append({
            "case": case,
            "estimated": estimated,
            "actual": actual,
            "error": error,
            "ok": ok,
        })
        if not ok:
            self.passed = False


def _pct(estimated: float, actual: float) -> float:
    if actual == 0:
        return 0.0 if estimated == 0 else math.inf
    return (estimated - actual) / actual * 100.0


# (rows, cols, width range) pairs; widths keep every file at >= ~1 MB
SIZE_SWEEP = (
    (1_000, 4, (180, 320)),
    (1_000, 30, (40, 60)),
    (10_000, 8, (20, 40)),
    (100_000, 12, (8, 24)),
    (1_000_000, 4, (8, 16)),
    (1_000_000, 30, (4, 16)),
    (10_000_000, 16, (4, 12)),
    (10_000_000, 30, (4, 20)),
)


def _sweep_table(rows: int, cols: int, widths: tuple[int, int],
                 rng: np.random.Generator) -> SyntheticTable:
    lo, hi = widths
    return SyntheticTable(
        row_count=rows,
        col_widths=tuple(int(w) for w in rng.integers(lo, hi + 1, cols)),
        varlen=tuple(bool(v) for v in rng.random(cols) < 0.3),
    )


def size_suite(seed: int = 0, tolerance: float = 5.0) -> SuiteResult:
    """File-size estimates vs. reference-writer byte accounting."""
    result = SuiteResult(name="size", tolerance=tolerance, metric="pct")
    rng = np.random.default_rng(seed)
    for rows, cols, widths in SIZE_SWEEP:
        table = _sweep_table(rows, cols, widths, rng)
        stats = table.to_stats()
        for fd in FORMATS:
            est = sections(stats, fd).total
            act = write_reference_file(table, fd).sections.total
            err = _pct(est, act)
            result.add(f"{fd.name} rows={rows} cols={cols}", est, act, err,
                       abs(err) <= tolerance)
    return result


def projection_suite(seed: int = 0, tolerance: float = 5.0,
                     sys: SystemProfile = DEFAULT_PROFILE) -> SuiteResult:
    """Hybrid projection sizes vs. column-chunk accounting; horizontal
    projections must equal their scans exactly."""
    result = SuiteResult(name="projection", tolerance=tolerance, metric="pct")
    table = SyntheticTable(row_count=4_000_000, col_widths=(8,) * 25)
    stats = table.to_stats()
    ref = write_reference_file(table, PARQUET)
    geo = as_geometry(PARQUET, stats)
    fixed = ref.sections.header + ref.sections.footer
    for k in range(5, 26):
        est = project_size_hybrid(OperationProfile.project(k), stats, geo, sys)
        act = fixed
        for group in ref.groups:
            last = group.column_extents[k - 1]
            first = group.column_extents[0]
            act += (last[0] + last[1] - first[0])  # k leading column chunks
            act += group.offset + group.length - (group.column_extents[-1][0]
                                                  + group.column_extents[-1][1])
        err = _pct(est, act)
        result.add(f"parquet ref_cols={k}/25", est, act, err, abs(err) <= tolerance)

    for fd in (SEQFILE, AVRO):
        g = as_geometry(fd, stats)
        same = read_cost(OperationProfile.project(5), stats, g, sys) == scan_cost(stats, g, sys)
        result.add(f"{fd.name} projection == scan", 1.0, 1.0 if same else 0.0,
                   0.0 if same else 100.0, same)
    return result


SELECTION_SFS = (1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 0.1, 0.5)


def selection_suite(seed: int = 0, tolerance: float = 6.0, trials: int = 100,
                    sys: SystemProfile = DEFAULT_PROFILE) -> SuiteResult:
    """Hybrid selection sizes vs. simulated group membership, sorted and
    unsorted; horizontal selections must equal their scans exactly."""
    result = SuiteResult(name="selection", tolerance=tolerance, metric="pct")
    table = SyntheticTable(row_count=62_500_000, col_widths=(8,) * 16)
    stats = table.to_stats()
    geo = as_geometry(PARQUET, stats)
    for sorted_col in (False, True):
        label = "sorted" if sorted_col else "unsorted"
        for sf in SELECTION_SFS:
            op = OperationProfile.select(sf, sorted=sorted_col)
            est = select_size_hybrid(op, stats, geo, sys)
            act = simulate_select_bytes(table, PARQUET, sf, sorted_col,
                                        trials=trials, seed=seed)
            err = _pct(est, act)
            result.add(f"parquet {label} sf={sf:g}", est, act, err,
                       abs(err) <= tolerance)

    for fd in (SEQFILE, AVRO):
        g = as_geometry(fd, stats)
        same = (read_cost(OperationProfile.select(0.1), stats, g, sys)
                == scan_cost(stats, g, sys))
        result.add(f"{fd.name} selection == scan", 1.0, 1.0 if same else 0.0,
                   0.0 if same else 100.0, same)
    return result


RG_HIT_SFS = (1e-5, 1e-3, 0.1, 0.19, 0.92)
RG_HIT_ROWS = (100, 10_000, 100_000)


def rg_hit_suite(seed: int = 0, tolerance: float = 0.01,
                 trials: int = 100_000, group_count: int = 64) -> SuiteResult:
    """Analytic row-group hit probability vs. the Monte Carlo oracle."""
    result = SuiteResult(name="rg-hit", tolerance=tolerance, metric="abs")
    for rows in RG_HIT_ROWS:
        for sf in RG_HIT_SFS:
            analytic = row_group_hit_probability(sf, rows)
            mc = monte_carlo_rg_hit(rows, group_count, sf, trials=trials, seed=seed)
            err = abs(analytic - mc)
            result.add(f"sf={sf:g} rows={rows}", analytic, mc, err,
                       err <= tolerance)
    return result


def _random_op(rng: np.random.Generator, cols: int) -> OperationProfile:
    roll = rng.integers(0, 3)
    if roll == 0:
        return OperationProfile.scan()
    if roll == 1:
        # full-width projections degenerate to scans; keep them partial
        hi = max(1, int(0.8 * cols))
        return OperationProfile.project(int(rng.integers(1, hi + 1)))
    sf = float(10.0 ** rng.uniform(-6.0, -0.3))
    return OperationProfile.select(sf, sorted=bool(rng.integers(0, 2)))


def _rank(costs: dict[str, float]) -> str:
    return "<".join(sorted(costs, key=lambda name: (costs[name], name)))


def ordering_suite(seed: int = 0, configs: int = 200,
                   sys: SystemProfile = DEFAULT_PROFILE,
                   stochastic_tolerance: float = 5.0) -> tuple[SuiteResult, SuiteResult]:
    """Format ranking by estimated cost vs. ranking by simulated seconds.

    Returns two suites: one under p=1, R=1 where the simulator is
    deterministic and rankings must agree on every configuration, and one
    under the stochastic default profile where at most
    `stochastic_tolerance` percent of configurations may disagree.
    """
    deterministic = SuiteResult(name="ordering-deterministic", tolerance=0.0,
                                metric="mismatch")
    stochastic = SuiteResult(name="ordering-stochastic",
                             tolerance=stochastic_tolerance, metric="mismatch")
    exact_sys = sys.with_overrides(replication_factor=1, locality_probability=1.0)
    rng = np.random.default_rng(seed)
    mismatches = 0
    for i in range(configs):
        rows = int(rng.integers(1_000_000, 4_000_001))
        cols = int(rng.integers(8, 31))
        table = SyntheticTable(
            row_count=rows,
            col_widths=tuple(int(w) for w in rng.integers(8, 25, cols)),
            varlen=tuple(bool(v) for v in rng.random(cols) < 0.2),
        )
        op = _random_op(rng, cols)
        stats = table.to_stats()
        case_seed = seed * 1_000_003 + i

        est = {}
        sim_exact = {}
        sim_stochastic = {}
        for fd in FORMATS:
            geo = as_geometry(fd, stats)
            est[fd.name] = read_cost(op, stats, geo, exact_sys).weighted_cost
            sim_exact[fd.name] = simulate_operation(op, table, fd, exact_sys,
                                                    seed=case_seed)
            sim_stochastic[fd.name] = simulate_operation(op, table, fd, sys,
                                                         seed=case_seed)

        label = f"cfg{i:03d} {op.kind} rows={rows} cols={cols}"
        est_rank = _rank(est)
        exact_rank = _rank(sim_exact)
        deterministic.add(label, est_rank, exact_rank,
                          0.0 if est_rank == exact_rank else 1.0,
                          est_rank == exact_rank)

        est_stoch = {fd.name: read_cost(op, stats, as_geometry(fd, stats),
                                        sys).weighted_cost for fd in FORMATS}
        stoch_rank = _rank(sim_stochastic)
        est_stoch_rank = _rank(est_stoch)
        agree = est_stoch_rank == stoch_rank
        if not agree:
            mismatches += 1
        stochastic.add(label, est_stoch_rank, stoch_rank,
                       0.0 if agree else 1.0, True)  # per-case never fails alone

    rate = mismatches / configs * 100.0
    stochastic.add(f"mismatch rate over {configs} configs", rate,
                   stochastic_tolerance, rate, rate <= stochastic_tolerance)
    return deterministic, stochastic


def run_all(seed: int = 0, trials: int = 100_000, configs: int = 200) -> dict:
    """Run every suite; the report is fully determined by the arguments."""
    suites = [
        size_suite(seed),
        projection_suite(seed),
        selection_suite(seed),
        rg_hit_suite(seed, trials=trials),
    ]
    suites.extend(ordering_suite(seed, configs=configs))
    return {
        "seed": seed,
        "trials": trials,
        "configs": configs,
        "passed": all(s.passed for s in suites),
        "suites": [
            {
                "name": s.name,
                "tolerance": s.tolerance,
                "metric": s.metric,
                "passed": s.passed,
                "cases": s.cases,
            }
            for s in suites
        ],
    }
