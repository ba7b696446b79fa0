"""Format choice per materialized node: rules when statistics are missing,
the cost model when they are complete.

The rule path looks only at the kinds of the outgoing operations: all
scan-pattern consumers (joins, group-bys) favor the horizontal format, any
projection or selection favors the hybrid one, since those are the
operations it serves natively.  That blindness to selectivities and widths
is exactly what the cost path fixes.

The cost path charges each candidate format one write of its estimated
file size plus the frequency-weighted read cost of every outgoing
operation, and picks the argmin of the dimensionless weighted-chunk cost.
Exact ties break toward the richest format (parquet > avro > seqfile).
"""

from __future__ import annotations

from dataclasses import dataclass

from . import system
from .formats import FormatDescriptor, as_geometry
from .layouts import DataStats, SizeBreakdown, read_cost, total_layout_size
from .system import CostEstimate, SystemProfile
from .workflow import (
    NodeStats,
    StatsCatalog,
    Workflow,
    fingerprint,
    outgoing_operations,
)

RULE_HORIZONTAL = "avro"
RULE_HYBRID = "parquet"

# richer formats offer more native features; used for rule and cost ties
FORMAT_RICHNESS = {"parquet": 3, "avro": 2, "vertical": 1, "seqfile": 0}

SCAN_PATTERN_KINDS = frozenset({"JOIN", "GROUPBY", "SCAN"})
PROJECT_KINDS = frozenset({"FOREACH", "PROJECT"})
SELECT_KINDS = frozenset({"FILTER", "SELECT"})


class EmptyOperationListError(ValueError):
    """Rule-based choice needs at least one outgoing operation."""


class IncompleteStatsError(ValueError):
    """Cost-based choice needs complete node statistics."""


def rule_based_choice(op_kinds: list[str]) -> str:
    """Pick a format from operation kinds alone.

    Accepts workflow kinds (JOIN, GROUPBY, FILTER, FOREACH) or operation
    kinds (scan, select, project).  Scan-only lists take the horizontal
    format; anything touching a data subset takes the hybrid one, which is
    also the richest-format tie-break when patterns are mixed.
    """
    if not op_kinds:
        raise EmptyOperationListError("no outgoing operations")
    for kind in op_kinds:
        k = kind.upper()
        if k not in SCAN_PATTERN_KINDS | PROJECT_KINDS | SELECT_KINDS:
            raise ValueError(f"unknown operation kind {kind!r}")
    if all(k.upper() in SCAN_PATTERN_KINDS for k in op_kinds):
        return RULE_HORIZONTAL
    return RULE_HYBRID


@dataclass(frozen=True)
class CandidateCost:
    """Full cost breakdown of one candidate format for one node."""

    format: str
    size: SizeBreakdown
    write: CostEstimate
    reads: tuple[CostEstimate, ...]
    total_cost: float


@dataclass(frozen=True)
class FormatChoice:
    format: str
    decided_by: str  # "rule" | "cost"
    rank: tuple[CandidateCost, ...] = ()

    @property
    def total_cost(self) -> float | None:
        return self.rank[0].total_cost if self.rank else None


def _rank_key(cand: CandidateCost) -> tuple:
    return (cand.total_cost, -FORMAT_RICHNESS.get(cand.format, -1), cand.format)


def cost_candidates(stats: NodeStats, candidates: list[FormatDescriptor],
                    sys: SystemProfile,
                    amortization_reads: float = 1.0) -> list[CandidateCost]:
    """Cost every candidate: one write plus the weighted outgoing reads."""
    out = []
    for fd in candidates:
        geo = as_geometry(fd, stats.data)
        size = total_layout_size(stats.data, geo)
        write = system.write_cost(size.total, sys)
        reads = tuple(read_cost(op, stats.data, geo, sys) for op in stats.ops)
        total = write.weighted_cost + amortization_reads * sum(
            op.frequency * r.weighted_cost for op, r in zip(stats.ops, reads))
        out.append(CandidateCost(format=fd.name, size=size, write=write,
                                 reads=reads, total_cost=total))
    return sorted(out, key=_rank_key)


def cost_based_choice(stats: NodeStats, candidates: list[FormatDescriptor],
                      sys: SystemProfile,
                      amortization_reads: float = 1.0) -> FormatChoice:
    """Argmin of estimated total cost over the candidates."""
    if not stats.complete:
        raise IncompleteStatsError("node statistics are incomplete; fall back to rules")
    if not candidates:
        raise ValueError("need at least one candidate format")
    rank = tuple(cost_candidates(stats, candidates, sys, amortization_reads))
    return FormatChoice(format=rank[0].format, decided_by="cost", rank=rank)


def choose_format(wf: Workflow, node_id: str, catalog: StatsCatalog,
                  candidates: list[FormatDescriptor], sys: SystemProfile,
                  amortization_reads: float = 1.0,
                  inline_stats: DataStats | None = None) -> FormatChoice:
    """The full decision flow for one node.

    Uses the cost model when statistics are available and complete (either
    supplied inline or recorded in the catalog under the node's
    fingerprint); otherwise falls back to the rules over the node's
    outgoing operation kinds.
    """
    ops = outgoing_operations(wf, node_id)
    data = inline_stats
    if data is None:
        entry = catalog.lookup(fingerprint(wf, node_id))
        if entry is not None:
            data = entry.data
    stats = NodeStats(data=data, ops=tuple(ops))
    if stats.complete and candidates:
        return cost_based_choice(stats, candidates, sys, amortization_reads)
    kinds = [wf.nodes[c].kind for c in sorted(wf.consumers(node_id))]
    return FormatChoice(format=rule_based_choice(kinds), decided_by="rule")


def explain(choice: FormatChoice) -> dict:
    """Serializable report of a choice; totals match the choice bit-exactly."""
    return {
        "format": choice.format,
        "decided_by": choice.decided_by,
        "total_cost": choice.total_cost,
        "candidates": [
            {
                "format": cand.format,
                "size": {
                    "header": cand.size.header,
                    "body": cand.size.body,
                    "footer": cand.size.footer,
                    "total": cand.size.total,
                },
                "write": {
                    "chunks": cand.write.chunks,
                    "seeks": cand.write.seeks,
                    "weighted_cost": cand.write.weighted_cost,
                    "seconds": cand.write.seconds,
                },
                "reads": [
                    {
                        "chunks": r.chunks,
                        "seeks": r.seeks,
                        "weighted_cost": r.weighted_cost,
                        "seconds": r.seconds,
                    }
                    for r in cand.reads
                ],
                "total_cost": cand.total_cost,
            }
            for cand in choice.rank
        ],
    }
