"""Bundled synthetic fixtures.

`nine_node_*` builds a merged sixteen-query decision-support workflow in which
ReStore selects nine nodes to materialize: six join outputs (aggressive
heuristics) and three filter outputs (conservative).  Each selected node's
outgoing operators, selectivities and referenced-column counts follow the
nine canonical cases the advisor must decide; every terminal operator
feeds only stores, so nothing besides the nine is eligible.

The node statistics are synthesized at decision-support benchmark scale
factors in the tens-of-terabytes class (where scan-heavy workloads flip
from the hybrid to the horizontal format because tasks re-read footer
metadata once per chunk, and chunk counts grow with the data).  They are
not measurements; the advisor's tests sweep a documented region around
these centers and the decisions hold throughout it.

`crossover_stats` is a wide two-table-join result (25 columns, ~225-byte
rows) sized so the projected-column-fraction sweep crosses between the
hybrid and horizontal formats strictly inside (0, 1).
"""

from __future__ import annotations

from .layouts import DataStats
from .workflow import (
    NodeStats,
    StatsCatalog,
    Workflow,
    fingerprint,
    outgoing_operations,
    parse_workflow,
)

# node id -> (node kind, [(consumer kind, parameter), ...])
# parameter is sf for FILTER, ref_cols for FOREACH, None for JOIN
NINE_NODE_CASES: dict[str, tuple[str, list[tuple[str, float | int | None]]]] = {
    "N1": ("JOIN", [("JOIN", None), ("JOIN", None)]),
    "N2": ("JOIN", [("JOIN", None), ("JOIN", None), ("FILTER", 0.19)]),
    "N3": ("FILTER", [("JOIN", None), ("FILTER", 0.59), ("FILTER", 0.01)]),
    "N4": ("FILTER", [("FILTER", 0.03), ("FILTER", 0.2), ("FILTER", 0.19)]),
    "N5": ("JOIN", [("FOREACH", 3), ("FOREACH", 3)]),
    "N6": ("JOIN", [("FOREACH", 4), ("FOREACH", 4)]),
    "N7": ("FILTER", [("FILTER", 0.13), ("FILTER", 0.92)]),
    "N8": ("JOIN", [("JOIN", None), ("FILTER", 0.19), ("FILTER", 0.03),
                     ("FILTER", 0.01)]),
    "N9": ("JOIN", [("JOIN", None), ("JOIN", None)]),
}

EXPECTED_RULE_CHOICE = {
    "N1": "avro", "N2": "parquet", "N3": "parquet", "N4": "parquet",
    "N5": "parquet", "N6": "parquet", "N7": "parquet", "N8": "parquet",
    "N9": "avro",
}

EXPECTED_COST_CHOICE = {
    "N1": "avro", "N2": "avro", "N3": "avro", "N4": "avro",
    "N5": "parquet", "N6": "parquet", "N7": "avro", "N8": "avro",
    "N9": "avro",
}

# synthesized output statistics per materialized node:
# (row_count, avg_row_size, avg_col_size, col_count)
NINE_NODE_DATA_STATS: dict[str, tuple[int, float, float, int]] = {
    "N1": (260_000_000_000, 384.0, 16.0, 24),
    "N2": (220_000_000_000, 448.0, 16.0, 28),
    "N3": (210_000_000_000, 384.0, 12.0, 32),
    "N4": (170_000_000_000, 480.0, 12.0, 40),
    "N5": (17_000_000_000, 2400.0, 120.0, 20),
    "N6": (14_000_000_000, 3300.0, 150.0, 22),
    "N7": (230_000_000_000, 432.0, 12.0, 36),
    "N8": (210_000_000_000, 480.0, 16.0, 30),
    "N9": (220_000_000_000, 416.0, 16.0, 26),
}

_SOURCES = {
    "N1": ("store_sales", "date_dim"),
    "N2": ("store_sales", "item"),
    "N3": ("catalog_sales",),
    "N4": ("inventory",),
    "N5": ("store_sales", "customer"),
    "N6": ("web_sales", "item"),
    "N7": ("customer",),
    "N8": ("catalog_sales", "date_dim"),
    "N9": ("web_sales", "promotion"),
}

_LOADS = ("store_sales", "date_dim", "item", "customer", "web_sales",
          "catalog_sales", "inventory", "promotion")

_QUERY_COUNT = 16


# producing-filter selectivities of the three conservative candidates
_CANDIDATE_SF = {"N3": 0.45, "N4": 0.25, "N7": 0.35}


def nine_node_workflow_document() -> dict:
    """The sixteen-query workflow document with the nine candidate nodes."""
    nodes: list[dict] = [{"id": name, "kind": "LOAD", "source": name}
                         for name in _LOADS]
    edges: list[dict] = []

    consumer_ids: list[str] = []
    for nid, (kind, consumers) in NINE_NODE_CASES.items():
        node: dict = {"id": nid, "kind": kind}
        if kind == "FILTER":
            node["sf"] = _CANDIDATE_SF[nid]  # the candidate's own predicate
        nodes.append(node)
        for src in _SOURCES[nid]:
            edges.append({"from": src, "to": nid})
        for i, (ckind, param) in enumerate(consumers):
            cid = f"{nid.lower()}_{ckind.lower()}_{i}"
            consumer: dict = {"id": cid, "kind": ckind}
            if ckind == "FILTER":
                consumer["sf"] = param
            elif ckind == "FOREACH":
                consumer["ref_cols"] = param
            nodes.append(consumer)
            edges.append({"from": nid, "to": cid})
            if ckind == "JOIN":  # joins need a second input
                edges.append({"from": "date_dim", "to": cid})
            consumer_ids.append(cid)

    # route the 23 terminal operators into 16 query sinks (the last 7
    # queries store two results each)
    for q in range(_QUERY_COUNT):
        nodes.append({"id": f"query_{q + 1}", "kind": "STORE"})
    spill = len(consumer_ids) - _QUERY_COUNT
    for i, cid in enumerate(consumer_ids):
        q = i if i < _QUERY_COUNT else i - spill
        edges.append({"from": cid, "to": f"query_{q + 1}"})

    return {"nodes": nodes, "edges": edges}


def nine_node_workflow() -> Workflow:
    return parse_workflow(nine_node_workflow_document())


def nine_node_stats(node_id: str, volume_factor: float = 1.0,
                    width_factor: float = 1.0) -> DataStats:
    """Synthesized statistics for one candidate node.

    The sweep knobs rescale total data volume and column width while
    keeping the column count; the advisor's decisions are stable over
    volume_factor in [0.7, 1.4] and width_factor in [0.75, 1.5].
    """
    rows, row_size, col_size, cols = NINE_NODE_DATA_STATS[node_id]
    return DataStats(
        row_count=max(1, round(rows * volume_factor / width_factor)),
        avg_row_size=row_size * width_factor,
        avg_col_size=col_size * width_factor,
        col_count=cols,
    )


def nine_node_catalog(wf: Workflow | None = None, volume_factor: float = 1.0,
                      width_factor: float = 1.0) -> StatsCatalog:
    """A catalog holding complete statistics for the nine candidates."""
    if wf is None:
        wf = nine_node_workflow()
    catalog = StatsCatalog()
    for nid in NINE_NODE_CASES:
        stats = NodeStats(
            data=nine_node_stats(nid, volume_factor, width_factor),
            ops=tuple(outgoing_operations(wf, nid)),
        )
        catalog.record(fingerprint(wf, nid), stats)
    return catalog


def crossover_stats() -> DataStats:
    """A wide join result for the projected-column-fraction crossover sweep."""
    return DataStats(
        row_count=600_000_000_000,
        avg_row_size=225.0,
        avg_col_size=9.0,
        col_count=25,
    )
