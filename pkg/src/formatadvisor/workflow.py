"""Workflow DAGs, materialization-node selection, and the statistics catalog.

A workflow is a DAG of operations (LOAD, FILTER, FOREACH, JOIN, GROUPBY,
STORE); a node's output may feed several consumers.  Node selection follows
the ReStore heuristics: conservative materializes the outputs of
size-reducing operators (FILTER, FOREACH), aggressive the outputs of
computation-intensive ones (JOIN, GROUPBY).  Only nodes that some
downstream operation actually consumes are worth materializing -- a STORE
is a sink, not a consumer.

Collected statistics live in a catalog keyed by a structural fingerprint of
the producing sub-DAG, so the same computation gets the same entry no
matter how its nodes are labeled, and persist to a versioned JSON document.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, asdict
from graphlib import CycleError, TopologicalSorter
from pathlib import Path

from .layouts import DataStats, OperationProfile

NODE_KINDS = ("LOAD", "FILTER", "FOREACH", "JOIN", "GROUPBY", "STORE")
CONSERVATIVE_KINDS = frozenset({"FILTER", "FOREACH"})
AGGRESSIVE_KINDS = frozenset({"JOIN", "GROUPBY"})

CATALOG_SCHEMA_VERSION = 1


class WorkflowParseError(ValueError):
    """The workflow document is malformed."""


class WorkflowCycleError(WorkflowParseError):
    """The edges form a cycle."""


class UnknownOperationError(WorkflowParseError):
    """A node has an unrecognized kind."""


class CatalogSchemaError(ValueError):
    """A persisted catalog is corrupt or from an incompatible schema."""


class InconsistentStatsError(ValueError):
    """Node statistics violate their invariants."""


@dataclass(frozen=True)
class Node:
    id: str
    kind: str
    sf: float | None = None
    ref_cols: int | None = None
    sorted: bool = False
    frequency: float = 1.0
    source: str | None = None  # dataset identity, mainly for LOAD nodes


@dataclass(frozen=True)
class Workflow:
    nodes: dict[str, Node]
    edges: tuple[tuple[str, str], ...]

    def producers(self, node_id: str) -> list[str]:
        return [src for src, dst in self.edges if dst == node_id]

    def consumers(self, node_id: str) -> list[str]:
        """Downstream operations; STORE sinks do not count."""
        return [dst for src, dst in self.edges
                if src == node_id and self.nodes[dst].kind != "STORE"]

    def outgoing(self, node_id: str) -> list[str]:
        return [dst for src, dst in self.edges if src == node_id]


def _node_from_doc(doc: dict) -> Node:
    if "id" not in doc or "kind" not in doc:
        raise WorkflowParseError(f"node needs id and kind: {doc!r}")
    kind = str(doc["kind"]).upper()
    if kind not in NODE_KINDS:
        raise UnknownOperationError(f"unknown operation kind {doc['kind']!r}")
    return Node(
        id=str(doc["id"]),
        kind=kind,
        sf=doc.get("sf"),
        ref_cols=doc.get("ref_cols"),
        sorted=bool(doc.get("sorted", False)),
        frequency=float(doc.get("frequency", 1.0)),
        source=doc.get("source"),
    )


def parse_workflow(document: dict) -> Workflow:
    """Validate a workflow document: known kinds, no dangling edges, acyclic,
    every non-LOAD node fed by at least one edge."""
    if not isinstance(document, dict) or "nodes" not in document:
        raise WorkflowParseError("document needs a 'nodes' list")
    nodes: dict[str, Node] = {}
    for doc in document["nodes"]:
        node = _node_from_doc(doc)
        if node.id in nodes:
            raise WorkflowParseError(f"duplicate node id {node.id!r}")
        nodes[node.id] = node

    edges = []
    for edge in document.get("edges", []):
        src, dst = edge.get("from"), edge.get("to")
        if src not in nodes or dst not in nodes:
            raise WorkflowParseError(f"edge references unknown node: {edge!r}")
        edges.append((src, dst))

    graph: dict[str, set[str]] = {nid: set() for nid in nodes}
    for src, dst in edges:
        graph[dst].add(src)
    try:
        TopologicalSorter(graph).prepare()
    except CycleError as exc:
        raise WorkflowCycleError(f"workflow contains a cycle: {exc.args}") from exc

    for nid, preds in graph.items():
        if nodes[nid].kind != "LOAD" and not preds:
            raise WorkflowParseError(f"non-LOAD node {nid!r} has no incoming edge")

    return Workflow(nodes=nodes, edges=tuple(edges))


def select_materialization_nodes(wf: Workflow, mode: str = "both",
                                 min_consumers: int = 1) -> set[str]:
    """ReStore node selection.

    conservative -> FILTER/FOREACH outputs, aggressive -> JOIN/GROUPBY
    outputs, both -> their union.  Eligibility needs at least
    `min_consumers` downstream operations; LOAD and STORE are never picked.
    """
    if mode == "conservative":
        kinds = CONSERVATIVE_KINDS
    elif mode == "aggressive":
        kinds = AGGRESSIVE_KINDS
    elif mode == "both":
        kinds = CONSERVATIVE_KINDS | AGGRESSIVE_KINDS
    else:
        raise ValueError(f"unknown selection mode {mode!r}")
    return {nid for nid, node in wf.nodes.items()
            if node.kind in kinds and len(wf.consumers(nid)) >= min_consumers}


def operation_for_node(node: Node) -> OperationProfile:
    """The read pattern a consumer imposes on its input.

    JOIN and GROUPBY scan (no modeled layout supports them natively),
    FILTER selects, FOREACH projects.
    """
    if node.kind == "FILTER":
        if node.sf is None:
            raise InconsistentStatsError(f"FILTER {node.id!r} has no sf")
        return OperationProfile.select(node.sf, sorted=node.sorted,
                                       frequency=node.frequency)
    if node.kind == "FOREACH":
        if node.ref_cols is None:
            raise InconsistentStatsError(f"FOREACH {node.id!r} has no ref_cols")
        return OperationProfile.project(node.ref_cols, frequency=node.frequency)
    return OperationProfile.scan(frequency=node.frequency)


def outgoing_operations(wf: Workflow, node_id: str) -> list[OperationProfile]:
    """Operation profiles of all downstream consumers, in id order.

    Consumers missing their parameters (a FILTER without sf, a FOREACH
    without ref_cols) yield None entries replaced by a bare marker: the
    caller decides whether that forces the cold-start path.
    """
    ops = []
    for cid in sorted(wf.consumers(node_id)):
        try:
            ops.append(operation_for_node(wf.nodes[cid]))
        except InconsistentStatsError:
            ops.append(None)
    return ops


def fingerprint(wf: Workflow, node_id: str) -> str:
    """Canonical hash of the sub-DAG producing this node's output.

    Two structurally identical producing sub-DAGs fingerprint equally
    regardless of node ids: the canonical form is the node kind, operation
    attributes and source dataset, plus the sorted canonical forms of its
    producers.  Distinct source tables keep distinct LOADs apart; renaming
    nodes changes nothing.
    """
    memo: dict[str, str] = {}

    def canon(nid: str) -> str:
        if nid in memo:
            return memo[nid]
        node = wf.nodes[nid]
        payload = json.dumps({
            "kind": node.kind,
            "sf": node.sf,
            "ref_cols": node.ref_cols,
            "sorted": node.sorted,
            "source": node.source,
            "inputs": sorted(canon(p) for p in wf.producers(nid)),
        }, sort_keys=True)
        digest = hashlib.sha256(payload.encode()).hexdigest()[:16]
        memo[nid] = digest
        return digest

    return canon(node_id)


@dataclass(frozen=True)
class NodeStats:
    """Statistics for one materialization candidate: its output data plus
    the operation profile of every outgoing edge."""

    data: DataStats | None
    ops: tuple[OperationProfile | None, ...] = ()

    @property
    def complete(self) -> bool:
        """Everything the cost model needs is present."""
        return (self.data is not None and len(self.ops) > 0
                and all(op is not None for op in self.ops))


def _stats_to_doc(stats: NodeStats) -> dict:
    return {
        "data": None if stats.data is None else asdict(stats.data),
        "ops": [None if op is None else asdict(op) for op in stats.ops],
    }


def _stats_from_doc(doc: dict) -> NodeStats:
    try:
        data = None if doc.get("data") is None else DataStats(**doc["data"])
        ops = tuple(None if op is None else OperationProfile(**op)
                    for op in doc.get("ops", []))
    except (TypeError, ValueError) as exc:
        raise InconsistentStatsError(str(exc)) from exc
    return NodeStats(data=data, ops=ops)


@dataclass
class StatsCatalog:
    """Fingerprint-keyed node statistics; single writer, many readers.

    Upserts are last-writer-wins and bump the version counter.
    """

    entries: dict[str, NodeStats] = field(default_factory=dict)
    version: int = 0

    def record(self, fp: str, stats: NodeStats) -> None:
        if not isinstance(stats, NodeStats):
            raise InconsistentStatsError("expected a NodeStats value")
        self.entries[fp] = stats
        self.version += 1

    def lookup(self, fp: str) -> NodeStats | None:
        return self.entries.get(fp)

    def save(self, path: str | Path) -> None:
        doc = {
            "schema_version": CATALOG_SCHEMA_VERSION,
            "version": self.version,
            "entries": {fp: _stats_to_doc(s) for fp, s in sorted(self.entries.items())},
        }
        Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True))

    @classmethod
    def load(cls, path: str | Path) -> "StatsCatalog":
        text = Path(path).read_text()  # missing file is an io error, not schema
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise CatalogSchemaError(f"corrupt catalog {path}: {exc}") from exc
        if not isinstance(doc, dict) or doc.get("schema_version") != CATALOG_SCHEMA_VERSION:
            raise CatalogSchemaError(
                f"catalog schema mismatch: expected {CATALOG_SCHEMA_VERSION}, "
                f"got {doc.get('schema_version') if isinstance(doc, dict) else doc!r}")
        catalog = cls(version=int(doc.get("version", 0)))
        for fp, item in doc.get("entries", {}).items():
            catalog.entries[fp] = _stats_from_doc(item)
        return catalog
