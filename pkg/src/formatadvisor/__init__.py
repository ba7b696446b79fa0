"""Cost-based storage format advisor for materialized workflow results.

Estimates file sizes and read/write I/O costs of horizontal, vertical and
hybrid storage layouts on a distributed file system, picks which workflow
nodes to materialize, chooses the cheapest format per node, and validates
its own estimates against byte-accounting and simulation oracles.
"""

from .system import (
    DEFAULT_PROFILE,
    CostEstimate,
    DerivedTimes,
    InvalidProfileError,
    ModeMismatchError,
    SystemProfile,
    cost_to_seconds,
    derived_times,
    read_transfer_weight,
    seeks,
    used_chunks,
    weighted_cost,
    write_cost,
    write_transfer_weight,
)
from .layouts import (
    DataStats,
    LayoutGeometry,
    OperationProfile,
    SizeBreakdown,
    read_cost,
    row_group_hit_probability,
    scan_cost,
    scan_size,
    total_layout_size,
)
from .formats import (
    AVRO,
    BUILTIN_FORMATS,
    PARQUET,
    SEQFILE,
    FormatDescriptor,
    UnknownFormatError,
    as_geometry,
    get_format,
    sections,
    synthetic_vertical,
)
from .oracle import (
    AccessPlan,
    Extent,
    ReferenceFile,
    SyntheticTable,
    monte_carlo_rg_hit,
    replay_io,
    simulate_operation,
    write_reference_file,
)
from .workflow import (
    NodeStats,
    StatsCatalog,
    Workflow,
    fingerprint,
    parse_workflow,
    select_materialization_nodes,
)
from .selector import (
    FormatChoice,
    choose_format,
    cost_based_choice,
    explain,
    rule_based_choice,
)

__version__ = "0.1.0"
