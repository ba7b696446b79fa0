"""DFS system constants and the transfer-weighted I/O cost kernel.

A file of S bytes occupies S / chunk_size chunks (fractional) and needs
ceil(S / chunk_size) seeks, because every chunk costs one seek even when it
is not full.  Writes pay the disk transfer plus (R - 1) sequential network
copies; reads pay the disk transfer plus a network copy with probability
(1 - p) of the chunk being remote.  Costs blend the fractional chunk count
and the integer seek count with a transfer weight

    W = transfer_time / (seek_time + transfer_time)

so that cost = chunks * W + seeks * (1 - W).  The dimensionless cost is what
format ranking uses; a seconds conversion is provided for comparing against
the replay simulator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Literal


class InvalidProfileError(ValueError):
    """A SystemProfile field violates its invariant."""


class ModeMismatchError(ValueError):
    """A CostEstimate was converted to seconds under the wrong mode."""


Mode = Literal["read", "write"]


@dataclass(frozen=True)
class SystemProfile:
    """Hardware and DFS constants.

    Defaults are a 15-datanode Hadoop testbed: 130 MB/s disks, 1 Gb/s
    network, 128 MB chunks, 3-way replication, 97% chunk locality.
    Rotation time and disk block size are carried for sensitivity studies
    but excluded from costs unless ``charge_rotation`` is set.
    """

    replication_factor: int = 3
    locality_probability: float = 0.97
    chunk_size: float = 1.28e8
    disk_bandwidth: float = 1.3e8
    network_bandwidth: float = 1.25e8
    seek_time: float = 5.0e-3
    rotation_time: float = 4.17e-6
    disk_block_size: float = 8.0e3
    charge_rotation: bool = False

    def __post_init__(self) -> None:
        if self.replication_factor < 1:
            raise InvalidProfileError("replication_factor must be >= 1")
        if not 0.0 <= self.locality_probability <= 1.0:
            raise InvalidProfileError("locality_probability must be in [0, 1]")
        if self.chunk_size <= 0:
            raise InvalidProfileError("chunk_size must be > 0")
        if self.disk_bandwidth <= 0 or self.network_bandwidth <= 0:
            raise InvalidProfileError("bandwidths must be > 0")
        if self.seek_time < 0 or self.rotation_time < 0:
            raise InvalidProfileError("seek/rotation times must be >= 0")

    @property
    def seek_overhead(self) -> float:
        """Per-seek time charged by the model (rotation optional)."""
        if self.charge_rotation:
            return self.seek_time + self.rotation_time
        return self.seek_time

    def with_overrides(self, **kwargs) -> "SystemProfile":
        return replace(self, **kwargs)


DEFAULT_PROFILE = SystemProfile()


@dataclass(frozen=True)
class DerivedTimes:
    """Per-chunk transfer times: chunk_size / bandwidth."""

    time_disk: float
    time_net: float


@dataclass(frozen=True)
class CostEstimate:
    """One I/O cost: fractional chunks, integer seeks, their blend, seconds.

    `chunks` and `seeks` may be governed by different sizes (e.g. a scan
    transfers metadata re-reads but only seeks once per layout chunk), so
    seeks == ceil(chunks) is not guaranteed here.
    """

    chunks: float
    seeks: int
    weighted_cost: float
    seconds: float | None = None
    mode: Mode = "read"

    @classmethod
    def zero(cls, mode: Mode = "read") -> "CostEstimate":
        return cls(chunks=0.0, seeks=0, weighted_cost=0.0, seconds=0.0, mode=mode)


def derived_times(sys: SystemProfile) -> DerivedTimes:
    """Chunk transfer times over disk and network."""
    return DerivedTimes(
        time_disk=sys.chunk_size / sys.disk_bandwidth,
        time_net=sys.chunk_size / sys.network_bandwidth,
    )


def used_chunks(size: float, sys: SystemProfile) -> float:
    """Fractional chunk count of `size` bytes; exact quotient, not rounded."""
    if size < 0:
        raise ValueError("size must be >= 0")
    return size / sys.chunk_size


def seeks(size: float, sys: SystemProfile) -> int:
    """Seek count: one per chunk, even a partial one. 0 only for size 0."""
    return math.ceil(used_chunks(size, sys))


def _write_transfer_time(sys: SystemProfile) -> float:
    t = derived_times(sys)
    return t.time_disk + (sys.replication_factor - 1) * t.time_net


def _read_transfer_time(sys: SystemProfile) -> float:
    t = derived_times(sys)
    return t.time_disk + (1.0 - sys.locality_probability) * t.time_net


def write_transfer_weight(sys: SystemProfile) -> float:
    """Weight of transferring a chunk on write, vs. seeking to it.

    (t_disk + (R-1) * t_net) / (seek + t_disk + (R-1) * t_net); the R - 1
    copies are sequential, as in HDFS replication pipelines.
    """
    transfer = _write_transfer_time(sys)
    denom = sys.seek_overhead + transfer
    if denom == 0:
        raise InvalidProfileError("degenerate profile: zero seek and transfer time")
    return transfer / denom


def read_transfer_weight(sys: SystemProfile) -> float:
    """Weight of transferring a chunk on read; remote with probability 1 - p."""
    transfer = _read_transfer_time(sys)
    denom = sys.seek_overhead + transfer
    if denom == 0:
        raise InvalidProfileError("degenerate profile: zero seek and transfer time")
    return transfer / denom


def weighted_cost(chunks: float, seek_count: int, weight: float) -> float:
    """Blend chunk and seek counts: chunks * W + seeks * (1 - W)."""
    if chunks < 0 or seek_count < 0:
        raise ValueError("chunks and seeks must be >= 0")
    if not 0.0 <= weight <= 1.0:
        raise ValueError("weight must be in [0, 1]")
    return chunks * weight + seek_count * (1.0 - weight)


def write_cost(layout_size: float, sys: SystemProfile) -> CostEstimate:
    """Cost of writing `layout_size` bytes with replication."""
    chunks = used_chunks(layout_size, sys)
    n_seeks = seeks(layout_size, sys)
    cost = weighted_cost(chunks, n_seeks, write_transfer_weight(sys))
    secs = chunks * _write_transfer_time(sys) + n_seeks * sys.seek_overhead
    return CostEstimate(chunks=chunks, seeks=n_seeks, weighted_cost=cost,
                        seconds=secs, mode="write")


def read_estimate(chunks: float, seek_count: int, sys: SystemProfile) -> CostEstimate:
    """Assemble a read CostEstimate from already-derived chunk/seek counts."""
    cost = weighted_cost(chunks, seek_count, read_transfer_weight(sys))
    secs = chunks * _read_transfer_time(sys) + seek_count * sys.seek_overhead
    return CostEstimate(chunks=chunks, seeks=seek_count, weighted_cost=cost,
                        seconds=secs, mode="read")


def cost_to_seconds(est: CostEstimate, sys: SystemProfile, mode: Mode | None = None) -> float:
    """Unweight an estimate back to wall-clock seconds.

    Equals chunks * transfer_time(mode) + seeks * seek_time, i.e. the
    weighted cost multiplied by the weight denominator.
    """
    if mode is None:
        mode = est.mode
    elif mode != est.mode:
        raise ModeMismatchError(f"estimate is {est.mode!r}, asked for {mode!r}")
    transfer = _write_transfer_time(sys) if mode == "write" else _read_transfer_time(sys)
    return est.chunks * transfer + est.seeks * sys.seek_overhead
