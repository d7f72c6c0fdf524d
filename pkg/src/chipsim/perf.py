"""Deterministic latency core: batch-amortized compute, die-to-die
transfers with protocol overhead, streaming overlap, and compression.

All operations are pure functions; independent grid points can be
evaluated concurrently.
"""
from __future__ import annotations

from dataclasses import dataclass

from .params import ModelConstants, ScenarioParams, WorkloadModel


@dataclass(frozen=True)
class LatencyBreakdown:
    """One (scenario, workload, batch) latency decomposition.

    ``comm_total`` is the full transfer duration (used for energy);
    ``comm_exposed`` is the part left on the critical path after
    streaming overlap. The invariant
    ``total == on_die * throttle_factor + comm_exposed`` holds by
    construction.
    """

    on_die: float  # ms, compute + scheduling after efficiency factor
    comm_total: float  # ms
    comm_exposed: float  # ms, comm_total * (1 - overlap)
    throttle_factor: float  # >= 1
    total: float  # ms
    batch: int


def transfer_time(size_mb: float, bandwidth: float | None,
                  overhead: float, compression: float) -> float:
    """Transfer time in ms for ``size_mb`` megabytes over one link.

    1 Gbps moves 1 Mbit per ms, so time = size * 8 * compression /
    bandwidth, inflated by the protocol overhead. Unbounded bandwidth
    (monolithic) moves data on-die: zero.
    """
    if bandwidth is None:
        return 0.0
    if size_mb < 0:
        raise ValueError("size must be >= 0")
    return (size_mb * compression * 8.0 / bandwidth) * overhead


def hop_latency(scenario: ScenarioParams, hops: int) -> float:
    """Link-traversal latency in ms; zero for the monolithic case."""
    if hops < 1:
        raise ValueError("hops must be >= 1")
    if scenario.bandwidth is None:
        return 0.0
    return hops * scenario.link_latency / 1000.0


def batch_compute(workload: WorkloadModel, batch: int,
                  model: str = "asymptotic") -> float:
    """Total compute time (ms) for a batch of ``batch`` images.

    asymptotic (default): total = base * (B*e + 1 - e), so per-image
    compute falls from base at B=1 to base*e as B grows; higher batch
    efficiency means less batching benefit.

    amortizing (alternative reading): total = base * (1 + (B-1)*(1-e)),
    per-image compute falls toward base*(1-e); higher batch efficiency
    means more benefit.
    """
    if batch < 1:
        raise ValueError("batch must be >= 1")
    e = workload.batch_efficiency
    if model == "asymptotic":
        return workload.base_compute * (batch * e + 1.0 - e)
    if model == "amortizing":
        return workload.base_compute * (1.0 + (batch - 1) * (1.0 - e))
    raise ValueError(f"unknown batch model: {model!r}")


def on_die_time(scenario: ScenarioParams, workload: WorkloadModel,
                constants: ModelConstants, batch: int) -> float:
    """On-die execution time (ms): compute plus dispatch overhead, scaled
    by the scenario efficiency factor (which covers DVFS scaling and
    process differences for the whole on-die path)."""
    compute = batch_compute(workload, batch, constants.batch_model)
    return (compute + constants.sched_overhead) * scenario.efficiency_factor


def latency_point(scenario: ScenarioParams, workload: WorkloadModel,
                  constants: ModelConstants, batch: int,
                  throttle_factor: float = 1.0,
                  on_die_scale: float = 1.0) -> LatencyBreakdown:
    """Full latency breakdown for one grid point.

    ``throttle_factor`` comes from the thermal fixed point (1.0 for a
    throttle-free evaluation). ``on_die_scale`` is the multiplicative
    noise factor applied to on-die time by the sampling harness.
    """
    if throttle_factor < 1.0:
        raise ValueError("throttle_factor must be >= 1")
    on_die = on_die_time(scenario, workload, constants, batch) * on_die_scale
    comm_total = (hop_latency(scenario, constants.hops)
                  + transfer_time(batch * workload.input_size,
                                  scenario.bandwidth,
                                  scenario.protocol_overhead,
                                  scenario.compression_ratio))
    comm_exposed = comm_total * (1.0 - scenario.stream_overlap)
    total = on_die * throttle_factor + comm_exposed
    return LatencyBreakdown(
        on_die=on_die,
        comm_total=comm_total,
        comm_exposed=comm_exposed,
        throttle_factor=throttle_factor,
        total=total,
        batch=batch,
    )


def throughput(batch: int, latency_ms: float) -> float:
    """Images per second for a batch finishing in ``latency_ms``."""
    if latency_ms <= 0:
        raise ValueError("latency must be > 0")
    return batch * 1000.0 / latency_ms
