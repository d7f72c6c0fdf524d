"""Domain types, built-in parameter sets, and floorplan validation.

All types are frozen dataclasses: immutable after construction and safe to
share across any number of concurrent workers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

CHIPLET_ROLES = frozenset({"cpu", "npu", "memory", "io_power", "security"})

BATCH_MODELS = ("asymptotic", "amortizing")
DVFS_MODES = ("fixed", "adaptive")


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ValueError(msg)


@dataclass(frozen=True)
class ScenarioParams:
    """Per-scenario interconnect, power, and thermal constants.

    ``bandwidth`` is Gbps, or None for an unbounded on-die path (the
    monolithic degenerate case: no die-to-die hop exists, so link latency
    and communication power must both be zero).
    """

    name: str
    link_latency: float  # microseconds per hop
    bandwidth: float | None  # Gbps; None = unbounded
    base_power: float  # mW
    comm_power_rate: float  # mW per ms of active transfer
    efficiency_factor: float  # multiplier on on-die time; lower is faster
    throttle_threshold: float  # thermal-proxy limit, dimensionless
    static_power_ratio: float  # fraction of base power that is static
    voltage_scale: float  # supply-voltage multiplier; power scales with V^2
    protocol_overhead: float = 1.0  # multiplier on transfer time, >= 1
    stream_overlap: float = 0.0  # fraction of comm latency hidden by compute
    compression_ratio: float = 1.0  # fraction of bytes actually moved

    def __post_init__(self) -> None:
        _require(bool(self.name), "scenario name must be non-empty")
        _require(self.bandwidth is None or self.bandwidth > 0,
                 "bandwidth must be > 0 or unbounded")
        _require(self.link_latency >= 0, "link_latency must be >= 0")
        _require(self.base_power >= 0, "base_power must be >= 0")
        _require(self.comm_power_rate >= 0, "comm_power_rate must be >= 0")
        _require(self.efficiency_factor > 0, "efficiency_factor must be > 0")
        _require(0 <= self.throttle_threshold <= 1.5,
                 "throttle_threshold must be in [0, 1.5]")
        _require(0 < self.static_power_ratio < 1,
                 "static_power_ratio must be in (0, 1)")
        _require(self.voltage_scale > 0, "voltage_scale must be > 0")
        _require(self.protocol_overhead >= 1,
                 "protocol_overhead must be >= 1")
        _require(0 <= self.stream_overlap <= 1,
                 "stream_overlap must be in [0, 1]")
        _require(0 < self.compression_ratio <= 1,
                 "compression_ratio must be in (0, 1]")
        if self.bandwidth is None:
            _require(self.link_latency == 0,
                     "unbounded bandwidth requires link_latency = 0")
            _require(self.comm_power_rate == 0,
                     "unbounded bandwidth requires comm_power_rate = 0")


@dataclass(frozen=True)
class WorkloadModel:
    """Analytic model of one inference workload."""

    name: str
    base_compute: float  # ms at batch 1 on the reference scenario
    input_size: float  # MB per image
    complexity_factor: float  # thermal-intensity multiplier
    batch_efficiency: float  # asymptotic per-image compute fraction

    def __post_init__(self) -> None:
        _require(bool(self.name), "workload name must be non-empty")
        _require(self.base_compute > 0, "base_compute must be > 0")
        _require(self.input_size >= 0, "input_size must be >= 0")
        _require(self.complexity_factor > 0, "complexity_factor must be > 0")
        _require(0 < self.batch_efficiency <= 1,
                 "batch_efficiency must be in (0, 1]")


@dataclass(frozen=True)
class ChipletSpec:
    name: str
    width: float  # mm
    height: float  # mm
    process_node: int  # nm
    peak_tops: float = 0.0  # INT8 TOPS, 0 if non-compute
    role: str = "cpu"

    def __post_init__(self) -> None:
        _require(self.width > 0 and self.height > 0,
                 "chiplet width and height must be > 0")
        _require(self.process_node > 0, "process_node must be > 0")
        _require(self.peak_tops >= 0, "peak_tops must be >= 0")
        _require(self.role in CHIPLET_ROLES,
                 f"role must be one of {sorted(CHIPLET_ROLES)}")

    @property
    def area(self) -> float:
        return self.width * self.height


@dataclass(frozen=True)
class Topology:
    """Interposer dimensions plus the set of dies placed on it.

    ``hbm_bandwidth`` (GB/s per stack) is descriptive metadata only; the
    latency model has no intra-package memory-channel term.
    """

    interposer_width: float  # mm
    interposer_height: float  # mm
    chiplets: tuple[ChipletSpec, ...]
    fill_limit: float = 0.8  # usable fraction of interposer area
    hbm_bandwidth: float = 819.0  # GB/s per stack, descriptive only

    def __post_init__(self) -> None:
        _require(self.interposer_width > 0 and self.interposer_height > 0,
                 "interposer dimensions must be > 0")
        _require(len(self.chiplets) > 0, "chiplet list must be non-empty")
        _require(0 < self.fill_limit <= 1, "fill_limit must be in (0, 1]")
        _require(self.hbm_bandwidth >= 0, "hbm_bandwidth must be >= 0")

    @property
    def interposer_area(self) -> float:
        return self.interposer_width * self.interposer_height


@dataclass(frozen=True)
class ModelConstants:
    """Every model constant that is not a per-scenario or per-workload
    parameter. Defaults are calibrated against the built-in scenario set
    (see README, "Model constants")."""

    sched_overhead: float = 1.2  # ms per batch dispatch
    hops: int = 2  # link traversals per inference (request + result)
    ops_per_image: float = 1.0  # giga-ops
    throttle_gain: float = 0.5  # slowdown per unit of threshold excess
    thermal_time_constant: float = 50.0  # ms
    dvfs_idle_voltage: float = 0.7  # idle-phase voltage fraction
    dvfs_util_cutoff: float = 0.65  # adaptive DVFS engages below this
    fixed_point_tol: float = 1e-4
    fixed_point_max_iter: int = 20
    batch_model: str = "asymptotic"  # or "amortizing"

    def __post_init__(self) -> None:
        _require(self.sched_overhead > 0, "sched_overhead must be > 0")
        _require(self.hops >= 1, "hops must be >= 1")
        _require(self.ops_per_image > 0, "ops_per_image must be > 0")
        _require(self.throttle_gain >= 0, "throttle_gain must be >= 0")
        _require(self.thermal_time_constant > 0,
                 "thermal_time_constant must be > 0")
        _require(0 < self.dvfs_idle_voltage <= 1,
                 "dvfs_idle_voltage must be in (0, 1]")
        _require(0 < self.dvfs_util_cutoff <= 1,
                 "dvfs_util_cutoff must be in (0, 1]")
        _require(self.fixed_point_tol > 0, "fixed_point_tol must be > 0")
        _require(self.fixed_point_max_iter >= 1,
                 "fixed_point_max_iter must be >= 1")
        _require(self.batch_model in BATCH_MODELS,
                 f"batch_model must be one of {BATCH_MODELS}")


@dataclass(frozen=True)
class CostSettings:
    """Inputs for the yield/cost comparison (all user-settable; the
    defect density default is back-solved, not measured)."""

    wafer_cost: float = 10000.0
    wafer_diameter: float = 300.0  # mm
    test_cost_per_die: float = 0.0
    packaging_cost: float = 50.0
    interposer_cost: float = 30.0
    defect_density: float = 0.51  # defects per cm^2
    alpha: float = 3.0  # clustering parameter (negative binomial)
    model: str = "poisson"  # poisson | murphy | neg_binomial
    d0_interposer: float = 0.05  # defects per cm^2 on the passive interposer
    monolithic_area: float = 360.0  # mm^2

    def __post_init__(self) -> None:
        for f in ("wafer_cost", "wafer_diameter", "test_cost_per_die",
                  "packaging_cost", "interposer_cost", "defect_density",
                  "d0_interposer", "monolithic_area"):
            _require(getattr(self, f) >= 0, f"{f} must be >= 0")
        _require(self.alpha > 0, "alpha must be > 0")
        _require(self.model in ("poisson", "murphy", "neg_binomial"),
                 "model must be poisson, murphy, or neg_binomial")


@dataclass(frozen=True)
class SimConfig:
    scenarios: tuple[ScenarioParams, ...]
    workloads: tuple[WorkloadModel, ...]
    batch_sizes: tuple[int, ...]
    topology: Topology
    constants: ModelConstants = field(default_factory=ModelConstants)
    cost: CostSettings = field(default_factory=CostSettings)
    seed: int = 42
    samples_per_point: int = 100
    noise_sigma: float = 0.05  # relative std-dev of on-die time
    realtime_budget: float = 5.0  # ms
    dvfs_mode: str = "fixed"

    def __post_init__(self) -> None:
        _require(len(self.scenarios) > 0, "at least one scenario required")
        _require(len(self.workloads) > 0, "at least one workload required")
        _require(len(self.batch_sizes) > 0, "at least one batch size required")
        _require(all(b >= 1 for b in self.batch_sizes),
                 "batch sizes must be strictly positive")
        _require(len(set(self.batch_sizes)) == len(self.batch_sizes),
                 "batch sizes must be deduplicated")
        _require(0 <= self.seed < 2 ** 64,
                 "seed must fit in 64 unsigned bits")
        _require(self.samples_per_point >= 1, "samples_per_point must be >= 1")
        _require(self.noise_sigma >= 0, "noise_sigma must be >= 0")
        _require(self.realtime_budget > 0, "realtime_budget must be > 0")
        _require(self.dvfs_mode in DVFS_MODES,
                 f"dvfs_mode must be one of {DVFS_MODES}")
        names = [s.name for s in self.scenarios]
        _require(len(set(names)) == len(names), "duplicate scenario name")
        wnames = [w.name for w in self.workloads]
        _require(len(set(wnames)) == len(wnames), "duplicate workload name")

    def scenario(self, name: str) -> ScenarioParams:
        for s in self.scenarios:
            if s.name == name:
                return s
        raise KeyError(f"unknown scenario: {name!r}")

    def workload(self, name: str) -> WorkloadModel:
        for w in self.workloads:
            if w.name == name:
                return w
        raise KeyError(f"unknown workload: {name!r}")


@dataclass(frozen=True)
class FloorplanReport:
    """Result of a floorplan feasibility check. A violation is a value,
    not an exception."""

    passed: bool
    total_area: float  # mm^2, sum of die areas
    budget: float  # mm^2, fill_limit * interposer area
    excess: float  # mm^2, max(0, total - budget)

    def __str__(self) -> str:
        if self.passed:
            return (f"floorplan OK: {self.total_area:.1f} mm2 of dies within "
                    f"{self.budget:.1f} mm2 budget")
        return (f"floorplan VIOLATION: {self.total_area:.1f} mm2 of dies "
                f"exceeds {self.budget:.1f} mm2 budget by {self.excess:.1f} mm2")


def builtin_scenarios() -> list[ScenarioParams]:
    """The four built-in integration scenarios.

    The monolithic SoC has an unbounded on-die path (no die-to-die link),
    so its protocol overhead is 1.0 by construction. Streaming overlap and
    compression default to off everywhere except the AI-optimized design,
    whose overlap fraction of 0.6 is the single interconnect calibration
    knob.
    """
    return [
        ScenarioParams(
            name="Monolithic SoC", link_latency=0.0, bandwidth=None,
            base_power=1500.0, comm_power_rate=0.0, efficiency_factor=1.0,
            throttle_threshold=0.95, static_power_ratio=0.40,
            voltage_scale=1.0, protocol_overhead=1.0,
            stream_overlap=0.0, compression_ratio=1.0),
        ScenarioParams(
            name="Basic Chiplet", link_latency=1.5, bandwidth=16.0,
            base_power=1200.0, comm_power_rate=35.0, efficiency_factor=0.95,
            throttle_threshold=0.85, static_power_ratio=0.45,
            voltage_scale=1.0, protocol_overhead=1.15,
            stream_overlap=0.0, compression_ratio=1.0),
        ScenarioParams(
            name="AI-Optimized Chiplet", link_latency=0.8, bandwidth=24.0,
            base_power=1100.0, comm_power_rate=25.0, efficiency_factor=0.90,
            throttle_threshold=0.80, static_power_ratio=0.42,
            voltage_scale=0.95, protocol_overhead=1.08,
            stream_overlap=0.6, compression_ratio=1.0),
        ScenarioParams(
            name="Poor Integration", link_latency=8.0, bandwidth=8.0,
            base_power=1800.0, comm_power_rate=80.0, efficiency_factor=1.10,
            throttle_threshold=1.00, static_power_ratio=0.50,
            voltage_scale=1.05, protocol_overhead=1.25,
            stream_overlap=0.0, compression_ratio=1.0),
    ]


def builtin_workloads() -> list[WorkloadModel]:
    """The three built-in edge-inference workload models."""
    return [
        WorkloadModel("MobileNetV2", base_compute=3.5, input_size=0.57,
                      complexity_factor=0.8, batch_efficiency=0.85),
        WorkloadModel("ResNet-50", base_compute=12.0, input_size=0.57,
                      complexity_factor=1.2, batch_efficiency=0.90),
        WorkloadModel("Real-time Video", base_compute=2.0, input_size=0.30,
                      complexity_factor=1.0, batch_efficiency=0.70),
    ]


def builtin_topology() -> Topology:
    """Reference floorplan: 30 mm x 30 mm interposer with a RISC-V CPU,
    two NPUs, an HBM3 stack (footprint is a placeholder the user should
    set), an I/O + power-management die, and a security controller."""
    return Topology(
        interposer_width=30.0, interposer_height=30.0,
        chiplets=(
            ChipletSpec("RISC-V CPU", 5.0, 5.0, process_node=7, role="cpu"),
            ChipletSpec("NPU-0", 6.0, 4.0, process_node=5,
                        peak_tops=15.0, role="npu"),
            ChipletSpec("NPU-1", 6.0, 4.0, process_node=5,
                        peak_tops=15.0, role="npu"),
            ChipletSpec("HBM3 Stack", 11.0, 11.0, process_node=10,
                        role="memory"),
            ChipletSpec("IO-PMIC", 7.0, 3.0, process_node=12,
                        role="io_power"),
            ChipletSpec("Security", 3.0, 2.0, process_node=12,
                        role="security"),
        ),
    )


def default_config() -> SimConfig:
    """Full built-in configuration: the 4 x 3 x {1..32} grid."""
    return SimConfig(
        scenarios=tuple(builtin_scenarios()),
        workloads=tuple(builtin_workloads()),
        batch_sizes=(1, 2, 4, 8, 16, 32),
        topology=builtin_topology(),
    )


def floorplan_check(topology: Topology) -> FloorplanReport:
    """Pass iff the summed die area fits in the usable interposer area."""
    total = math.fsum(c.area for c in topology.chiplets)
    budget = topology.fill_limit * topology.interposer_area
    return FloorplanReport(
        passed=total <= budget,
        total_area=total,
        budget=budget,
        excess=max(0.0, total - budget),
    )
