"""Power draw, efficiency metrics, thermal-proxy dynamics with a
throttling fixed point, adaptive cross-chiplet DVFS, and dual-NPU load
rebalancing.

The thermal proxy theta is dimensionless and lives on the same scale as
the per-scenario throttle thresholds. Voltage affects power only (V^2),
never latency; latency effects are carried by the scenario efficiency
factor.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

from .params import ModelConstants, ScenarioParams, WorkloadModel
from .perf import LatencyBreakdown, batch_compute, latency_point

THETA_MAX = 2.0


class ConvergenceError(RuntimeError):
    """Thermal fixed point failed to converge within max_iter."""

    def __init__(self, msg: str, last_iterates: tuple[float, float]):
        super().__init__(f"{msg} (last iterates: theta={last_iterates[0]:.6f}"
                         f" -> {last_iterates[1]:.6f})")
        self.last_iterates = last_iterates


@dataclass(frozen=True)
class ThermalState:
    theta: float  # dimensionless thermal proxy, clamped to [0, 2]

    def __post_init__(self) -> None:
        if self.theta < 0:
            raise ValueError("theta must be >= 0")


@dataclass(frozen=True)
class DvfsPolicy:
    mode: str  # fixed | adaptive
    idle_voltage: float = 0.7
    util_cutoff: float = 0.65

    def __post_init__(self) -> None:
        if self.mode not in ("fixed", "adaptive"):
            raise ValueError("mode must be fixed or adaptive")
        if not 0 < self.idle_voltage <= 1:
            raise ValueError("idle_voltage must be in (0, 1]")

    @classmethod
    def from_constants(cls, mode: str, constants: ModelConstants) -> "DvfsPolicy":
        return cls(mode=mode, idle_voltage=constants.dvfs_idle_voltage,
                   util_cutoff=constants.dvfs_util_cutoff)


@dataclass(frozen=True)
class NpuSplit:
    """Load split between the two accelerator dies: ``phi`` is the share
    on NPU-0."""

    phi: float
    theta0: ThermalState
    theta1: ThermalState

    def __post_init__(self) -> None:
        if not 0 <= self.phi <= 1:
            raise ValueError("phi must be in [0, 1]")


@dataclass(frozen=True)
class SteadyPoint:
    """Converged self-consistent evaluation of one grid point."""

    breakdown: LatencyBreakdown
    power: float  # mW, averaged over the inference
    utilization: float
    theta: float
    iterations: int


def utilization(breakdown: LatencyBreakdown, workload: WorkloadModel,
                scenario: ScenarioParams, constants: ModelConstants) -> float:
    """Compute duty cycle over the whole inference.

    The busy numerator is pure compute (after the efficiency factor),
    excluding dispatch overhead; the denominator is total latency. Shares
    of on-die time are scale-invariant, so any noise factor applied to
    on-die time carries through automatically.
    """
    if breakdown.total <= 0:
        raise ValueError("breakdown.total must be > 0")
    compute = batch_compute(workload, breakdown.batch, constants.batch_model)
    compute_share = compute / (compute + constants.sched_overhead)
    u = breakdown.on_die * compute_share / breakdown.total
    return min(1.0, max(0.0, u))


def power_draw(scenario: ScenarioParams, breakdown: LatencyBreakdown,
               u: float, policy: DvfsPolicy) -> float:
    """Mean power in mW over one inference.

    Static and dynamic core power scale with the scenario voltage squared;
    link power is billed for the full transfer duration (streaming overlap
    hides time, not joules). Adaptive DVFS drops the idle-phase static
    voltage to ``idle_voltage`` whenever utilization is below the cutoff.
    """
    if not 0 <= u <= 1:
        raise ValueError("utilization must be in [0, 1]")
    p_static = scenario.base_power * scenario.static_power_ratio
    p_dyn = scenario.base_power * (1.0 - scenario.static_power_ratio) * u
    if policy.mode == "adaptive" and u < policy.util_cutoff:
        p_static = p_static * (u + (1.0 - u) * policy.idle_voltage ** 2)
    core = (p_static + p_dyn) * scenario.voltage_scale ** 2
    comm = 0.0
    if breakdown.total > 0:
        comm = (scenario.comm_power_rate
                * breakdown.comm_total / breakdown.total)
    return core + comm


def tops_per_watt(images_per_s: float, power_mw: float,
                  ops_per_image: float) -> float:
    """Efficiency in TOPS/W: (images/s * giga-ops * 1e-3) / watts."""
    if power_mw <= 0:
        raise ValueError("power must be > 0")
    return (images_per_s * ops_per_image * 1e-3) / (power_mw / 1000.0)


def energy_per_inference(power_mw: float, images_per_s: float) -> float:
    """Energy per inference in mJ: mW / (images/s)."""
    if images_per_s <= 0:
        raise ValueError("throughput must be > 0")
    return power_mw / images_per_s


def thermal_step(state: ThermalState, u: float, complexity_factor: float,
                 dt: float, tau: float) -> ThermalState:
    """First-order relaxation of the thermal proxy toward its drive
    u * complexity_factor, clamped to [0, 2]."""
    if dt <= 0:
        raise ValueError("dt must be > 0")
    target = u * complexity_factor
    theta = state.theta + (dt / tau) * (target - state.theta)
    return ThermalState(min(THETA_MAX, max(0.0, theta)))


def throttle_factor(theta: float, threshold: float, gain: float) -> float:
    """Slowdown factor: 1 below the threshold, then linear in the excess."""
    if gain < 0:
        raise ValueError("gain must be >= 0")
    return 1.0 + gain * max(0.0, theta - threshold)


def steady_point(scenario: ScenarioParams, workload: WorkloadModel,
                 constants: ModelConstants, batch: int,
                 policy: DvfsPolicy | None = None,
                 on_die_scale: float = 1.0) -> SteadyPoint:
    """Self-consistent (latency, throttle, power) for one grid point.

    Iterates latency -> utilization -> steady-state theta -> throttle
    factor until theta moves by less than fixed_point_tol. The map is a
    contraction for throttle gains <= 1 (a larger factor lowers
    utilization, which lowers theta), so plain iteration converges.
    """
    if policy is None:
        policy = DvfsPolicy.from_constants("fixed", constants)
    theta_prev: float | None = None
    theta = 0.0
    factor = 1.0
    converged = False
    iterations = 0
    for iterations in range(1, constants.fixed_point_max_iter + 1):
        bd = latency_point(scenario, workload, constants, batch,
                           throttle_factor=factor, on_die_scale=on_die_scale)
        u = utilization(bd, workload, scenario, constants)
        theta = min(THETA_MAX, u * workload.complexity_factor)
        if theta_prev is not None and abs(theta - theta_prev) < constants.fixed_point_tol:
            converged = True
            break
        theta_prev = theta
        factor = throttle_factor(theta, scenario.throttle_threshold,
                                 constants.throttle_gain)
    if not converged:
        raise ConvergenceError(
            f"thermal fixed point did not converge after "
            f"{constants.fixed_point_max_iter} iterations for "
            f"{scenario.name}/{workload.name}/B={batch}",
            (theta_prev if theta_prev is not None else 0.0, theta))
    # Re-evaluate once with the converged theta so the returned breakdown
    # satisfies the self-consistency equation to tolerance.
    factor = throttle_factor(theta, scenario.throttle_threshold,
                             constants.throttle_gain)
    bd = latency_point(scenario, workload, constants, batch,
                       throttle_factor=factor, on_die_scale=on_die_scale)
    u = utilization(bd, workload, scenario, constants)
    power = power_draw(scenario, bd, u, policy)
    return SteadyPoint(breakdown=bd, power=power, utilization=u,
                       theta=theta, iterations=iterations)


def rebalance(split: NpuSplit, smoothing: float = 0.1) -> NpuSplit:
    """Shift load toward the cooler NPU.

    The new NPU-0 share weights each die by the other die's headroom:
    phi' = (theta1 + c) / (theta0 + theta1 + 2c). Shares always sum to 1
    and swapping the two dies maps phi' to 1 - phi'.
    """
    t0, t1 = split.theta0.theta, split.theta1.theta
    phi = (t1 + smoothing) / (t0 + t1 + 2.0 * smoothing)
    return replace(split, phi=phi)
