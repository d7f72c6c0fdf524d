"""chipsim: analytic simulator for chiplet-based edge-AI SoC
design-space exploration."""

from .params import (ChipletSpec, CostSettings, FloorplanReport,
                     ModelConstants, ScenarioParams, SimConfig, Topology,
                     WorkloadModel, builtin_scenarios, builtin_topology,
                     builtin_workloads, default_config, floorplan_check)
from .config import ConfigError, parse_config, render_config
from .perf import (LatencyBreakdown, batch_compute, hop_latency,
                   latency_point, on_die_time, throughput, transfer_time)
from .power import (ConvergenceError, DvfsPolicy, NpuSplit, SteadyPoint,
                    ThermalState, energy_per_inference, power_draw,
                    rebalance, steady_point, thermal_step, throttle_factor,
                    tops_per_watt, utilization)
from .yieldcost import (CostComparison, CostInput, DieCostRow, YieldInput,
                        chiplet_vs_monolithic, cost_per_good_die,
                        dies_per_wafer, yield_estimate)
from .harness import (GridError, ImprovementReport, RunStats, emit_results,
                      improvements, parse_results, realtime_table, run_grid,
                      run_point)
from .plotdata import build_plot_bundle, emit_plotdata

__version__ = "0.1.0"
