import dataclasses

import pytest

from chipsim.params import (ChipletSpec, ModelConstants, ScenarioParams,
                            SimConfig, Topology, WorkloadModel,
                            builtin_scenarios, builtin_topology,
                            builtin_workloads, default_config,
                            floorplan_check)


def by_name(items, name):
    return next(i for i in items if i.name == name)


class TestBuiltinScenarios:
    def test_exactly_four(self):
        assert len(builtin_scenarios()) == 4

    def test_basic_chiplet_values(self):
        s = by_name(builtin_scenarios(), "Basic Chiplet")
        assert s.link_latency == 1.5
        assert s.bandwidth == 16.0
        assert s.base_power == 1200.0
        assert s.comm_power_rate == 35.0
        assert s.efficiency_factor == 0.95
        assert s.throttle_threshold == 0.85
        assert s.static_power_ratio == 0.45
        assert s.voltage_scale == 1.0
        assert s.protocol_overhead == 1.15

    def test_monolithic_unbounded(self):
        s = by_name(builtin_scenarios(), "Monolithic SoC")
        assert s.bandwidth is None
        assert s.protocol_overhead == 1.0
        assert s.link_latency == 0.0
        assert s.comm_power_rate == 0.0

    def test_poor_integration_values(self):
        s = by_name(builtin_scenarios(), "Poor Integration")
        assert s.voltage_scale == 1.05
        assert s.protocol_overhead == 1.25
        assert s.link_latency == 8.0
        assert s.bandwidth == 8.0

    def test_overlap_and_compression_defaults(self):
        scenarios = builtin_scenarios()
        opt = by_name(scenarios, "AI-Optimized Chiplet")
        assert opt.stream_overlap == 0.6
        assert opt.compression_ratio == 1.0
        for s in scenarios:
            if s.name != "AI-Optimized Chiplet":
                assert s.stream_overlap == 0.0
                assert s.compression_ratio == 1.0

    def test_stable_across_calls(self):
        assert builtin_scenarios() == builtin_scenarios()
        assert builtin_workloads() == builtin_workloads()


class TestBuiltinWorkloads:
    @pytest.mark.parametrize("name,base,size,complexity,eff", [
        ("MobileNetV2", 3.5, 0.57, 0.8, 0.85),
        ("ResNet-50", 12.0, 0.57, 1.2, 0.90),
        ("Real-time Video", 2.0, 0.30, 1.0, 0.70),
    ])
    def test_values(self, name, base, size, complexity, eff):
        w = by_name(builtin_workloads(), name)
        assert w.base_compute == base
        assert w.input_size == size
        assert w.complexity_factor == complexity
        assert w.batch_efficiency == eff

    def test_exactly_three(self):
        assert len(builtin_workloads()) == 3


class TestInvariants:
    def test_unbounded_requires_zero_latency(self):
        with pytest.raises(ValueError, match="link_latency"):
            ScenarioParams("x", link_latency=1.0, bandwidth=None,
                           base_power=100, comm_power_rate=0,
                           efficiency_factor=1.0, throttle_threshold=0.9,
                           static_power_ratio=0.4, voltage_scale=1.0)

    def test_protocol_overhead_floor(self):
        with pytest.raises(ValueError, match="protocol_overhead"):
            ScenarioParams("x", 1.0, 16.0, 100, 10, 1.0, 0.9, 0.4, 1.0,
                           protocol_overhead=0.9)

    def test_static_ratio_open_interval(self):
        for bad in (0.0, 1.0):
            with pytest.raises(ValueError, match="static_power_ratio"):
                ScenarioParams("x", 1.0, 16.0, 100, 10, 1.0, 0.9, bad, 1.0)

    def test_workload_batch_efficiency_bounds(self):
        with pytest.raises(ValueError, match="batch_efficiency"):
            WorkloadModel("w", 1.0, 0.5, 1.0, 0.0)
        with pytest.raises(ValueError, match="batch_efficiency"):
            WorkloadModel("w", 1.0, 0.5, 1.0, 1.5)

    def test_zero_interposer_rejected(self):
        chip = ChipletSpec("c", 1.0, 1.0, process_node=7)
        with pytest.raises(ValueError, match="interposer"):
            Topology(0.0, 10.0, (chip,))

    def test_empty_chiplet_list_rejected(self):
        with pytest.raises(ValueError, match="non-empty"):
            Topology(10.0, 10.0, ())

    def test_constants_positive(self):
        with pytest.raises(ValueError, match="hops"):
            ModelConstants(hops=0)
        with pytest.raises(ValueError, match="sched_overhead"):
            ModelConstants(sched_overhead=0.0)

    def test_config_duplicate_batches(self):
        c = default_config()
        with pytest.raises(ValueError, match="dedup"):
            dataclasses.replace(c, batch_sizes=(1, 2, 2))

    def test_config_needs_scenarios(self):
        c = default_config()
        with pytest.raises(ValueError, match="at least one scenario"):
            dataclasses.replace(c, scenarios=())


class TestFloorplan:
    def test_reference_topology_passes(self):
        # 25 + 24 + 24 + 121 + 21 + 6 = 221 mm2 of dies on a 900 mm2
        # interposer with a 0.8 fill limit (720 mm2 budget).
        topo = builtin_topology()
        report = floorplan_check(topo)
        assert report.passed
        assert report.total_area == pytest.approx(221.0)
        assert report.budget == pytest.approx(720.0)
        assert report.excess == 0.0

    def test_small_interposer_violates(self):
        topo = dataclasses.replace(builtin_topology(),
                                   interposer_width=10.0,
                                   interposer_height=10.0)
        report = floorplan_check(topo)
        assert not report.passed
        assert report.total_area == pytest.approx(221.0)
        assert report.budget == pytest.approx(80.0)
        assert report.excess == pytest.approx(141.0)
        assert "VIOLATION" in str(report)

    def test_monotone_adding_chiplet(self):
        # Adding a die never turns a violation into a pass.
        topo = builtin_topology()
        grown = dataclasses.replace(
            topo, chiplets=topo.chiplets + (
                ChipletSpec("extra", 30.0, 25.0, process_node=7),))
        assert floorplan_check(topo).passed
        assert not floorplan_check(grown).passed
        shrunk = dataclasses.replace(grown, interposer_width=5.0,
                                     interposer_height=5.0)
        assert not floorplan_check(shrunk).passed


class TestDefaultConfig:
    def test_grid_shape(self):
        c = default_config()
        assert len(c.scenarios) == 4
        assert len(c.workloads) == 3
        assert c.batch_sizes == (1, 2, 4, 8, 16, 32)
        assert c.samples_per_point == 100
        assert c.noise_sigma == 0.05
        assert c.realtime_budget == 5.0

    def test_constants_defaults(self):
        k = default_config().constants
        assert k.sched_overhead == 1.2
        assert k.hops == 2
        assert k.ops_per_image == 1.0
        assert k.throttle_gain == 0.5
        assert k.thermal_time_constant == 50.0
        assert k.dvfs_idle_voltage == 0.7
        assert k.dvfs_util_cutoff == 0.65
        assert k.fixed_point_tol == 1e-4
        assert k.fixed_point_max_iter == 20

    def test_topology_metadata(self):
        topo = default_config().topology
        assert topo.hbm_bandwidth == 819.0
        roles = sorted(c.role for c in topo.chiplets)
        assert roles == ["cpu", "io_power", "memory", "npu", "npu",
                         "security"]
