import dataclasses
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chipsim.params import ModelConstants, builtin_scenarios, builtin_workloads
from chipsim.perf import latency_point
from chipsim.power import (ConvergenceError, DvfsPolicy, NpuSplit,
                           ThermalState, energy_per_inference, power_draw,
                           rebalance, steady_point, thermal_step,
                           throttle_factor, tops_per_watt, utilization)

CONSTANTS = ModelConstants()
FIXED = DvfsPolicy("fixed")
ADAPTIVE = DvfsPolicy("adaptive")


def scenario(name):
    return next(s for s in builtin_scenarios() if s.name == name)


def workload(name):
    return next(w for w in builtin_workloads() if w.name == name)


def breakdown(sname, wname, batch=1, factor=1.0):
    return latency_point(scenario(sname), workload(wname), CONSTANTS,
                         batch, throttle_factor=factor)


class TestUtilization:
    def test_monolithic_mobilenet(self):
        bd = breakdown("Monolithic SoC", "MobileNetV2")
        u = utilization(bd, workload("MobileNetV2"),
                        scenario("Monolithic SoC"), CONSTANTS)
        assert u == pytest.approx(3.5 / 4.7)

    def test_ai_optimized_mobilenet(self):
        bd = breakdown("AI-Optimized Chiplet", "MobileNetV2")
        u = utilization(bd, workload("MobileNetV2"),
                        scenario("AI-Optimized Chiplet"), CONSTANTS)
        assert u == pytest.approx(3.15 / 4.31272)

    def test_clamped_to_unit_interval(self):
        bd = breakdown("Basic Chiplet", "ResNet-50", batch=32)
        u = utilization(bd, workload("ResNet-50"),
                        scenario("Basic Chiplet"), CONSTANTS)
        assert 0.0 <= u <= 1.0


class TestPowerDraw:
    def test_monolithic_mobilenet_fixed(self):
        bd = breakdown("Monolithic SoC", "MobileNetV2")
        u = 3.5 / 4.7
        p = power_draw(scenario("Monolithic SoC"), bd, u, FIXED)
        assert p == pytest.approx(600 + 900 * u)

    def test_idle_floor(self):
        s = scenario("Basic Chiplet")
        bd = dataclasses.replace(breakdown("Basic Chiplet", "MobileNetV2"),
                                 comm_total=0.0, comm_exposed=0.0)
        p = power_draw(s, bd, 0.0, FIXED)
        assert p == pytest.approx(
            s.base_power * s.static_power_ratio * s.voltage_scale ** 2)

    def test_ai_optimized_mobilenet_fixed(self):
        bd = breakdown("AI-Optimized Chiplet", "MobileNetV2")
        u = 3.15 / bd.total
        p = power_draw(scenario("AI-Optimized Chiplet"), bd, u, FIXED)
        expected = ((462 + 638 * u) * 0.95 ** 2
                    + 25 * bd.comm_total / bd.total)
        assert p == pytest.approx(expected)
        assert p == pytest.approx(838.7, abs=0.2)

    @settings(max_examples=300)
    @given(st.floats(0.0, 1.0), st.floats(0.0, 1.0),
           st.sampled_from(["Monolithic SoC", "Basic Chiplet",
                            "AI-Optimized Chiplet", "Poor Integration"]))
    def test_adaptive_never_worse(self, u, _pad, name):
        bd = breakdown(name, "MobileNetV2")
        s = scenario(name)
        assert (power_draw(s, bd, u, ADAPTIVE)
                <= power_draw(s, bd, u, FIXED) + 1e-12)

    def test_adaptive_saving_on_low_util_video(self):
        # Monolithic video point: u = 2.0/3.2 = 0.625 < cutoff 0.65.
        bd = breakdown("Monolithic SoC", "Real-time Video")
        u = utilization(bd, workload("Real-time Video"),
                        scenario("Monolithic SoC"), CONSTANTS)
        assert u < 0.65
        p_fixed = power_draw(scenario("Monolithic SoC"), bd, u, FIXED)
        p_adapt = power_draw(scenario("Monolithic SoC"), bd, u, ADAPTIVE)
        assert (p_fixed - p_adapt) / p_fixed >= 0.08

    @settings(max_examples=300)
    @given(st.floats(0.01, 1.0), st.floats(0.01, 0.99),
           st.floats(0.5, 1.5))
    def test_power_floor_and_v2_scaling(self, u, ratio, vscale):
        s = dataclasses.replace(scenario("Basic Chiplet"),
                                static_power_ratio=ratio,
                                voltage_scale=vscale)
        bd = breakdown("Basic Chiplet", "MobileNetV2")
        p = power_draw(s, bd, u, FIXED)
        assert p >= s.base_power * ratio * vscale ** 2 - 1e-9
        doubled_v = dataclasses.replace(s, voltage_scale=vscale * 2)
        core = p - s.comm_power_rate * bd.comm_total / bd.total
        core4 = (power_draw(doubled_v, bd, u, FIXED)
                 - s.comm_power_rate * bd.comm_total / bd.total)
        assert core4 == pytest.approx(4 * core)

    @settings(max_examples=200)
    @given(st.floats(0.0, 0.99), st.floats(0.001, 0.01))
    def test_fixed_power_increasing_in_u(self, u, du):
        s = scenario("Poor Integration")
        bd = breakdown("Poor Integration", "MobileNetV2")
        assert (power_draw(s, bd, u + du, FIXED)
                > power_draw(s, bd, u, FIXED))


class TestEfficiencyMetrics:
    def test_tops_per_watt_paper_values(self):
        assert tops_per_watt(244, 860, 1.0) == pytest.approx(0.2837, abs=5e-4)
        assert tops_per_watt(208, 1026, 1.0) == pytest.approx(0.2027, abs=5e-4)

    def test_zero_throughput(self):
        assert tops_per_watt(0.0, 500.0, 1.0) == 0.0

    @given(st.floats(1.0, 1e4), st.floats(1.0, 1e4), st.floats(0.1, 10.0))
    def test_algebraic_identity(self, thr, p_mw, ops):
        tpw = tops_per_watt(thr, p_mw, ops)
        assert tpw * (p_mw / 1000.0) == pytest.approx(thr * ops * 1e-3)

    def test_energy_paper_value(self):
        assert energy_per_inference(860, 244) == pytest.approx(3.52, abs=0.01)

    def test_energy_reference_point(self):
        assert energy_per_inference(838.7, 231.9) == pytest.approx(3.62,
                                                                   abs=0.01)

    @given(st.floats(1.0, 5e3), st.floats(0.1, 100.0), st.integers(1, 64))
    def test_energy_is_power_times_latency_per_image(self, p, lat, b):
        thr = b * 1000.0 / lat
        assert energy_per_inference(p, thr) == pytest.approx(p * lat / b / 1000)


class TestThermal:
    def test_zero_stays_zero(self):
        s = ThermalState(0.0)
        assert thermal_step(s, 0.0, 1.0, dt=10, tau=50).theta == 0.0

    def test_steady_state_resnet_ai_optimized(self):
        # theta* = u * complexity = 0.903 * 1.2
        s = ThermalState(0.903 * 1.2)
        s2 = thermal_step(s, 0.903, 1.2, dt=5, tau=50)
        assert s2.theta == pytest.approx(1.0836, abs=1e-4)

    def test_relaxation_toward_target(self):
        s = ThermalState(0.0)
        for _ in range(500):
            s = thermal_step(s, 0.745, 0.8, dt=5, tau=50)
        assert s.theta == pytest.approx(0.596, abs=1e-3)
        assert s.theta < 0.95  # below the monolithic threshold: no throttle

    def test_clamped_at_two(self):
        s = ThermalState(1.9)
        for _ in range(100):
            s = thermal_step(s, 1.0, 5.0, dt=50, tau=50)
        assert s.theta == 2.0


class TestThrottleFactor:
    def test_below_threshold(self):
        assert throttle_factor(0.5, 0.85, 0.5) == 1.0

    def test_above_threshold(self):
        assert throttle_factor(1.083, 0.80, 0.5) == pytest.approx(1.1415)

    def test_disabled(self):
        assert throttle_factor(1.5, 0.5, 0.0) == 1.0

    @given(st.floats(0.0, 2.0), st.floats(0.0, 1.5))
    def test_continuous_piecewise_linear(self, theta, thr):
        eps = 1e-6
        f1 = throttle_factor(theta, thr, 0.5)
        f2 = throttle_factor(theta + eps, thr, 0.5)
        assert abs(f2 - f1) <= 0.5 * eps + 1e-12
        assert f1 >= 1.0


class TestSteadyPoint:
    def test_mobilenet_never_throttles(self):
        for s in builtin_scenarios():
            pt = steady_point(s, workload("MobileNetV2"), CONSTANTS, 1)
            assert pt.breakdown.throttle_factor == 1.0

    def test_resnet_ai_optimized_throttles(self):
        pt = steady_point(scenario("AI-Optimized Chiplet"),
                          workload("ResNet-50"), CONSTANTS, 1)
        assert pt.breakdown.throttle_factor > 1.0
        assert pt.breakdown.total > 11.96

    def test_resnet_ai_optimized_closed_form_oracle(self):
        # Independent oracle: with theta above threshold the fixed point
        # solves g*theta^2 + h*theta - k = 0 for
        #   g = on_die * gain * complexity_shadow ... worked through:
        #   theta * (on_die*(1 - gain*thr) + comm_exposed
        #            + on_die*gain*theta) = complexity * busy
        w = workload("ResNet-50")
        on_die = (12.0 + 1.2) * 0.9
        busy = 12.0 * 0.9
        comm_exposed = (2 * 0.8 / 1000 + 0.57 * 8 / 24 * 1.08) * 0.4
        gain, thr, cx = 0.5, 0.80, 1.2
        a = on_die * gain
        b = on_die * (1 - gain * thr) + comm_exposed
        k = cx * busy
        theta = (-b + math.sqrt(b * b + 4 * a * k)) / (2 * a)
        pt = steady_point(scenario("AI-Optimized Chiplet"), w, CONSTANTS, 1)
        assert pt.theta == pytest.approx(theta, abs=5e-4)
        factor = 1 + gain * (theta - thr)
        assert pt.breakdown.total == pytest.approx(
            on_die * factor + comm_exposed, abs=5e-3)

    def test_self_consistency(self):
        pt = steady_point(scenario("AI-Optimized Chiplet"),
                          workload("ResNet-50"), CONSTANTS, 1)
        implied = throttle_factor(
            pt.utilization * workload("ResNet-50").complexity_factor,
            scenario("AI-Optimized Chiplet").throttle_threshold,
            CONSTANTS.throttle_gain)
        assert pt.breakdown.throttle_factor == pytest.approx(implied,
                                                             abs=2e-4)

    def test_zero_gain_matches_throttle_free(self):
        k0 = dataclasses.replace(CONSTANTS, throttle_gain=0.0)
        for s in builtin_scenarios():
            for w in builtin_workloads():
                for b in (1, 8, 32):
                    pt = steady_point(s, w, k0, b)
                    free = latency_point(s, w, k0, b)
                    assert pt.breakdown.total == pytest.approx(free.total)

    def test_nonconvergence_reports_iterates(self):
        # A huge gain with a tiny iteration budget cannot settle.
        bad = dataclasses.replace(CONSTANTS, throttle_gain=0.9,
                                  fixed_point_max_iter=2,
                                  fixed_point_tol=1e-12)
        with pytest.raises(ConvergenceError, match="last iterates"):
            steady_point(scenario("AI-Optimized Chiplet"),
                         workload("ResNet-50"), bad, 1)


class TestRebalance:
    def test_symmetric_split(self):
        split = NpuSplit(0.7, ThermalState(0.8), ThermalState(0.8))
        assert rebalance(split).phi == pytest.approx(0.5)

    def test_hot_npu_sheds_load(self):
        split = NpuSplit(0.5, ThermalState(1.0), ThermalState(0.5))
        assert rebalance(split).phi == pytest.approx(0.6 / 1.7)

    @given(st.floats(0.0, 2.0), st.floats(0.0, 2.0))
    def test_swap_symmetry_and_conservation(self, t0, t1):
        split = NpuSplit(0.5, ThermalState(t0), ThermalState(t1))
        swapped = NpuSplit(0.5, ThermalState(t1), ThermalState(t0))
        phi = rebalance(split).phi
        assert 0.0 <= phi <= 1.0
        assert rebalance(swapped).phi == pytest.approx(1.0 - phi)

    def test_convergence_with_thermal_steps(self):
        # Heat drive proportional to load share; repeated rebalance plus
        # relaxation equalizes the two dies.
        split = NpuSplit(0.9, ThermalState(1.2), ThermalState(0.1))
        drive = 0.8
        for _ in range(400):
            split = rebalance(split)
            t0 = thermal_step(split.theta0, 2 * split.phi * drive, 1.0,
                              dt=5, tau=50)
            t1 = thermal_step(split.theta1, 2 * (1 - split.phi) * drive,
                              1.0, dt=5, tau=50)
            split = NpuSplit(split.phi, t0, t1)
        assert abs(split.theta0.theta - split.theta1.theta) <= 0.01
