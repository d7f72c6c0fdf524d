"""Plot-data bundles: six self-describing series groups (panels a-f)
consumable by any plotting tool. No rendering happens here."""
from __future__ import annotations

import json
from dataclasses import asdict

from .harness import ImprovementReport, RunStats, find_stats


class PlotDataError(ValueError):
    """A panel's required result rows are missing."""


def _source(r: RunStats) -> dict:
    return {"scenario": r.scenario, "workload": r.workload, "batch": r.batch}


def build_plot_bundle(stats: list[RunStats],
                      improvement: ImprovementReport,
                      realtime: list[tuple[str, float, bool]],
                      realtime_scenario: str,
                      budget: float,
                      reference_workload: str = "MobileNetV2") -> dict:
    """Assemble panels (a)-(f) from result rows.

    (a) batch-1 latency bars with std whiskers, (b) throughput vs batch
    curves, (c) batch-1 power bars, (d) batch-1 latency per workload,
    (e) improvement bars, (f) real-time pass/fail per workload. Every
    series cites the rows it was derived from.
    """
    scenarios = sorted({r.scenario for r in stats})
    workloads = sorted({r.workload for r in stats})
    batches = sorted({r.batch for r in stats})
    if reference_workload not in workloads:
        raise PlotDataError(
            f"panel (a): no rows for workload {reference_workload!r}")

    def row(scenario: str, workload: str, batch: int) -> RunStats:
        try:
            return find_stats(stats, scenario, workload, batch)
        except KeyError as e:
            raise PlotDataError(str(e)) from None

    panel_a = {
        "title": f"Batch-1 inference latency ({reference_workload})",
        "x_label": "scenario", "y_label": "latency", "y_unit": "ms",
        "bars": [
            {"label": s,
             "value": row(s, reference_workload, 1).latency_mean,
             "std": row(s, reference_workload, 1).latency_std,
             "source_rows": [_source(row(s, reference_workload, 1))]}
            for s in scenarios
        ],
    }
    panel_b = {
        "title": f"Throughput vs batch size ({reference_workload})",
        "x_label": "batch size", "y_label": "throughput",
        "y_unit": "images/s",
        "curves": [
            {"label": s,
             "x": batches,
             "y": [row(s, reference_workload, b).throughput
                   for b in batches],
             "source_rows": [_source(row(s, reference_workload, b))
                             for b in batches]}
            for s in scenarios
        ],
    }
    panel_c = {
        "title": f"Batch-1 power draw ({reference_workload})",
        "x_label": "scenario", "y_label": "power", "y_unit": "mW",
        "bars": [
            {"label": s,
             "value": row(s, reference_workload, 1).power_mean,
             "source_rows": [_source(row(s, reference_workload, 1))]}
            for s in scenarios
        ],
    }
    panel_d = {
        "title": "Batch-1 latency per workload",
        "x_label": "workload", "y_label": "latency", "y_unit": "ms",
        "groups": [
            {"label": w,
             "bars": [
                 {"label": s, "value": row(s, w, 1).latency_mean,
                  "std": row(s, w, 1).latency_std,
                  "source_rows": [_source(row(s, w, 1))]}
                 for s in scenarios
             ]}
            for w in workloads
        ],
    }
    panel_e = {
        "title": (f"Improvements of {improvement.candidate} over "
                  f"{improvement.baseline}"),
        "x_label": "metric", "y_label": "improvement", "y_unit": "%",
        "bars": [
            {"label": "latency",
             "value": improvement.latency_reduction_pct},
            {"label": "throughput",
             "value": improvement.throughput_gain_pct},
            {"label": "power",
             "value": improvement.power_reduction_pct},
            {"label": "tops_per_watt",
             "value": improvement.efficiency_gain_pct},
        ],
        "source": asdict(improvement),
    }
    panel_f = {
        "title": (f"Real-time capability on {realtime_scenario} "
                  f"(budget {budget} ms)"),
        "x_label": "workload", "y_label": "meets budget",
        "budget_ms": budget,
        "rows": [
            {"workload": w, "latency_ms": lat, "pass": ok,
             "source_rows": [{"scenario": realtime_scenario,
                              "workload": w, "batch": 1}]}
            for w, lat, ok in realtime
        ],
    }
    return {
        "schema_version": 1,
        "panels": {"a": panel_a, "b": panel_b, "c": panel_c,
                   "d": panel_d, "e": panel_e, "f": panel_f},
    }


def emit_plotdata(bundle: dict) -> str:
    return json.dumps(bundle, indent=2, sort_keys=True) + "\n"
