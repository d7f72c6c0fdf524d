"""Grid runner: seeded noise sampling, statistics, improvement and
real-time reports, and result serialization.

Each (scenario, workload, batch) point derives its own RNG stream from
the run seed and the point's identity, so results are bit-identical no
matter how the grid is scheduled across workers.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .params import ScenarioParams, SimConfig, WorkloadModel
from .power import ConvergenceError, DvfsPolicy, steady_point, \
    energy_per_inference, tops_per_watt
from .perf import throughput as _throughput

SCHEMA_VERSION = 1

RESULT_COLUMNS = ("scenario", "workload", "batch", "latency_mean",
                  "latency_std", "throughput", "power", "tops_per_watt",
                  "energy", "realtime", "samples", "seed")

NOISE_FLOOR = 0.5  # multiplicative noise factors are clamped to >= 0.5


@dataclass(frozen=True)
class RunStats:
    """Aggregated statistics for one grid point."""

    scenario: str
    workload: str
    batch: int
    latency_mean: float  # ms
    latency_std: float  # ms
    throughput: float  # images/s, from mean latency
    power_mean: float  # mW
    tops_per_watt: float
    energy_mJ: float
    realtime_ok: bool
    samples: int
    seed: int


@dataclass(frozen=True)
class ImprovementReport:
    """Candidate-vs-baseline percentages; positive = candidate better."""

    baseline: str
    candidate: str
    latency_reduction_pct: float
    throughput_gain_pct: float
    power_reduction_pct: float
    efficiency_gain_pct: float


class GridError(RuntimeError):
    """One or more grid points failed; carries per-point failures."""

    def __init__(self, failures: list[tuple[str, str, int, Exception]]):
        lines = [f"{s}/{w}/B={b}: {e}" for s, w, b, e in failures]
        super().__init__(
            f"{len(failures)} grid point(s) failed:\n" + "\n".join(lines))
        self.failures = failures


def point_rng(seed: int, scenario: str, workload: str,
              batch: int) -> np.random.Generator:
    """Independent, order-insensitive RNG stream for one grid point."""
    key = f"{seed}\x1f{scenario}\x1f{workload}\x1f{batch}".encode()
    digest = hashlib.sha256(key).digest()
    return np.random.default_rng(int.from_bytes(digest[:16], "little"))


def run_point(config: SimConfig, scenario: ScenarioParams,
              workload: WorkloadModel, batch: int) -> RunStats:
    """Evaluate one grid point over samples_per_point noise draws.

    Noise is a multiplicative Gaussian factor (mean 1, std noise_sigma,
    clamped to >= 0.5) on on-die time only; interconnect parameters are
    deterministic constants. Every sample goes through the full thermal
    fixed point. Non-converged samples are counted and reported.
    """
    rng = point_rng(config.seed, scenario.name, workload.name, batch)
    n = config.samples_per_point
    factors = np.maximum(
        NOISE_FLOOR, 1.0 + config.noise_sigma * rng.standard_normal(n))
    policy = DvfsPolicy.from_constants(config.dvfs_mode, config.constants)

    latencies = np.empty(n)
    powers = np.empty(n)
    failures: list[tuple[str, str, int, Exception]] = []
    for i, f in enumerate(factors):
        try:
            pt = steady_point(scenario, workload, config.constants, batch,
                              policy=policy, on_die_scale=float(f))
        except ConvergenceError as e:
            failures.append((scenario.name, workload.name, batch, e))
            continue
        latencies[i] = pt.breakdown.total
        powers[i] = pt.power
    if failures:
        raise GridError(failures)

    latency_mean = float(np.mean(latencies))
    latency_std = float(np.std(latencies))
    power_mean = float(np.mean(powers))
    thr = _throughput(batch, latency_mean)
    return RunStats(
        scenario=scenario.name,
        workload=workload.name,
        batch=batch,
        latency_mean=latency_mean,
        latency_std=latency_std,
        throughput=thr,
        power_mean=power_mean,
        tops_per_watt=tops_per_watt(thr, power_mean,
                                    config.constants.ops_per_image),
        energy_mJ=energy_per_inference(power_mean, thr),
        realtime_ok=latency_mean <= config.realtime_budget,
        samples=n,
        seed=config.seed,
    )


def run_grid(config: SimConfig, workers: int = 1) -> list[RunStats]:
    """Evaluate the full scenario x workload x batch grid.

    Output order is canonical (scenario name, workload name, batch)
    regardless of declaration order or scheduling; per-point failures are
    aggregated into a single GridError.
    """
    points = [(s, w, b) for s in config.scenarios for w in config.workloads
              for b in config.batch_sizes]

    def evaluate(point):
        s, w, b = point
        return run_point(config, s, w, b)

    failures: list[tuple[str, str, int, Exception]] = []
    results: list[RunStats] = []
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_guard(evaluate), points))
    else:
        outcomes = [_guard(evaluate)(p) for p in points]
    for (s, w, b), outcome in zip(points, outcomes):
        if isinstance(outcome, GridError):
            failures.extend(outcome.failures)
        elif isinstance(outcome, Exception):
            failures.append((s.name, w.name, b, outcome))
        else:
            results.append(outcome)
    if failures:
        raise GridError(failures)
    results.sort(key=lambda r: (r.scenario, r.workload, r.batch))
    return results


def _guard(fn):
    def wrapped(point):
        try:
            return fn(point)
        except Exception as e:  # collected and re-raised by run_grid
            return e
    return wrapped


def find_stats(stats: list[RunStats], scenario: str, workload: str,
               batch: int) -> RunStats:
    for r in stats:
        if (r.scenario, r.workload, r.batch) == (scenario, workload, batch):
            return r
    raise KeyError(f"no result row for {scenario}/{workload}/B={batch}")


def improvements(stats: list[RunStats], baseline_name: str,
                 candidate_name: str, workload: str,
                 batch: int) -> ImprovementReport:
    """Percentage deltas of candidate over baseline at one
    (workload, batch) point; positive means the candidate is better."""
    base = find_stats(stats, baseline_name, workload, batch)
    cand = find_stats(stats, candidate_name, workload, batch)
    return ImprovementReport(
        baseline=baseline_name,
        candidate=candidate_name,
        latency_reduction_pct=100.0 * (base.latency_mean - cand.latency_mean)
        / base.latency_mean,
        throughput_gain_pct=100.0 * (cand.throughput - base.throughput)
        / base.throughput,
        power_reduction_pct=100.0 * (base.power_mean - cand.power_mean)
        / base.power_mean,
        efficiency_gain_pct=100.0 * (cand.tops_per_watt - base.tops_per_watt)
        / base.tops_per_watt,
    )


def realtime_table(stats: list[RunStats], budget: float,
                   scenario: str) -> list[tuple[str, float, bool]]:
    """Per-workload (name, batch-1 mean latency, meets-budget) rows on
    one scenario."""
    if budget <= 0:
        raise ValueError("budget must be > 0")
    rows = []
    for r in stats:
        if r.scenario == scenario and r.batch == 1:
            rows.append((r.workload, r.latency_mean,
                         r.latency_mean <= budget))
    rows.sort(key=lambda t: t[0])
    return rows


def _stats_row(r: RunStats) -> dict:
    return {
        "scenario": r.scenario, "workload": r.workload, "batch": r.batch,
        "latency_mean": r.latency_mean, "latency_std": r.latency_std,
        "throughput": r.throughput, "power": r.power_mean,
        "tops_per_watt": r.tops_per_watt, "energy": r.energy_mJ,
        "realtime": r.realtime_ok, "samples": r.samples, "seed": r.seed,
    }


def _row_stats(row: dict) -> RunStats:
    return RunStats(
        scenario=row["scenario"], workload=row["workload"],
        batch=int(row["batch"]), latency_mean=float(row["latency_mean"]),
        latency_std=float(row["latency_std"]),
        throughput=float(row["throughput"]), power_mean=float(row["power"]),
        tops_per_watt=float(row["tops_per_watt"]),
        energy_mJ=float(row["energy"]),
        realtime_ok=(row["realtime"] in (True, "true", "True")),
        samples=int(row["samples"]), seed=int(row["seed"]),
    )


def emit_results(stats: list[RunStats], format: str = "tabular") -> str:
    """Serialize result rows. ``tabular`` is CSV in the canonical column
    order; ``structured`` is versioned JSON. Both round-trip losslessly
    through parse_results (floats are written with full precision)."""
    if format == "tabular":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(RESULT_COLUMNS)
        for r in stats:
            row = _stats_row(r)
            writer.writerow([_csv_cell(row[c]) for c in RESULT_COLUMNS])
        return buf.getvalue()
    if format == "structured":
        doc = {"schema_version": SCHEMA_VERSION,
               "results": [_stats_row(r) for r in stats]}
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"
    raise ValueError(f"unknown format: {format!r}")


def _csv_cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def parse_results(text: str, format: str = "tabular") -> list[RunStats]:
    """Inverse of emit_results."""
    if format == "tabular":
        reader = csv.DictReader(io.StringIO(text))
        return [_row_stats(row) for row in reader]
    if format == "structured":
        doc = json.loads(text)
        if "schema_version" not in doc:
            raise ValueError("missing schema_version")
        if doc["schema_version"] != SCHEMA_VERSION:
            raise ValueError(
                f"unsupported schema_version: {doc['schema_version']}")
        return [_row_stats(row) for row in doc["results"]]
    raise ValueError(f"unknown format: {format!r}")
