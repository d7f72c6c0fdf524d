"""chipsim command-line interface.

Exit codes: 0 success, 2 configuration/validation failure,
3 fixed-point convergence failure, 4 I/O failure.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from .config import ConfigError, parse_config, render_config
from .harness import (GridError, emit_results, improvements, realtime_table,
                      run_grid)
from .params import SimConfig, default_config, floorplan_check
from .plotdata import build_plot_bundle, emit_plotdata
from .yieldcost import (CostInput, YieldInput, chiplet_vs_monolithic,
                        dies_per_wafer, yield_estimate)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CONVERGENCE = 3
EXIT_IO = 4

_MODEL_ALIASES = {"poisson": "poisson", "murphy": "murphy",
                  "negbin": "neg_binomial", "neg_binomial": "neg_binomial"}

DEFAULT_BASELINE = "Basic Chiplet"
DEFAULT_CANDIDATE = "AI-Optimized Chiplet"


class CliError(Exception):
    def __init__(self, msg: str, code: int):
        super().__init__(msg)
        self.code = code


def _load_config(args: argparse.Namespace) -> SimConfig:
    if getattr(args, "config", None):
        try:
            text = Path(args.config).read_text()
        except OSError as e:
            raise CliError(f"cannot read config: {e}", EXIT_IO)
        try:
            config = parse_config(text)
        except ConfigError as e:
            raise CliError(f"invalid config: {e}", EXIT_CONFIG)
    else:
        config = default_config()
    overrides = {}
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    if getattr(args, "samples", None) is not None:
        overrides["samples_per_point"] = args.samples
    if getattr(args, "noise", None) is not None:
        overrides["noise_sigma"] = args.noise
    if getattr(args, "batches", None) is not None:
        overrides["batch_sizes"] = tuple(args.batches)
    if overrides:
        try:
            config = dataclasses.replace(config, **overrides)
        except ValueError as e:
            raise CliError(f"invalid override: {e}", EXIT_CONFIG)
    report = floorplan_check(config.topology)
    if not report.passed:
        raise CliError(str(report), EXIT_CONFIG)
    return config


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text)
    except OSError as e:
        raise CliError(f"cannot write {path}: {e}", EXIT_IO)


def _run_grid(config: SimConfig, workers: int):
    try:
        return run_grid(config, workers=workers)
    except GridError as e:
        raise CliError(str(e), EXIT_CONVERGENCE)


def _cmd_print_defaults(args: argparse.Namespace) -> int:
    _write(args.out, render_config(default_config()))
    return EXIT_OK


def _cmd_run(args: argparse.Namespace) -> int:
    config = _load_config(args)
    stats = _run_grid(config, args.workers)
    _write(args.out, emit_results(stats, format=args.format))
    return EXIT_OK


def _cmd_compare(args: argparse.Namespace) -> int:
    config = _load_config(args)
    stats = _run_grid(config, args.workers)
    try:
        report = improvements(stats, args.baseline, args.candidate,
                              args.workload, args.batch)
    except KeyError as e:
        raise CliError(str(e), EXIT_CONFIG)
    if args.json:
        _write(args.out, json.dumps(dataclasses.asdict(report), indent=2,
                                    sort_keys=True) + "\n")
    else:
        lines = [
            f"{report.candidate} vs {report.baseline} "
            f"({args.workload}, batch {args.batch}):",
            f"  latency reduction : {report.latency_reduction_pct:6.1f} %",
            f"  throughput gain   : {report.throughput_gain_pct:6.1f} %",
            f"  power reduction   : {report.power_reduction_pct:6.1f} %",
            f"  TOPS/W gain       : {report.efficiency_gain_pct:6.1f} %",
        ]
        _write(args.out, "\n".join(lines) + "\n")
    return EXIT_OK


def _cmd_plotdata(args: argparse.Namespace) -> int:
    config = _load_config(args)
    stats = _run_grid(config, args.workers)
    try:
        report = improvements(stats, args.baseline, args.candidate,
                              args.workload, 1)
        realtime = realtime_table(stats, config.realtime_budget,
                                  args.candidate)
        bundle = build_plot_bundle(stats, report, realtime, args.candidate,
                                   config.realtime_budget,
                                   reference_workload=args.workload)
    except (KeyError, ValueError) as e:
        raise CliError(str(e), EXIT_CONFIG)
    out_dir = Path(args.out)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "plotdata.json").write_text(emit_plotdata(bundle))
        (out_dir / "results.csv").write_text(emit_results(stats))
    except OSError as e:
        raise CliError(f"cannot write {out_dir}: {e}", EXIT_IO)
    print(f"wrote {out_dir / 'plotdata.json'} and {out_dir / 'results.csv'}")
    return EXIT_OK


def _cmd_yield(args: argparse.Namespace) -> int:
    try:
        inp = YieldInput(die_area=args.area, defect_density=args.d0,
                         alpha=args.alpha,
                         model=_MODEL_ALIASES[args.model])
    except ValueError as e:
        raise CliError(str(e), EXIT_CONFIG)
    y = yield_estimate(inp)
    dpw = dies_per_wafer(args.area, args.wafer_diameter)
    good = int(dpw * y)
    if args.json:
        _write(args.out, json.dumps({
            "die_area_mm2": args.area, "defect_density_per_cm2": args.d0,
            "model": inp.model, "alpha": args.alpha, "yield": y,
            "dies_per_wafer": dpw, "good_dies_per_wafer": good,
        }, indent=2, sort_keys=True) + "\n")
    else:
        _write(args.out, "\n".join([
            f"model           : {inp.model}",
            f"die area        : {args.area} mm2",
            f"defect density  : {args.d0} /cm2",
            f"yield           : {y:.4f}",
            f"dies per wafer  : {dpw}",
            f"good dies/wafer : {good}",
        ]) + "\n")
    return EXIT_OK


def _cmd_cost_compare(args: argparse.Namespace) -> int:
    config = _load_config(args)
    cs = config.cost
    template = YieldInput(die_area=1.0, defect_density=cs.defect_density,
                          alpha=cs.alpha, model=cs.model)
    comparison = chiplet_vs_monolithic(
        config.topology, cs.monolithic_area, template,
        CostInput.from_settings(cs), d0_interposer=cs.d0_interposer)
    if args.json:
        _write(args.out, json.dumps(
            dataclasses.asdict(comparison), indent=2, sort_keys=True,
            default=str) + "\n")
        return EXIT_OK
    lines = [f"{'die':<16} {'area mm2':>9} {'yield':>7} {'dpw':>6} "
             f"{'cost':>10}"]
    for r in comparison.chiplets:
        lines.append(f"{r.name:<16} {r.area:>9.1f} {r.die_yield:>7.3f} "
                     f"{r.dies_per_wafer:>6d} {r.cost:>10.2f}")
    m = comparison.monolithic
    lines += [
        "",
        f"chiplet silicon total : {comparison.chiplet_silicon_cost:.2f}",
        f"interposer (yielded)  : {comparison.interposer_cost:.2f}",
        f"packaging             : {comparison.packaging_cost:.2f}",
        f"chiplet route total   : {comparison.chiplet_total:.2f}",
        f"monolithic ({m.area:.0f} mm2, yield {m.die_yield:.3f}) "
        f": {m.cost:.2f}",
        f"cost ratio (chiplet/monolithic) : {comparison.cost_ratio:.3f}",
        f"chiplet advantage     : "
        f"{'yes' if comparison.chiplet_advantage else 'no'}",
    ]
    _write(args.out, "\n".join(lines) + "\n")
    return EXIT_OK


def _add_run_opts(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="config file (defaults to built-ins)")
    p.add_argument("--seed", type=int, help="override RNG seed")
    p.add_argument("--samples", type=int, help="override samples per point")
    p.add_argument("--noise", type=float, help="override noise sigma")
    p.add_argument("--workers", type=int, default=1,
                   help="parallel grid workers")
    p.add_argument("--out", default=None, help="output path (default stdout)")


def _parse_batches(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad batch list: {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chipsim",
        description="Chiplet SoC design-space simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("print-defaults",
                       help="emit the full built-in config for editing")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_print_defaults)

    p = sub.add_parser("run", help="run the full grid and emit results")
    _add_run_opts(p)
    p.add_argument("--format", choices=("tabular", "structured"),
                   default="tabular")
    p.set_defaults(fn=_cmd_run)

    p = sub.add_parser("sweep", help="run the grid over a batch-size sweep")
    _add_run_opts(p)
    p.add_argument("--batches", type=_parse_batches, required=True,
                   help="comma-separated batch sizes, e.g. 1,2,4,8,16,32")
    p.add_argument("--format", choices=("tabular", "structured"),
                   default="tabular")
    p.set_defaults(fn=_cmd_run)

    p = sub.add_parser("compare",
                       help="improvement report between two scenarios")
    _add_run_opts(p)
    p.add_argument("--baseline", default=DEFAULT_BASELINE)
    p.add_argument("--candidate", default=DEFAULT_CANDIDATE)
    p.add_argument("--workload", default="MobileNetV2")
    p.add_argument("--batch", type=int, default=1)
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=_cmd_compare)

    p = sub.add_parser("plotdata",
                       help="emit plot-data bundles for panels (a)-(f)")
    _add_run_opts(p)
    p.add_argument("--baseline", default=DEFAULT_BASELINE)
    p.add_argument("--candidate", default=DEFAULT_CANDIDATE)
    p.add_argument("--workload", default="MobileNetV2")
    p.set_defaults(fn=_cmd_plotdata)
    # plotdata writes a directory
    p.set_defaults(out="plotdata")

    p = sub.add_parser("yield", help="defect-limited die yield")
    p.add_argument("--area", type=float, required=True, help="die area, mm2")
    p.add_argument("--d0", type=float, required=True,
                   help="defect density, /cm2")
    p.add_argument("--model", choices=sorted(_MODEL_ALIASES),
                   default="poisson")
    p.add_argument("--alpha", type=float, default=3.0)
    p.add_argument("--wafer-diameter", type=float, default=300.0)
    p.add_argument("--json", action="store_true")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_yield)

    p = sub.add_parser("cost-compare",
                       help="chiplet vs monolithic cost comparison")
    p.add_argument("--config", help="config file with [cost] settings")
    p.add_argument("--json", action="store_true")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_cost_compare)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except CliError as e:
        print(f"chipsim: error: {e}", file=sys.stderr)
        return e.code


if __name__ == "__main__":
    sys.exit(main())
