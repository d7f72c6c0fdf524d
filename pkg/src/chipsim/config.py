"""Config-file ingestion and rendering.

The grammar is a line-oriented INI document with sections
``[scenario.<name>]``, ``[workload.<name>]``, ``[chiplet.<name>]``,
``[constants]``, ``[topology]``, ``[cost]``, and ``[run]``. Keys match
the field names of the corresponding domain types; units are fixed per
field and never written in the file.

If a config declares any ``[scenario.*]`` section, those sections define
the scenario set; otherwise the built-ins are used. A section whose name
matches a built-in starts from the built-in values and overrides only the
keys given. The same rule applies to workloads and chiplets. The optional
``scenarios`` / ``workloads`` keys in ``[run]`` select and order a subset
by name.

Unknown sections and unknown keys are rejected, not ignored.
"""
from __future__ import annotations

import configparser
from typing import Any, Callable

from .params import (CostSettings, ChipletSpec, ModelConstants,
                     ScenarioParams, SimConfig, Topology, WorkloadModel,
                     builtin_scenarios, builtin_topology, builtin_workloads,
                     default_config)


class ConfigError(ValueError):
    """Malformed or invalid configuration document."""


def _float(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"expected a number, got {text!r}")


def _int(text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"expected an integer, got {text!r}")


def _bandwidth(text: str) -> float | None:
    if text.strip().lower() in ("unbounded", "inf", "infinite"):
        return None
    return _float(text)


def _int_list(text: str) -> tuple[int, ...]:
    items = [t.strip() for t in text.split(",") if t.strip()]
    return tuple(_int(t) for t in items)


def _name_list(text: str) -> tuple[str, ...]:
    return tuple(t.strip() for t in text.split(",") if t.strip())


def _str(text: str) -> str:
    return text.strip()


_SCENARIO_FIELDS: dict[str, Callable[[str], Any]] = {
    "link_latency": _float, "bandwidth": _bandwidth, "base_power": _float,
    "comm_power_rate": _float, "efficiency_factor": _float,
    "throttle_threshold": _float, "static_power_ratio": _float,
    "voltage_scale": _float, "protocol_overhead": _float,
    "stream_overlap": _float, "compression_ratio": _float,
}
# Required when declaring a scenario that is not a built-in; the protocol
# overhead, overlap, and compression keys carry defaults (1.0, 0.0, 1.0).
_SCENARIO_REQUIRED = ("link_latency", "bandwidth", "base_power",
                      "comm_power_rate", "efficiency_factor",
                      "throttle_threshold", "static_power_ratio",
                      "voltage_scale")

_WORKLOAD_FIELDS = {
    "base_compute": _float, "input_size": _float,
    "complexity_factor": _float, "batch_efficiency": _float,
}

_CHIPLET_FIELDS = {
    "width": _float, "height": _float, "process_node": _int,
    "peak_tops": _float, "role": _str,
}
_CHIPLET_REQUIRED = ("width", "height", "process_node", "role")

_CONSTANTS_FIELDS = {
    "sched_overhead": _float, "hops": _int, "ops_per_image": _float,
    "throttle_gain": _float, "thermal_time_constant": _float,
    "dvfs_idle_voltage": _float, "dvfs_util_cutoff": _float,
    "fixed_point_tol": _float, "fixed_point_max_iter": _int,
    "batch_model": _str,
}

_TOPOLOGY_FIELDS = {
    "interposer_width": _float, "interposer_height": _float,
    "fill_limit": _float, "hbm_bandwidth": _float,
}

_COST_FIELDS = {
    "wafer_cost": _float, "wafer_diameter": _float,
    "test_cost_per_die": _float, "packaging_cost": _float,
    "interposer_cost": _float, "defect_density": _float, "alpha": _float,
    "model": _str, "d0_interposer": _float, "monolithic_area": _float,
}

_RUN_FIELDS = {
    "batch_sizes": _int_list, "seed": _int, "samples_per_point": _int,
    "noise_sigma": _float, "realtime_budget": _float, "dvfs_mode": _str,
    "scenarios": _name_list, "workloads": _name_list,
}


def _parse_section(section: str, items: dict[str, str],
                   fields: dict[str, Callable[[str], Any]]) -> dict[str, Any]:
    out: dict[str, Any] = {}
    for key, raw in items.items():
        if key not in fields:
            raise ConfigError(f"unknown key {key!r} in section [{section}]")
        try:
            out[key] = fields[key](raw)
        except ConfigError as e:
            raise ConfigError(f"[{section}] {key}: {e}") from None
    return out


def _merge_named(section: str, name: str, overrides: dict[str, Any],
                 base: Any, required: tuple[str, ...],
                 factory: Callable[..., Any]) -> Any:
    if base is not None:
        kwargs = {k: getattr(base, k) for k in base.__dataclass_fields__}
        kwargs.update(overrides)
    else:
        missing = [k for k in required if k not in overrides]
        if missing:
            raise ConfigError(
                f"[{section}] new entry {name!r} is missing required "
                f"keys: {', '.join(missing)}")
        kwargs = dict(overrides)
        kwargs["name"] = name
    try:
        return factory(**kwargs)
    except (ValueError, TypeError) as e:
        raise ConfigError(f"[{section}]: {e}") from None


def parse_config(text: str) -> SimConfig:
    """Parse a config document into a validated SimConfig."""
    cp = configparser.ConfigParser(strict=True, interpolation=None,
                                   delimiters=("=",))
    cp.optionxform = str  # keys are case-sensitive field names
    try:
        cp.read_string(text)
    except configparser.Error as e:
        raise ConfigError(f"syntax error: {e}") from None

    defaults = default_config()
    scenario_base = {s.name: s for s in builtin_scenarios()}
    workload_base = {w.name: w for w in builtin_workloads()}
    chiplet_base = {c.name: c for c in builtin_topology().chiplets}

    scenarios: dict[str, ScenarioParams] = {}
    workloads: dict[str, WorkloadModel] = {}
    chiplets: dict[str, ChipletSpec] = {}
    constants_kw: dict[str, Any] = {}
    topology_kw: dict[str, Any] = {}
    cost_kw: dict[str, Any] = {}
    run_kw: dict[str, Any] = {}

    for section in cp.sections():
        items = dict(cp.items(section))
        if section == "run":
            run_kw = _parse_section(section, items, _RUN_FIELDS)
        elif section == "constants":
            constants_kw = _parse_section(section, items, _CONSTANTS_FIELDS)
        elif section == "topology":
            topology_kw = _parse_section(section, items, _TOPOLOGY_FIELDS)
        elif section == "cost":
            cost_kw = _parse_section(section, items, _COST_FIELDS)
        elif section.startswith("scenario."):
            name = section[len("scenario."):]
            overrides = _parse_section(section, items, _SCENARIO_FIELDS)
            scenarios[name] = _merge_named(
                section, name, overrides, scenario_base.get(name),
                _SCENARIO_REQUIRED, ScenarioParams)
        elif section.startswith("workload."):
            name = section[len("workload."):]
            overrides = _parse_section(section, items, _WORKLOAD_FIELDS)
            workloads[name] = _merge_named(
                section, name, overrides, workload_base.get(name),
                tuple(_WORKLOAD_FIELDS), WorkloadModel)
        elif section.startswith("chiplet."):
            name = section[len("chiplet."):]
            overrides = _parse_section(section, items, _CHIPLET_FIELDS)
            chiplets[name] = _merge_named(
                section, name, overrides, chiplet_base.get(name),
                _CHIPLET_REQUIRED, ChipletSpec)
        else:
            raise ConfigError(f"unknown section [{section}]")

    scenario_list = (tuple(scenarios.values()) if scenarios
                     else defaults.scenarios)
    workload_list = (tuple(workloads.values()) if workloads
                     else defaults.workloads)
    chiplet_list = (tuple(chiplets.values()) if chiplets
                    else defaults.topology.chiplets)

    if "scenarios" in run_kw:
        scenario_list = _select("scenario", run_kw.pop("scenarios"),
                                scenario_list)
    if "workloads" in run_kw:
        workload_list = _select("workload", run_kw.pop("workloads"),
                                workload_list)

    try:
        constants = ModelConstants(**constants_kw)
    except ValueError as e:
        raise ConfigError(f"[constants]: {e}") from None
    try:
        cost = CostSettings(**{**_settings_kwargs(defaults.cost), **cost_kw})
    except ValueError as e:
        raise ConfigError(f"[cost]: {e}") from None
    try:
        topo_defaults = _settings_kwargs(defaults.topology)
        topo_defaults.pop("chiplets")
        topology = Topology(chiplets=chiplet_list,
                            **{**topo_defaults, **topology_kw})
    except ValueError as e:
        raise ConfigError(f"[topology]: {e}") from None

    run_defaults = {
        "batch_sizes": defaults.batch_sizes, "seed": defaults.seed,
        "samples_per_point": defaults.samples_per_point,
        "noise_sigma": defaults.noise_sigma,
        "realtime_budget": defaults.realtime_budget,
        "dvfs_mode": defaults.dvfs_mode,
    }
    try:
        return SimConfig(scenarios=scenario_list, workloads=workload_list,
                         topology=topology, constants=constants, cost=cost,
                         **{**run_defaults, **run_kw})
    except ValueError as e:
        raise ConfigError(f"[run]: {e}") from None


def _settings_kwargs(obj: Any) -> dict[str, Any]:
    return {k: getattr(obj, k) for k in obj.__dataclass_fields__}


def _select(kind: str, names: tuple[str, ...], pool: tuple) -> tuple:
    if not names:
        raise ConfigError(f"at least one {kind} required")
    by_name = {p.name: p for p in pool}
    missing = [n for n in names if n not in by_name]
    if missing:
        raise ConfigError(f"unknown {kind} selected: {', '.join(missing)}")
    return tuple(by_name[n] for n in names)


def _fmt(value: Any) -> str:
    if value is None:
        return "unbounded"
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ", ".join(str(v) for v in value)
    return str(value)


def render_config(config: SimConfig) -> str:
    """Serialize a SimConfig to the config grammar.

    ``parse_config(render_config(c)) == c`` for every valid config.
    """
    lines: list[str] = []

    def emit(section: str, pairs: dict[str, Any]) -> None:
        lines.append(f"[{section}]")
        for k, v in pairs.items():
            lines.append(f"{k} = {_fmt(v)}")
        lines.append("")

    emit("run", {
        "batch_sizes": config.batch_sizes,
        "seed": config.seed,
        "samples_per_point": config.samples_per_point,
        "noise_sigma": config.noise_sigma,
        "realtime_budget": config.realtime_budget,
        "dvfs_mode": config.dvfs_mode,
    })
    emit("constants", _settings_kwargs(config.constants))
    topo = _settings_kwargs(config.topology)
    topo.pop("chiplets")
    emit("topology", topo)
    for c in config.topology.chiplets:
        kw = _settings_kwargs(c)
        kw.pop("name")
        emit(f"chiplet.{c.name}", kw)
    emit("cost", _settings_kwargs(config.cost))
    for s in config.scenarios:
        kw = _settings_kwargs(s)
        kw.pop("name")
        emit(f"scenario.{s.name}", kw)
    for w in config.workloads:
        kw = _settings_kwargs(w)
        kw.pop("name")
        emit(f"workload.{w.name}", kw)
    return "\n".join(lines)
