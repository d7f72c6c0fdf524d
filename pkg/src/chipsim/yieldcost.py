"""Defect-limited die yield and chiplet-vs-monolithic cost comparison.

Yield models take the defect count per die AD = (area_mm2 / 100) * D0,
with D0 in defects/cm^2:

    poisson       Y = exp(-AD)
    murphy        Y = ((1 - exp(-AD)) / AD)^2
    neg_binomial  Y = (1 + AD/alpha)^(-alpha)

Clustering always helps: neg_binomial >= murphy-ish >= poisson for the
same AD.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .params import CostSettings, Topology

YIELD_MODELS = ("poisson", "murphy", "neg_binomial")


@dataclass(frozen=True)
class YieldInput:
    die_area: float  # mm^2
    defect_density: float  # defects per cm^2
    alpha: float = 3.0  # clustering parameter, neg_binomial only
    model: str = "poisson"

    def __post_init__(self) -> None:
        if self.die_area < 0:
            raise ValueError("die_area must be >= 0")
        if self.defect_density < 0:
            raise ValueError("defect_density must be >= 0")
        if self.alpha <= 0:
            raise ValueError("alpha must be > 0")
        if self.model not in YIELD_MODELS:
            raise ValueError(f"model must be one of {YIELD_MODELS}")


@dataclass(frozen=True)
class CostInput:
    wafer_cost: float
    wafer_diameter: float = 300.0  # mm
    test_cost_per_die: float = 0.0
    packaging_cost: float = 0.0
    interposer_cost: float = 0.0

    def __post_init__(self) -> None:
        for f in ("wafer_cost", "wafer_diameter", "test_cost_per_die",
                  "packaging_cost", "interposer_cost"):
            if getattr(self, f) < 0:
                raise ValueError(f"{f} must be >= 0")

    @classmethod
    def from_settings(cls, s: CostSettings) -> "CostInput":
        return cls(wafer_cost=s.wafer_cost, wafer_diameter=s.wafer_diameter,
                   test_cost_per_die=s.test_cost_per_die,
                   packaging_cost=s.packaging_cost,
                   interposer_cost=s.interposer_cost)


@dataclass(frozen=True)
class DieCostRow:
    name: str
    area: float  # mm^2
    die_yield: float
    dies_per_wafer: int
    cost: float  # per good die; inf if infeasible


@dataclass(frozen=True)
class CostComparison:
    chiplets: tuple[DieCostRow, ...]
    chiplet_silicon_cost: float
    interposer_yield: float
    interposer_cost: float  # effective, yield-adjusted
    packaging_cost: float
    chiplet_total: float
    monolithic: DieCostRow
    cost_ratio: float  # chiplet_total / monolithic cost
    chiplet_advantage: bool

    @property
    def feasible(self) -> bool:
        return math.isfinite(self.chiplet_total) and math.isfinite(
            self.monolithic.cost)


def yield_estimate(inp: YieldInput) -> float:
    """Fraction of good dies in (0, 1]."""
    ad = (inp.die_area / 100.0) * inp.defect_density
    if ad == 0:
        return 1.0
    if inp.model == "poisson":
        return math.exp(-ad)
    if inp.model == "murphy":
        return ((1.0 - math.exp(-ad)) / ad) ** 2
    return (1.0 + ad / inp.alpha) ** (-inp.alpha)


def dies_per_wafer(die_area: float, wafer_diameter: float = 300.0) -> int:
    """Gross die count with the standard edge-loss correction:
    floor(pi r^2 / A - pi d / sqrt(2A)), floored at zero."""
    if die_area <= 0:
        raise ValueError("die_area must be > 0")
    r = wafer_diameter / 2.0
    count = math.pi * r * r / die_area - math.pi * wafer_diameter / math.sqrt(
        2.0 * die_area)
    return max(0, math.floor(count))


def cost_per_good_die(die_area: float, yield_input: YieldInput,
                      cost_input: CostInput) -> float:
    """Silicon cost per tested-good die; inf when the die does not fit on
    the wafer (explicit infeasible result, never an exception)."""
    dpw = dies_per_wafer(die_area, cost_input.wafer_diameter)
    y = yield_estimate(yield_input)
    if dpw == 0 or y <= 0:
        return math.inf
    return cost_input.wafer_cost / (dpw * y) + cost_input.test_cost_per_die


def _die_row(name: str, area: float, template: YieldInput,
             cost_input: CostInput) -> DieCostRow:
    yi = YieldInput(die_area=area, defect_density=template.defect_density,
                    alpha=template.alpha, model=template.model)
    return DieCostRow(
        name=name, area=area, die_yield=yield_estimate(yi),
        dies_per_wafer=dies_per_wafer(area, cost_input.wafer_diameter),
        cost=cost_per_good_die(area, yi, cost_input))


def chiplet_vs_monolithic(topology: Topology, monolithic_area: float,
                          yield_template: YieldInput, cost_input: CostInput,
                          d0_interposer: float = 0.05) -> CostComparison:
    """Known-good-die comparison: every chiplet is tested pre-assembly
    (test cost per chiplet), the passive interposer is a separate
    large-area low-defect die, and packaging is a flat adder."""
    rows = tuple(_die_row(c.name, c.area, yield_template, cost_input)
                 for c in topology.chiplets)
    silicon = math.fsum(r.cost for r in rows)
    ip_yield = yield_estimate(YieldInput(
        die_area=topology.interposer_area, defect_density=d0_interposer,
        alpha=yield_template.alpha, model=yield_template.model))
    ip_cost = cost_input.interposer_cost / ip_yield
    total = silicon + ip_cost + cost_input.packaging_cost
    mono = _die_row("monolithic", monolithic_area, yield_template, cost_input)
    ratio = total / mono.cost if math.isfinite(mono.cost) else math.inf
    return CostComparison(
        chiplets=rows,
        chiplet_silicon_cost=silicon,
        interposer_yield=ip_yield,
        interposer_cost=ip_cost,
        packaging_cost=cost_input.packaging_cost,
        chiplet_total=total,
        monolithic=mono,
        cost_ratio=ratio,
        chiplet_advantage=total < mono.cost,
    )
