"""Second-order Monte Carlo over deaths, per-patient cost and the m:i ratio.

Each iteration draws one global factor per parameter, so every cost cell in
an iteration moves together.  Iteration ``i`` uses its own random stream
derived from ``(seed, i)``; results do not depend on how iterations are
spread over worker processes.
"""

from __future__ import annotations

import dataclasses
import math
from collections.abc import Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from lcburden.aggregation import health_rows, table_rows
from lcburden.bundle import LifeTableRow, ScenarioBundle
from lcburden.costing import compute_cost_cards, death_cost_card
from lcburden.epidemiology import split_deaths
from lcburden.model import run_model

# published ranges are read as 95% intervals of a normal
Z95 = 1.96
MAX_REDRAWS = 1000

Metric = tuple[str, str]


@dataclass(frozen=True)
class UncertaintySpec:
    mi_mean: float
    deaths_sd: float = 0.13 / Z95
    cost_sd: float = 0.25 / Z95
    mi_sd: float = 0.06 / Z95

    @classmethod
    def for_bundle(cls, bundle: ScenarioBundle) -> "UncertaintySpec":
        """Centre the m:i draw on the ratio implied by the bundle's own counts."""
        return cls(mi_mean=bundle.epi.deaths / bundle.epi.incidence)

    def zero_variance(self) -> "UncertaintySpec":
        return dataclasses.replace(self, deaths_sd=0.0, cost_sd=0.0, mi_sd=0.0)

    def __post_init__(self):
        if min(self.deaths_sd, self.cost_sd, self.mi_sd) < 0:
            raise ValueError("standard deviations must be nonnegative")
        if not self.mi_mean > 0:
            raise ValueError("m:i mean must be positive")


@dataclass(frozen=True)
class Factors:
    deaths: float
    cost: float
    mi: float


def _positive_normal(rng: np.random.Generator, mean: float, sd: float) -> float:
    if sd == 0:
        return float(mean)
    for _ in range(MAX_REDRAWS):
        x = float(rng.normal(mean, sd))
        if x > 0:
            return x
    raise RuntimeError(f"could not draw a positive value from N({mean}, {sd})")


def draw_factors(spec: UncertaintySpec, rng: np.random.Generator) -> Factors:
    """Independent normal draws; nonpositive values are redrawn."""
    return Factors(_positive_normal(rng, 1.0, spec.deaths_sd),
                   _positive_normal(rng, 1.0, spec.cost_sd),
                   _positive_normal(rng, spec.mi_mean, spec.mi_sd))


def iteration_rng(seed: int, iteration: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(iteration,)))


@dataclass(frozen=True)
class Interval:
    mean: float
    lower: float
    upper: float
    sd: float


def summarize(draws: Sequence[float], percentiles: tuple[float, float] = (2.5, 97.5)
              ) -> Interval:
    """Mean, linearly interpolated percentiles and sample sd of ``draws``."""
    values = np.asarray(draws, dtype=float)
    if values.size == 0:
        raise ValueError("no draws to summarize")
    first = float(values[0])
    # centring on the first draw keeps a constant sample's mean exact
    mean = first + math.fsum(float(v) - first for v in values) / values.size
    lower, upper = (float(q) for q in np.percentile(values, percentiles))
    sd = 0.0
    if values.size > 1:
        sd = math.sqrt(math.fsum((float(v) - mean) ** 2 for v in values) / (values.size - 1))
    return Interval(mean, lower, upper, sd)


@dataclass(frozen=True)
class SimulationSummary:
    cells: dict[Metric, Interval]
    deterministic: dict[Metric, float]
    iterations: int
    seed: int
    percentiles: tuple[float, float]


def _metrics(result) -> dict[Metric, float]:
    out = {}
    for row, values in table_rows(result.report).items():
        for column, value in values.items():
            out[(row, column)] = value
    for row, values in health_rows(result.health_loss).items():
        for column, value in values.items():
            out[(f"health/{row}", column)] = value
    return out


class _Evaluator:
    """Re-runs the pipeline under one set of factors."""

    def __init__(self, bundle: ScenarioBundle):
        self.bundle = bundle
        self.cards = compute_cost_cards(bundle)
        self.death_costs = death_cost_card(bundle, self.cards)
        self.split = split_deaths(bundle.epi)

    def __call__(self, factors: Factors, mi_centre: float) -> dict[Metric, float]:
        b = self.bundle
        epi = b.epi
        # incidence' / incidence, with deaths' = deaths * f and incidence' = deaths' / mi
        scale = factors.deaths * (mi_centre / factors.mi)
        scaled_epi = dataclasses.replace(
            epi,
            incidence=epi.incidence * scale,
            prevalence_1y=epi.prevalence_1y * scale,
            prevalence_5y=epi.prevalence_5y * scale,
            prevalence_3y=None if epi.prevalence_3y is None else epi.prevalence_3y * scale,
            deaths=epi.deaths * factors.deaths,
        )
        life_table = tuple(LifeTableRow(r.sex, r.age_group, r.deaths * factors.deaths,
                                        r.life_expectancy) for r in b.life_table)
        shares = b.shares
        result = run_model(
            dataclasses.replace(b, epi=scaled_epi, life_table=life_table),
            cards={k: c.scaled(factors.cost) for k, c in self.cards.items()},
            death_costs=self.death_costs.scaled(factors.cost, shares),
            death_split=self.split.scaled(factors.deaths),
        )
        return _metrics(result)


def _run_chunk(bundle: ScenarioBundle, spec: UncertaintySpec, seed: int,
               indices: Sequence[int]) -> list[dict[Metric, float]]:
    evaluate = _Evaluator(bundle)
    return [evaluate(draw_factors(spec, iteration_rng(seed, i)), spec.mi_mean)
            for i in indices]


def simulate(bundle: ScenarioBundle, n: Optional[int] = None, seed: Optional[int] = None,
             *, spec: Optional[UncertaintySpec] = None,
             percentiles: Optional[tuple[float, float]] = None,
             workers: int = 1) -> SimulationSummary:
    """Run ``n`` iterations and summarise every reported cell.

    Defaults come from the bundle manifest.  ``workers`` > 1 spreads
    iterations over processes without changing any result.
    """
    defaults = bundle.manifest.mc_defaults
    n = defaults.iterations if n is None else n
    seed = defaults.seed if seed is None else seed
    percentiles = defaults.percentiles if percentiles is None else tuple(percentiles)
    if n < 1:
        raise ValueError("iterations must be at least 1")
    if not 0 < percentiles[0] < percentiles[1] < 100:
        raise ValueError("percentiles must satisfy 0 < lower < upper < 100")
    spec = UncertaintySpec.for_bundle(bundle) if spec is None else spec

    indices = list(range(n))
    if workers <= 1:
        results = _run_chunk(bundle, spec, seed, indices)
    else:
        size = math.ceil(n / workers)
        chunks = [indices[i:i + size] for i in range(0, n, size)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = pool.map(_run_chunk, [bundle] * len(chunks), [spec] * len(chunks),
                             [seed] * len(chunks), chunks)
            results = [r for part in parts for r in part]

    deterministic = _metrics(run_model(bundle))
    cells = {metric: summarize([r[metric] for r in results], percentiles)
             for metric in deterministic}
    return SimulationSummary(cells, deterministic, n, seed, percentiles)
