"""National burden: cases x per-patient costs, death costs, subtotals and totals."""

from __future__ import annotations

import math
from collections.abc import Mapping
from dataclasses import dataclass, field
from typing import Optional

from lcburden.bundle import (
    CellKey,
    Denominators,
    MoneyBySector,
    SectorCosts,
    SectorShares,
    SurvivalTable,
)
from lcburden.costing import DeathCostCard, PatientCostCard
from lcburden.domain import (
    POPULATIONS,
    SECTORS,
    SEXES,
    TUMOURS,
    CancerType,
    Category,
    Population,
    Sex,
    Stage,
)
from lcburden.epidemiology import CaseKey, CaseMatrix, DeathSplit, PrevalenceByYear
from lcburden.health_loss import HealthLossSummary

ZERO_MONEY = MoneyBySector(0.0, 0.0, 0.0, 0.0)


def _total_money(costs: SectorCosts) -> MoneyBySector:
    """Sector totals already embed coverage shares, so the total is their sum."""
    return MoneyBySector(costs.public, costs.social_security, costs.private,
                         math.fsum(costs.as_tuple()))


def _sum_money(items) -> MoneyBySector:
    items = list(items)
    parts = [math.fsum(getattr(m, f) for m in items)
             for f in ("public", "social_security", "private")]
    return MoneyBySector(*parts, math.fsum(parts))


@dataclass(frozen=True)
class CellBurden:
    cases: float
    cost: MoneyBySector


@dataclass(frozen=True)
class DeathRow:
    population: Population
    deaths: float
    deaths_by_sex: Mapping[Sex, float]
    cost: MoneyBySector
    cost_by_sex: Mapping[Sex, MoneyBySector]


@dataclass(frozen=True)
class BurdenReport:
    cells: Mapping[CaseKey, CellBurden]
    deaths: Mapping[Population, DeathRow]
    subtotals: Mapping[Population, MoneyBySector]
    population_totals: Mapping[Population, MoneyBySector]
    total: MoneyBySector
    total_by_sex: Mapping[Sex, MoneyBySector]
    ratios: Mapping[str, float] = field(default_factory=dict)
    health_loss: Optional[HealthLossSummary] = None

    def cell(self, population: Population, cancer_type: CancerType, stage: Stage,
             sex: Optional[Sex] = None) -> CellBurden:
        """One sex, or both sexes summed when ``sex`` is None."""
        if sex is not None:
            return self.cells[(population, cancer_type, stage, sex)]
        parts = [self.cells[(population, cancer_type, stage, s)] for s in SEXES]
        return CellBurden(math.fsum(p.cases for p in parts), _sum_money(p.cost for p in parts))

    def subtotal_by_sex(self, population: Population, sex: Sex) -> MoneyBySector:
        return _sum_money(b.cost for k, b in self.cells.items()
                          if k[0] is population and k[3] is sex)

    def cases(self, population: Population, sex: Optional[Sex] = None) -> float:
        return math.fsum(b.cases for k, b in self.cells.items()
                         if k[0] is population and (sex is None or k[3] is sex))


def cell_burden(cases: float, card: SectorCosts | PatientCostCard,
                shares: SectorShares) -> MoneyBySector:
    """Patients are spread over sectors by the coverage shares."""
    if cases < 0:
        raise ValueError("case count must be nonnegative")
    per_patient = card.sectors if isinstance(card, PatientCostCard) else card
    return _total_money(SectorCosts(*(cases * s * c for s, c in
                                      zip(shares.as_tuple(), per_patient.as_tuple()))))


def default_prevalent_death_mix(calibrated: PrevalenceByYear,
                                survival: SurvivalTable) -> dict[tuple[CancerType, Stage], float]:
    """Share of prevalent deaths per (type, stage).

    Survivors in year k die over the next year with probability
    1 - S(k+1)/S(k); year 6 is extended geometrically from years 4-5.
    """
    weights = {}
    for t, s in TUMOURS:
        curve = list(survival.curve(t, s))
        curve.append(curve[4] * curve[4] / curve[3] if curve[3] > 0 else 0.0)
        hazard = [1.0 - curve[k + 1] / curve[k] if curve[k] > 0 else 1.0 for k in range(5)]
        weights[(t, s)] = math.fsum(
            calibrated.survivors[(t, s, sex)][k] * hazard[k] for sex in SEXES for k in range(5))
    total = math.fsum(weights.values())
    if total <= 0:
        return {k: 0.0 for k in weights}
    return {k: v / total for k, v in weights.items()}


def death_burden(split: DeathSplit, death_costs: DeathCostCard,
                 prevalent_death_mix: Mapping[tuple[CancerType, Stage], float],
                 shares: SectorShares) -> dict[Population, DeathRow]:
    if abs(math.fsum(prevalent_death_mix.values()) - 1.0) > 1e-9 and split.prevalent > 0:
        raise ValueError("prevalent death mix must sum to 1")
    prevalent = [death_costs.prevalent[k].sectors.as_tuple() for k in TUMOURS]
    mix = [prevalent_death_mix.get(k, 0.0) for k in TUMOURS]
    per_death = {
        Population.INCIDENT: death_costs.incident.sectors,
        Population.PREVALENT: SectorCosts(*(math.fsum(m * c[i] for m, c in zip(mix, prevalent))
                                            for i in range(3))),
    }
    rows = {}
    for population in POPULATIONS:
        deaths = split.of(population)
        by_sex = {sex: split.by_sex[(population, sex)] for sex in SEXES}
        rows[population] = DeathRow(
            population, deaths, by_sex,
            cell_burden(deaths, per_death[population], shares),
            {sex: cell_burden(n, per_death[population], shares) for sex, n in by_sex.items()},
        )
    return rows


def _ratios(total: float, denominators: Optional[Denominators]) -> dict[str, float]:
    if denominators is None:
        return {}
    out = {}
    if denominators.total_health_expenditure_usd:
        out["share_of_health_expenditure"] = total / denominators.total_health_expenditure_usd
    if denominators.gdp_usd:
        out["share_of_gdp"] = total / denominators.gdp_usd
    return out


def assemble_report(cases: CaseMatrix, cards: Mapping[CellKey, PatientCostCard],
                    death_rows: Mapping[Population, DeathRow], shares: SectorShares,
                    denominators: Optional[Denominators] = None,
                    health_loss: Optional[HealthLossSummary] = None) -> BurdenReport:
    cells = {}
    for population in POPULATIONS:
        for t, s in TUMOURS:
            for sex in SEXES:
                key = (population, t, s, sex)
                n = cases[key]
                cells[key] = CellBurden(n, cell_burden(n, cards[(population, t, s)], shares))
    subtotals = {p: _sum_money(b.cost for k, b in cells.items() if k[0] is p)
                 for p in POPULATIONS}
    population_totals = {p: _sum_money([subtotals[p], death_rows[p].cost]) for p in POPULATIONS}
    total = _sum_money([subtotals[Population.INCIDENT], subtotals[Population.PREVALENT],
                        death_rows[Population.INCIDENT].cost,
                        death_rows[Population.PREVALENT].cost])
    by_sex = {
        sex: _sum_money([b.cost for k, b in cells.items() if k[3] is sex]
                        + [death_rows[p].cost_by_sex[sex] for p in POPULATIONS])
        for sex in SEXES
    }
    return BurdenReport(cells, dict(death_rows), subtotals, population_totals, total, by_sex,
                        _ratios(total.weighted, denominators), health_loss)


@dataclass(frozen=True)
class Composition:
    """Category shares of one cost card, per sector and weighted."""

    key: CellKey
    shares: Mapping[Category, Mapping[str, float]]
    defined: bool


def composition_breakdown(cards: Mapping[CellKey, PatientCostCard]) -> dict[CellKey,
                                                                            Composition]:
    out = {}
    columns = [str(s) for s in SECTORS] + ["weighted"]
    for key, card in cards.items():
        totals = list(card.sectors.as_tuple()) + [card.weighted]
        defined = all(t > 0 for t in totals)
        shares: dict[Category, dict[str, float]] = {}
        for category, costs in card.breakdown.items():
            values = list(costs.as_tuple()) + [card.shares.weigh(costs)]
            shares[category] = {
                col: (v / tot if tot > 0 else math.nan)
                for col, v, tot in zip(columns, values, totals)
            }
        out[key] = Composition(key, shares, defined)
    return out


# report layout: one row per cell, death row and subtotal, plus the total
TABLE_COLUMNS = ("cases_male", "cases_female", "cases_total", "cost_male", "cost_female",
                 "cost_total", "cost_public", "cost_social_security", "cost_private")


def _row(cases: Mapping[Sex, float], costs: Mapping[Sex, MoneyBySector],
         total: MoneyBySector) -> dict[str, float]:
    return {
        "cases_male": cases[Sex.MALE],
        "cases_female": cases[Sex.FEMALE],
        "cases_total": math.fsum(cases.values()),
        "cost_male": costs[Sex.MALE].weighted,
        "cost_female": costs[Sex.FEMALE].weighted,
        "cost_total": total.weighted,
        "cost_public": total.public,
        "cost_social_security": total.social_security,
        "cost_private": total.private,
    }


def table_rows(report: BurdenReport) -> dict[str, dict[str, float]]:
    """Flatten ``report`` into labelled rows with :data:`TABLE_COLUMNS`.

    Labels look like ``incident/NSCLC/IV``, ``incident/death``,
    ``incident/subtotal`` and ``total``.  Subtotal rows include the death
    row's cost but count cases only; the total row carries no counts.
    """
    rows: dict[str, dict[str, float]] = {}
    for population in POPULATIONS:
        for t, s in TUMOURS:
            cells = {sex: report.cells[(population, t, s, sex)] for sex in SEXES}
            rows[f"{population}/{t}/{s}"] = _row(
                {sex: c.cases for sex, c in cells.items()},
                {sex: c.cost for sex, c in cells.items()},
                report.cell(population, t, s).cost)
        death = report.deaths[population]
        rows[f"{population}/death"] = _row(death.deaths_by_sex, death.cost_by_sex, death.cost)
        by_sex = {sex: _sum_money([report.subtotal_by_sex(population, sex),
                                   death.cost_by_sex[sex]]) for sex in SEXES}
        rows[f"{population}/subtotal"] = _row(
            {sex: report.cases(population, sex) for sex in SEXES}, by_sex,
            report.population_totals[population])
    total = _row({sex: math.nan for sex in SEXES}, report.total_by_sex, report.total)
    rows["total"] = {k: v for k, v in total.items() if not k.startswith("cases")}
    return rows


def health_rows(health: HealthLossSummary) -> dict[str, dict[str, float]]:
    return {
        name: {"male": by_sex[Sex.MALE], "female": by_sex[Sex.FEMALE], "total": total}
        for name, by_sex, total in (("yld", health.yld_by_sex, health.yld),
                                    ("yll", health.yll_by_sex, health.yll),
                                    ("daly", health.daly_by_sex, health.daly))
    }
