"""Deterministic pipeline: bundle in, burden report out."""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass
from typing import Optional

from lcburden.aggregation import (
    BurdenReport,
    assemble_report,
    death_burden,
    default_prevalent_death_mix,
)
from lcburden.bundle import CellKey, Denominators, ScenarioBundle
from lcburden.costing import (
    DeathCostCard,
    PatientCostCard,
    compute_cost_cards,
    death_cost_card,
)
from lcburden.domain import CancerType, Stage
from lcburden.epidemiology import (
    CalibrationFactors,
    CaseMatrix,
    DeathSplit,
    PrevalenceByYear,
    calibrate_prevalence,
    decompose_cases,
    roll_forward,
    split_deaths,
)
from lcburden.health_loss import HealthLossSummary, compute_daly, compute_yld, compute_yll


@dataclass(frozen=True)
class ModelResult:
    incident: CaseMatrix
    raw_prevalence: PrevalenceByYear
    calibrated_prevalence: PrevalenceByYear
    prevalent: CaseMatrix
    calibration: CalibrationFactors
    death_split: DeathSplit
    cards: Mapping[CellKey, PatientCostCard]
    death_costs: DeathCostCard
    prevalent_death_mix: Mapping[tuple[CancerType, Stage], float]
    health_loss: HealthLossSummary
    report: BurdenReport

    @property
    def cases(self) -> CaseMatrix:
        return self.incident + self.prevalent


def run_model(bundle: ScenarioBundle, *,
              cards: Optional[Mapping[CellKey, PatientCostCard]] = None,
              death_costs: Optional[DeathCostCard] = None,
              death_split: Optional[DeathSplit] = None,
              denominators: Optional[Denominators] = None) -> ModelResult:
    """Run every stage of the model on ``bundle``.

    Precomputed cost cards, death cost cards or a death split may be passed
    in; the Monte Carlo driver uses this to avoid re-costing each draw.
    """
    epi = bundle.epi
    incident = decompose_cases(epi.incidence, bundle.stage_distribution,
                               epi.sex_split_incident)
    raw = roll_forward(incident, bundle.survival, bundle.survival_sex_multipliers)
    prevalent, factors = calibrate_prevalence(raw, epi)
    calibrated = raw.scaled(factors.f1, factors.f2to5)
    split = death_split if death_split is not None else split_deaths(epi)

    if cards is None:
        cards = compute_cost_cards(bundle)
    if death_costs is None:
        death_costs = death_cost_card(bundle, cards)
    mix = bundle.prevalent_death_mix
    if mix is None:
        mix = default_prevalent_death_mix(calibrated, bundle.survival)
    death_rows = death_burden(split, death_costs, mix, bundle.shares)

    cases = incident + prevalent
    health = compute_daly(compute_yll(bundle.life_table),
                          compute_yld(cases, bundle.disability_weights))
    if denominators is None:
        denominators = bundle.manifest.denominators
    report = assemble_report(cases, cards, death_rows, bundle.shares, denominators, health)
    return ModelResult(incident, raw, calibrated, prevalent, factors, split, cards,
                       death_costs, mix, health, report)
