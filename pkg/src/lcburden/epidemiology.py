"""Case matrices, survival roll-forward, prevalence calibration and death split.

Counts stay real-valued throughout; rounding happens only when reports are
rendered.
"""

from __future__ import annotations

import math
from collections.abc import Mapping
from dataclasses import dataclass, field
from typing import Optional

from lcburden.bundle import EpiInputs, StageDistribution, SurvivalTable
from lcburden.domain import (
    POPULATIONS,
    SEXES,
    TUMOURS,
    YEARS,
    CancerType,
    Population,
    Sex,
    Stage,
)

CaseKey = tuple[Population, CancerType, Stage, Sex]


@dataclass(frozen=True)
class CaseMatrix:
    """Case counts keyed by (population, type, stage, sex)."""

    counts: Mapping[CaseKey, float] = field(default_factory=dict)

    def __getitem__(self, key: CaseKey) -> float:
        return self.counts.get(key, 0.0)

    def __add__(self, other: "CaseMatrix") -> "CaseMatrix":
        merged = dict(self.counts)
        for key, value in other.counts.items():
            merged[key] = merged.get(key, 0.0) + value
        return CaseMatrix(merged)

    def scaled(self, factor: float) -> "CaseMatrix":
        return CaseMatrix({k: v * factor for k, v in self.counts.items()})

    def tumour(self, population: Population, cancer_type: CancerType, stage: Stage) -> float:
        return math.fsum(self[(population, cancer_type, stage, sex)] for sex in SEXES)

    def total(self, population: Optional[Population] = None,
              sex: Optional[Sex] = None) -> float:
        return math.fsum(v for (p, _, _, s), v in self.counts.items()
                         if (population is None or p is population)
                         and (sex is None or s is sex))

    def only(self, population: Population) -> "CaseMatrix":
        return CaseMatrix({k: v for k, v in self.counts.items() if k[0] is population})


@dataclass(frozen=True)
class PrevalenceByYear:
    """Survivors of each annual incident cohort, k = 1..5 years after diagnosis."""

    survivors: Mapping[tuple[CancerType, Stage, Sex], tuple[float, ...]]

    def year_total(self, year: int) -> float:
        return math.fsum(curve[year - 1] for curve in self.survivors.values())

    def scaled(self, first_year: float, later_years: float) -> "PrevalenceByYear":
        return PrevalenceByYear({
            key: (curve[0] * first_year, *(v * later_years for v in curve[1:]))
            for key, curve in self.survivors.items()
        })


@dataclass(frozen=True)
class CalibrationFactors:
    f1: float
    f2to5: float
    # modelled minus target 3-year prevalence, when a target was supplied
    residual_3y: Optional[float] = None


@dataclass(frozen=True)
class DeathSplit:
    incident: float
    prevalent: float
    by_sex: Mapping[tuple[Population, Sex], float]

    @property
    def total(self) -> float:
        return self.incident + self.prevalent

    def of(self, population: Population) -> float:
        return self.incident if population is Population.INCIDENT else self.prevalent

    def scaled(self, factor: float) -> "DeathSplit":
        return DeathSplit(self.incident * factor, self.prevalent * factor,
                          {k: v * factor for k, v in self.by_sex.items()})


def incidence_from_mortality(deaths: float, mi_ratio: float) -> float:
    """Annual incident cases implied by deaths and a mortality:incidence ratio."""
    if not mi_ratio > 0:
        raise ValueError(f"mortality:incidence ratio must be positive, got {mi_ratio}")
    return deaths / mi_ratio


def decompose_cases(total: float, stage_distribution: StageDistribution,
                    sex_split: float) -> CaseMatrix:
    """Split ``total`` incident cases by type, stage and sex (``sex_split`` = male share)."""
    sex_shares = {Sex.MALE: sex_split, Sex.FEMALE: 1.0 - sex_split}
    return CaseMatrix({
        (Population.INCIDENT, t, s, sex): total * stage_distribution.share(t, s) * share
        for t, s in TUMOURS
        for sex, share in sex_shares.items()
    })


def roll_forward(incident: CaseMatrix, survival: SurvivalTable,
                 sex_multipliers: Optional[Mapping[Sex, float]] = None) -> PrevalenceByYear:
    """Survivors of five identical past cohorts equal to the current incident slice.

    ``sex_multipliers`` optionally scales survival per sex (capped at 1).
    """
    survivors = {}
    for t, s in TUMOURS:
        curve = survival.curve(t, s)
        for sex in SEXES:
            m = 1.0 if sex_multipliers is None else sex_multipliers.get(sex, 1.0)
            cohort = incident[(Population.INCIDENT, t, s, sex)]
            survivors[(t, s, sex)] = tuple(cohort * min(1.0, p * m) for p in curve)
    return PrevalenceByYear(survivors)


def _ratio(target: float, raw: float, what: str) -> float:
    if raw > 0:
        return target / raw
    if target == 0:
        return 0.0
    raise ValueError(f"cannot calibrate {what}: modelled survivors are zero but target is "
                     f"{target}")


def calibrate_prevalence(raw: PrevalenceByYear,
                         targets: EpiInputs) -> tuple[CaseMatrix, CalibrationFactors]:
    """Scale year-1 and years-2..5 survivors to the 1- and 5-year prevalence targets."""
    year1 = raw.year_total(1)
    later = math.fsum(raw.year_total(k) for k in YEARS[1:])
    f1 = _ratio(targets.prevalence_1y, year1, "1-year prevalence")
    f2to5 = _ratio(targets.prevalence_5y - targets.prevalence_1y, later, "2-5 year prevalence")
    residual = None
    if targets.prevalence_3y is not None:
        modelled = f1 * year1 + f2to5 * (raw.year_total(2) + raw.year_total(3))
        residual = modelled - targets.prevalence_3y
    cells = {
        (Population.PREVALENT, t, s, sex): f1 * curve[0] + f2to5 * math.fsum(curve[1:])
        for (t, s, sex), curve in raw.survivors.items()
    }
    return CaseMatrix(cells), CalibrationFactors(f1, f2to5, residual)


def split_deaths(epi: EpiInputs) -> DeathSplit:
    """Deaths among incident cases are those not surviving the first year."""
    if epi.prevalence_1y > epi.incidence:
        raise ValueError("1-year prevalence exceeds incidence")
    incident = epi.incidence - epi.prevalence_1y
    prevalent = epi.deaths - incident
    if prevalent < 0:
        raise ValueError(f"inconsistent inputs: prevalent deaths would be {prevalent:g}")
    by_sex = {}
    for population, count in zip(POPULATIONS, (incident, prevalent)):
        male = epi.male_share_of_deaths(population)
        by_sex[(population, Sex.MALE)] = count * male
        by_sex[(population, Sex.FEMALE)] = count * (1.0 - male)
    return DeathSplit(incident, prevalent, by_sex)
