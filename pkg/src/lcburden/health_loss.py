"""Years of life lost, years lived with disability and DALYs."""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping
from dataclasses import dataclass

from lcburden.bundle import DisabilityWeights, LifeTableRow
from lcburden.domain import SEXES, Sex, stage_class
from lcburden.epidemiology import CaseKey, CaseMatrix


@dataclass(frozen=True)
class YLDResult:
    by_sex: Mapping[Sex, float]
    cells: Mapping[CaseKey, float]


@dataclass(frozen=True)
class HealthLossSummary:
    yll_by_sex: Mapping[Sex, float]
    yld_by_sex: Mapping[Sex, float]
    daly_by_sex: Mapping[Sex, float]
    yld_cells: Mapping[CaseKey, float]

    @property
    def yll(self) -> float:
        return math.fsum(self.yll_by_sex.values())

    @property
    def yld(self) -> float:
        return math.fsum(self.yld_by_sex.values())

    @property
    def daly(self) -> float:
        return self.yll + self.yld


def compute_yll(life_table: Iterable[LifeTableRow]) -> dict[Sex, float]:
    """Deaths times remaining life expectancy, summed per sex (no discounting)."""
    terms: dict[Sex, list[float]] = {sex: [] for sex in SEXES}
    for row in life_table:
        terms[row.sex].append(row.deaths * row.life_expectancy)
    return {sex: math.fsum(values) for sex, values in terms.items()}


def compute_yld(cases: CaseMatrix, weights: DisabilityWeights) -> YLDResult:
    cells = {
        key: count * weights.weight(key[0], stage_class(key[1], key[2]))
        for key, count in cases.counts.items()
    }
    by_sex = {sex: math.fsum(v for k, v in cells.items() if k[3] is sex) for sex in SEXES}
    return YLDResult(by_sex, cells)


def compute_daly(yll: Mapping[Sex, float], yld: YLDResult) -> HealthLossSummary:
    if set(yll) != set(yld.by_sex):
        raise ValueError("YLL and YLD must cover the same sexes")
    daly = {sex: yll[sex] + yld.by_sex[sex] for sex in yll}
    return HealthLossSummary(dict(yll), dict(yld.by_sex), daly, dict(yld.cells))
