"""Micro-costing: per-patient annual cost cards and costs of death."""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from functools import cached_property

from lcburden.bundle import (
    PALLIATIVE_RESOURCE,
    WARD_RESOURCE,
    ZERO,
    AdverseEventInputs,
    CellKey,
    DeathCostInputs,
    MoneyBySector,
    ProfileRow,
    Regimen,
    ScenarioBundle,
    SectorCosts,
    SectorShares,
    UnitCost,
)
from lcburden.domain import (
    POPULATIONS,
    TUMOURS,
    CancerType,
    Category,
    Phase,
    Population,
    RegimenClass,
    Stage,
)


class CostingError(ValueError):
    pass


@dataclass(frozen=True)
class PatientCostCard:
    """Annual cost of one patient in a (population, type, stage) cell."""

    population: Population
    cancer_type: CancerType
    stage: Stage
    breakdown: Mapping[Category, SectorCosts]
    shares: SectorShares

    @property
    def key(self) -> CellKey:
        return (self.population, self.cancer_type, self.stage)

    @cached_property
    def sectors(self) -> SectorCosts:
        return SectorCosts(*(math.fsum(c.as_tuple()[i] for c in self.breakdown.values())
                             for i in range(3)))

    @property
    def weighted(self) -> float:
        return self.shares.weigh(self.sectors)

    @property
    def money(self) -> MoneyBySector:
        return MoneyBySector.of(self.sectors, self.shares)

    def scaled(self, factor: float) -> "PatientCostCard":
        return PatientCostCard(self.population, self.cancer_type, self.stage,
                               {k: v * factor for k, v in self.breakdown.items()}, self.shares)


@dataclass(frozen=True)
class DeathCostCard:
    incident: MoneyBySector
    prevalent: Mapping[tuple[CancerType, Stage], MoneyBySector]

    def scaled(self, factor: float, shares: SectorShares) -> "DeathCostCard":
        return DeathCostCard(
            MoneyBySector.of(self.incident.sectors * factor, shares),
            {k: MoneyBySector.of(v.sectors * factor, shares) for k, v in self.prevalent.items()},
        )


def weighted_unit_cost(values: SectorCosts, shares: SectorShares) -> float:
    return shares.weigh(values)


def _add(breakdown: dict[Category, SectorCosts], category: Category,
         costs: SectorCosts) -> None:
    breakdown[category] = breakdown.get(category, ZERO) + costs


def phase_resource_cost(rows: Iterable[ProfileRow],
                        unit_costs: Mapping[str, UnitCost]) -> dict[Category, SectorCosts]:
    """Sum quantity x unit cost per sector, grouped by composition category.

    Every resource used during diagnosis and staging is booked to the
    diagnosis category; later phases use the resource's own category.
    """
    breakdown: dict[Category, SectorCosts] = {}
    for row in rows:
        unit = unit_costs.get(row.resource)
        if unit is None:
            raise CostingError(f"unresolved resource {row.resource!r}")
        category = Category.DIAGNOSIS if row.phase is Phase.DIAGNOSIS else unit.category
        _add(breakdown, category, unit.costs * row.quantity)
    return breakdown


def extrapolate_drug_cost(regimens: Iterable) -> float:
    """Stage-average drug cost from the regimens that were itemised.

    Each regimen contributes ``cost_per_patient_year`` to the stage average
    and covers ``share_of_drug_cost`` of it, so the uncovered remainder is
    extrapolated by dividing by the covered share.  Accepts :class:`Regimen`
    objects or ``(share, cost)`` pairs.
    """
    pairs = [(r.share_of_drug_cost, r.cost_per_patient_year) if isinstance(r, Regimen)
             else tuple(r) for r in regimens]
    covered = math.fsum(share for share, _ in pairs)
    if not covered > 0:
        raise CostingError("regimens cover none of the drug cost")
    if covered > 1 + 1e-9:
        raise CostingError(f"regimen shares sum to {covered} > 1")
    return math.fsum(cost for _, cost in pairs) / covered


def adverse_event_cost(class_mix: Mapping[RegimenClass, float],
                       ae: AdverseEventInputs) -> SectorCosts:
    total = ZERO
    for klass, mix_share in class_mix.items():
        for (event, rate_class), rate in ae.rates.items():
            if rate_class is klass and rate:
                total = total + ae.costs[event] * (mix_share * rate)
    return total


def drug_cost(bundle: ScenarioBundle, key: CellKey) -> float:
    entry = bundle.drug_costs.get(key)
    if entry is not None and entry.cost_per_patient_year is not None:
        return entry.cost_per_patient_year
    regimens = bundle.regimens_for(*key)
    if not regimens:
        raise CostingError(f"no drug cost for {'/'.join(map(str, key))}")
    return extrapolate_drug_cost(regimens)


def annual_patient_cost(population: Population, cancer_type: CancerType, stage: Stage,
                        bundle: ScenarioBundle) -> PatientCostCard:
    key = (population, cancer_type, stage)
    breakdown: dict[Category, SectorCosts] = {}
    for phase in (Phase.DIAGNOSIS, Phase.TREATMENT):
        for category, costs in phase_resource_cost(bundle.profile(*key, phase),
                                                   bundle.unit_costs).items():
            _add(breakdown, category, costs)
    # acquisition prices are common to the three sectors
    _add(breakdown, Category.DRUGS, SectorCosts.uniform(drug_cost(bundle, key)))
    mix = bundle.adverse_events.class_mix.get(key, {})
    _add(breakdown, Category.ADVERSE_EVENTS, adverse_event_cost(mix, bundle.adverse_events))
    return PatientCostCard(population, cancer_type, stage, breakdown, bundle.shares)


def compute_cost_cards(bundle: ScenarioBundle) -> dict[CellKey, PatientCostCard]:
    return {(p, t, s): annual_patient_cost(p, t, s, bundle)
            for p in POPULATIONS for t, s in TUMOURS}


def _unit(unit_costs: Mapping[str, UnitCost], resource: str) -> SectorCosts:
    try:
        return unit_costs[resource].costs
    except KeyError:
        raise CostingError(f"unit cost table lacks {resource!r}") from None


def incident_death_cost(inputs: DeathCostInputs, unit_costs: Mapping[str, UnitCost],
                        shares: SectorShares) -> MoneyBySector:
    """Hospital ward days only; identical for every type and stage."""
    costs = _unit(unit_costs, WARD_RESOURCE) * inputs.incident_ward_days
    return MoneyBySector.of(costs, shares)


def prevalent_death_cost(cancer_type: CancerType, stage: Stage, annual_card: PatientCostCard,
                         inputs: DeathCostInputs, unit_costs: Mapping[str, UnitCost],
                         shares: SectorShares, *, use_overrides: bool = True) -> MoneyBySector:
    """Published override if present, otherwise part-year treatment + palliation + ward."""
    if use_overrides and (cancer_type, stage) in inputs.overrides:
        return MoneyBySector.of(inputs.overrides[(cancer_type, stage)], shares)
    costs = annual_card.sectors * inputs.treatment_fraction
    if inputs.palliative_units:
        costs = costs + _unit(unit_costs, PALLIATIVE_RESOURCE) * inputs.palliative_units
    costs = costs + _unit(unit_costs, WARD_RESOURCE) * inputs.prevalent_ward_days
    return MoneyBySector.of(costs, shares)


def death_cost_card(bundle: ScenarioBundle, cards: Mapping[CellKey, PatientCostCard],
                    *, use_overrides: bool = True) -> DeathCostCard:
    dc, units, shares = bundle.death_costs, bundle.unit_costs, bundle.shares
    prevalent = {
        (t, s): prevalent_death_cost(t, s, cards[(Population.PREVALENT, t, s)], dc, units,
                                     shares, use_overrides=use_overrides)
        for t, s in TUMOURS
    }
    return DeathCostCard(incident_death_cost(dc, units, shares), prevalent)
