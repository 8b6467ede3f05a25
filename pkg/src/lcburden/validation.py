"""Domain checks run on a loaded bundle before any computation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from lcburden.bundle import (
    PALLIATIVE_RESOURCE,
    SHARE_TOLERANCE,
    WARD_RESOURCE,
    ScenarioBundle,
)
from lcburden.domain import (
    POPULATIONS,
    SEXES,
    STAGES,
    TUMOURS,
    RegimenClass,
    StageClass,
)

LIFE_TABLE_DEATHS_TOLERANCE = 0.005
MI_RATIO_WARN_TOLERANCE = 0.05


@dataclass
class ValidationReport:
    errors: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors

    def lines(self) -> list[str]:
        return [f"error: {e}" for e in self.errors] + [f"warning: {w}" for w in self.warnings]


def _is_fraction(x) -> bool:
    return x is not None and math.isfinite(x) and 0.0 <= x <= 1.0


def _sums_to_one(values) -> bool:
    return abs(math.fsum(values) - 1.0) <= SHARE_TOLERANCE


def _check_manifest(b: ScenarioBundle, r: ValidationReport) -> None:
    m = b.manifest
    if not m.exchange_rate > 0:
        r.errors.append(f"exchange_rate must be positive (got {m.exchange_rate})")
    shares = m.sector_shares.as_tuple()
    if not all(_is_fraction(s) for s in shares):
        r.errors.append(f"sector shares must lie in [0, 1] (got {shares})")
    if not _sums_to_one(shares):
        r.errors.append(f"sector shares sum to {math.fsum(shares)}, not 1")
    mc = m.mc_defaults
    if mc.iterations < 1:
        r.errors.append("mc_defaults.iterations must be >= 1")
    if not 0 <= mc.seed < 2**64:
        r.errors.append("mc_defaults.seed must be an unsigned 64-bit integer")
    lo, hi = mc.percentiles
    if not (0 < lo < hi < 100):
        r.errors.append(f"percentiles must satisfy 0 < lower < upper < 100 (got {lo}, {hi})")
    d = m.denominators
    if d is not None:
        for name, value in vars(d).items():
            if value is not None and not value > 0:
                r.errors.append(f"denominator {name} must be positive")


def _check_epi(b: ScenarioBundle, r: ValidationReport) -> None:
    e = b.epi
    for name in ("incidence", "prevalence_1y", "prevalence_5y", "deaths"):
        value = getattr(e, name)
        if not (math.isfinite(value) and value >= 0):
            r.errors.append(f"epi.{name} must be a nonnegative count (got {value})")
    if e.prevalence_1y > e.prevalence_5y:
        r.errors.append("epi.prevalence_1y exceeds prevalence_5y")
    if e.prevalence_3y is not None and not (e.prevalence_1y <= e.prevalence_3y
                                            <= e.prevalence_5y):
        r.errors.append("epi.prevalence_3y must lie between the 1- and 5-year prevalence")
    if not 0 < e.mi_ratio <= 1:
        r.errors.append(f"epi.mi_ratio must lie in (0, 1] (got {e.mi_ratio})")
    for name in ("sex_split_incident", "sex_split_incident_deaths",
                 "sex_split_prevalent_deaths"):
        value = getattr(e, name)
        if value is not None and not _is_fraction(value):
            r.errors.append(f"epi.{name} must lie in [0, 1] (got {value})")
    if e.prevalence_1y > e.incidence:
        r.errors.append("epi.prevalence_1y exceeds incidence; incident deaths would be negative")
    elif e.deaths < e.incidence - e.prevalence_1y:
        r.errors.append("epi.deaths is smaller than incident deaths "
                        "(incidence - prevalence_1y); prevalent deaths would be negative")
    if e.incidence > 0 and 0 < e.mi_ratio <= 1:
        implied = e.deaths / e.incidence
        if abs(implied - e.mi_ratio) > MI_RATIO_WARN_TOLERANCE * e.mi_ratio:
            r.warnings.append(f"epi.mi_ratio {e.mi_ratio} differs from deaths/incidence "
                              f"{implied:.4f} by more than 5%")


def _check_stage_distribution(b: ScenarioBundle, r: ValidationReport) -> None:
    sd = b.stage_distribution
    missing = [t for t in STAGES if t not in sd.type_shares]
    if missing:
        r.errors.append(f"type shares missing for {missing}")
    if not all(_is_fraction(v) for v in sd.type_shares.values()):
        r.errors.append("type shares must lie in [0, 1]")
    if not _sums_to_one(sd.type_shares.values()):
        r.errors.append(f"type shares sum to {math.fsum(sd.type_shares.values())}, not 1")
    for cancer_type, stages in STAGES.items():
        absent = [s for s in stages if (cancer_type, s) not in sd.stage_shares]
        if absent:
            r.errors.append(f"{cancer_type} stage shares missing for {[str(s) for s in absent]}")
            continue
        values = [sd.stage_shares[(cancer_type, s)] for s in stages]
        if not all(_is_fraction(v) for v in values):
            r.errors.append(f"{cancer_type} stage shares must lie in [0, 1]")
        if not _sums_to_one(values):
            r.errors.append(f"{cancer_type} stage shares sum to {math.fsum(values)}, not 1")


def _check_survival(b: ScenarioBundle, r: ValidationReport) -> None:
    for key in TUMOURS:
        curve = b.survival.probabilities.get(key)
        label = f"{key[0]} {key[1]}"
        if curve is None:
            r.errors.append(f"survival missing for {label}")
            continue
        if len(curve) != 5:
            r.errors.append(f"survival for {label} must have 5 years")
            continue
        if not all(_is_fraction(p) for p in curve):
            r.errors.append(f"survival for {label} must lie in [0, 1]")
        if any(later > earlier for earlier, later in zip(curve, curve[1:])):
            r.errors.append(f"survival not monotone for {label}: {curve}")
    mult = b.survival_sex_multipliers
    if mult is not None:
        for sex, value in mult.items():
            if not (math.isfinite(value) and value > 0):
                r.errors.append(f"survival multiplier for {sex} must be positive")
        for key, curve in b.survival.probabilities.items():
            if max(mult.values(), default=1.0) * max(curve, default=0.0) > 1.0:
                r.warnings.append(f"sex multiplier pushes survival above 1 for "
                                  f"{key[0]} {key[1]}")
                break


def _check_life_table(b: ScenarioBundle, r: ValidationReport) -> None:
    totals = {sex: 0.0 for sex in SEXES}
    previous: dict = {}
    for row in b.life_table:
        label = f"life table {row.sex} {row.age_group}"
        if not (math.isfinite(row.deaths) and row.deaths >= 0):
            r.errors.append(f"{label}: deaths must be nonnegative")
        if not (math.isfinite(row.life_expectancy) and row.life_expectancy >= 0):
            r.errors.append(f"{label}: life expectancy must be nonnegative")
        totals[row.sex] += row.deaths
        last = previous.get(row.sex)
        if last is not None and row.life_expectancy > last.life_expectancy:
            r.warnings.append(f"{label}: life expectancy {row.life_expectancy} rises from "
                              f"{last.life_expectancy} at {last.age_group}")
        if last is not None and last.life_expectancy - row.life_expectancy > 30:
            r.warnings.append(f"{label}: life expectancy drops abruptly from "
                              f"{last.life_expectancy} at {last.age_group}")
        previous[row.sex] = row
    total = math.fsum(totals.values())
    deaths = b.epi.deaths
    if deaths > 0 and abs(total - deaths) > LIFE_TABLE_DEATHS_TOLERANCE * deaths:
        r.warnings.append(f"life table deaths sum to {total:g}, epi.deaths is {deaths:g}")


def _check_weights(b: ScenarioBundle, r: ValidationReport) -> None:
    for population in POPULATIONS:
        for klass in StageClass:
            w = b.disability_weights.weights.get((population, klass))
            if w is None:
                r.errors.append(f"disability weight missing for ({population}, {klass})")
            elif not _is_fraction(w):
                r.errors.append(f"disability weight ({population}, {klass}) must lie in [0, 1]")


def _check_costs(b: ScenarioBundle, r: ValidationReport) -> None:
    for unit in b.unit_costs.values():
        if not all(math.isfinite(c) and c >= 0 for c in unit.costs.as_tuple()):
            r.errors.append(f"unit cost {unit.resource} must be nonnegative")
    for row in b.resource_profiles:
        if row.resource not in b.unit_costs:
            r.errors.append(f"profile references unknown resource {row.resource}")
        if not (math.isfinite(row.quantity) and row.quantity >= 0):
            r.errors.append(f"profile quantity for {row.resource} "
                            f"({row.population} {row.cancer_type} {row.stage}) must be >= 0")
    for population in POPULATIONS:
        for cancer_type, stage in TUMOURS:
            key = (population, cancer_type, stage)
            label = "/".join(map(str, key))
            drug = b.drug_costs.get(key)
            regimens = b.regimens_for(*key)
            if (drug is None or drug.cost_per_patient_year is None) and not regimens:
                r.errors.append(f"no drug cost or regimens for {label}")
            if drug is not None:
                if drug.cost_per_patient_year is not None and not drug.cost_per_patient_year >= 0:
                    r.errors.append(f"drug cost for {label} must be nonnegative")
                if drug.drug_share_of_total is not None and not _is_fraction(
                        drug.drug_share_of_total):
                    r.errors.append(f"drug_share_of_total for {label} must lie in [0, 1]")
            if regimens:
                shares = [g.share_of_drug_cost for g in regimens]
                if not all(_is_fraction(s) for s in shares):
                    r.errors.append(f"regimen shares for {label} must lie in [0, 1]")
                covered = math.fsum(shares)
                if covered > 1 + SHARE_TOLERANCE or covered <= 0:
                    r.errors.append(f"regimen shares for {label} sum to {covered}; "
                                    "must lie in (0, 1]")
                if not all(g.cost_per_patient_year >= 0 for g in regimens):
                    r.errors.append(f"regimen costs for {label} must be nonnegative")
            mix = b.adverse_events.class_mix.get(key)
            if mix is None:
                r.errors.append(f"regimen class mix missing for {label}")
            else:
                if not all(_is_fraction(v) for v in mix.values()):
                    r.errors.append(f"class mix for {label} must lie in [0, 1]")
                if not _sums_to_one(mix.values()):
                    r.errors.append(f"class mix for {label} sums to {math.fsum(mix.values())}")
    ae = b.adverse_events
    for (event, klass), rate in ae.rates.items():
        if not _is_fraction(rate):
            r.errors.append(f"AE rate {event}/{klass} must lie in [0, 1]")
        if event not in ae.costs:
            r.errors.append(f"AE {event} has no cost")
        if klass is RegimenClass.NONE and rate > 0:
            r.errors.append(f"AE rate {event}/none must be zero")
    for event, costs in ae.costs.items():
        if not all(math.isfinite(c) and c >= 0 for c in costs.as_tuple()):
            r.errors.append(f"AE cost {event} must be nonnegative")


def _check_death_costs(b: ScenarioBundle, r: ValidationReport) -> None:
    dc = b.death_costs
    for name in ("incident_ward_days", "treatment_fraction", "palliative_units",
                 "prevalent_ward_days"):
        value = getattr(dc, name)
        if not (math.isfinite(value) and value >= 0):
            r.errors.append(f"death cost {name} must be nonnegative")
    if WARD_RESOURCE not in b.unit_costs:
        r.errors.append(f"unit cost table lacks {WARD_RESOURCE} (needed for death costs)")
    if dc.palliative_units > 0 and PALLIATIVE_RESOURCE not in b.unit_costs:
        r.errors.append(f"unit cost table lacks {PALLIATIVE_RESOURCE}")
    for key, costs in dc.overrides.items():
        if not all(math.isfinite(c) and c >= 0 for c in costs.as_tuple()):
            r.errors.append(f"death cost override {key[0]} {key[1]} must be nonnegative")
    mix = b.prevalent_death_mix
    if mix is not None:
        if not all(_is_fraction(v) for v in mix.values()):
            r.errors.append("prevalent death mix must lie in [0, 1]")
        if not _sums_to_one(mix.values()):
            r.errors.append(f"prevalent death mix sums to {math.fsum(mix.values())}, not 1")


def validate_bundle(bundle: ScenarioBundle) -> ValidationReport:
    """Check every domain invariant; errors block a run, warnings do not."""
    report = ValidationReport(warnings=list(bundle.load_warnings))
    for check in (_check_manifest, _check_epi, _check_stage_distribution, _check_survival,
                  _check_life_table, _check_weights, _check_costs, _check_death_costs):
        check(bundle, report)
    return report

