import dataclasses
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lcburden import validate_bundle
from lcburden.bundle import LifeTableRow, SectorCosts, SectorShares, UnitCost
from lcburden.domain import (
    CancerType,
    Category,
    Population,
    RegimenClass,
    Sex,
    Stage,
    StageClass,
)

NSCLC_IV = (CancerType.NSCLC, Stage.IV)
INC_IV = (Population.INCIDENT, *NSCLC_IV)


def test_shipped_bundle_is_clean(bundle):
    report = validate_bundle(bundle)
    assert report.ok
    assert report.errors == [] and report.warnings == []


# -- one corruption per invariant; each takes the bundle and a bad value -------

def _epi(name):
    return lambda b, v: dataclasses.replace(b, epi=dataclasses.replace(b.epi, **{name: v}))


def _manifest(**kw):
    return lambda b, v: dataclasses.replace(
        b, manifest=dataclasses.replace(b.manifest, **{k: f(v) for k, f in kw.items()}))


def _shares(b, v):
    s = b.shares
    return dataclasses.replace(b, manifest=dataclasses.replace(
        b.manifest, sector_shares=SectorShares(v, s.social_security, s.private)))


def _type_share(b, v):
    sd = b.stage_distribution
    return dataclasses.replace(b, stage_distribution=dataclasses.replace(
        sd, type_shares={**sd.type_shares, CancerType.SCLC: v}))


def _stage_share(b, v):
    sd = b.stage_distribution
    return dataclasses.replace(b, stage_distribution=dataclasses.replace(
        sd, stage_shares={**sd.stage_shares, NSCLC_IV: v}))


def _survival(year):
    def corrupt(b, v):
        curve = list(b.survival.probabilities[NSCLC_IV])
        curve[year - 1] = v
        return dataclasses.replace(b, survival=dataclasses.replace(
            b.survival, probabilities={**b.survival.probabilities, NSCLC_IV: tuple(curve)}))
    return corrupt


def _life(field):
    def corrupt(b, v):
        rows = list(b.life_table)
        rows[10] = dataclasses.replace(rows[10], **{field: v})
        return dataclasses.replace(b, life_table=tuple(rows))
    return corrupt


def _weight(b, v):
    w = b.disability_weights
    return dataclasses.replace(b, disability_weights=dataclasses.replace(
        w, weights={**w.weights, (Population.PREVALENT, StageClass.LOCALIZED): v}))


def _unit_cost(b, v):
    u = b.unit_costs["chest_ct"]
    return dataclasses.replace(b, unit_costs={
        **b.unit_costs, "chest_ct": UnitCost(u.resource, u.category, SectorCosts(v, 1.0, 1.0))})


def _quantity(b, v):
    rows = list(b.resource_profiles)
    rows[0] = dataclasses.replace(rows[0], quantity=v)
    return dataclasses.replace(b, resource_profiles=tuple(rows))


def _drug(field):
    return lambda b, v: dataclasses.replace(b, drug_costs={
        **b.drug_costs, INC_IV: dataclasses.replace(b.drug_costs[INC_IV], **{field: v})})


def _ae_rate(b, v):
    ae = b.adverse_events
    return dataclasses.replace(b, adverse_events=dataclasses.replace(
        ae, rates={**ae.rates, ("anemia", RegimenClass.CHEMOTHERAPY): v}))


def _ae_cost(b, v):
    ae = b.adverse_events
    return dataclasses.replace(b, adverse_events=dataclasses.replace(
        ae, costs={**ae.costs, "anemia": SectorCosts(1.0, v, 1.0)}))


def _class_mix(b, v):
    ae = b.adverse_events
    mix = dict(ae.class_mix[INC_IV])
    mix[RegimenClass.CHEMOTHERAPY] = v
    return dataclasses.replace(b, adverse_events=dataclasses.replace(
        ae, class_mix={**ae.class_mix, INC_IV: mix}))


def _death(field):
    return lambda b, v: dataclasses.replace(
        b, death_costs=dataclasses.replace(b.death_costs, **{field: v}))


def _override(b, v):
    dc = b.death_costs
    return dataclasses.replace(b, death_costs=dataclasses.replace(
        dc, overrides={**dc.overrides, NSCLC_IV: SectorCosts(v, 1.0, 1.0)}))


def _death_mix(b, v):
    return dataclasses.replace(b, prevalent_death_mix={**b.prevalent_death_mix, NSCLC_IV: v})


def _sex_multiplier(b, v):
    return dataclasses.replace(b, survival_sex_multipliers={Sex.MALE: v, Sex.FEMALE: 1.0})


below_zero = st.floats(-1e6, -1e-6)
above_one = st.floats(1.0 + 1e-6, 1e6)
out_of_unit = below_zero | above_one
non_finite = st.sampled_from([math.nan, math.inf, -math.inf])

def _iterations(b, v):
    mc = dataclasses.replace(b.manifest.mc_defaults, iterations=v)
    return dataclasses.replace(b, manifest=dataclasses.replace(b.manifest, mc_defaults=mc))


# name -> (corruption, a boundary value, strategy of out-of-domain values)
CORRUPTIONS = {
    "exchange_rate": (_manifest(exchange_rate=lambda v: v), 0.0, st.floats(-1e6, 0.0)),
    "sector_share": (_shares, 0.3799, out_of_unit | st.floats(0.0, 0.37) | st.floats(0.39, 1.0)),
    "mc_iterations": (_iterations, 0, st.integers(-1000, 0)),
    "incidence": (_epi("incidence"), -1.0, below_zero | non_finite),
    "prevalence_1y": (_epi("prevalence_1y"), 12111.0, st.floats(12110.5, 1e6) | below_zero),
    "prevalence_5y": (_epi("prevalence_5y"), 6442.0, st.floats(-1e6, 6442.0)),
    "prevalence_3y": (_epi("prevalence_3y"), 14104.0,
                      st.floats(-1e6, 6442.0) | st.floats(14104, 1e6)),
    "deaths": (_epi("deaths"), 5666.0, st.floats(-1e6, 5666.0)),
    "mi_ratio": (_epi("mi_ratio"), 0.0, st.floats(-10, 0.0) | st.floats(1.0 + 1e-6, 10)),
    "sex_split": (_epi("sex_split_incident"), 1.01, out_of_unit),
    "sex_split_deaths": (_epi("sex_split_prevalent_deaths"), -0.01, out_of_unit),
    "type_share": (_type_share, 0.16, out_of_unit | st.floats(0.0, 0.1499) | st.floats(0.1501, 1)),
    "stage_share": (_stage_share, 0.56,
                    out_of_unit | st.floats(0.0, 0.5499) | st.floats(0.5501, 1)),
    "survival_range": (_survival(1), 1.5, out_of_unit),
    "survival_monotone": (_survival(3), 0.12, st.floats(0.1101, 1.0)),
    "life_deaths": (_life("deaths"), -1.0, below_zero),
    "life_expectancy": (_life("life_expectancy"), -1.0, below_zero),
    "disability_weight": (_weight, 1.2, out_of_unit),
    "unit_cost": (_unit_cost, math.nan, below_zero | non_finite),
    "quantity": (_quantity, -0.5, below_zero),
    "drug_cost": (_drug("cost_per_patient_year"), -1.0, below_zero),
    "drug_share": (_drug("drug_share_of_total"), 96.0, out_of_unit),
    "ae_rate": (_ae_rate, 6.85, out_of_unit),
    "ae_cost": (_ae_cost, -1.0, below_zero),
    "class_mix": (_class_mix, 1.0, out_of_unit | st.floats(0.0, 0.1) | st.floats(0.3, 1.0)),
    "ward_days": (_death("incident_ward_days"), -4.8, below_zero),
    "treatment_fraction": (_death("treatment_fraction"), -0.5, below_zero),
    "death_override": (_override, -1.0, below_zero),
    "death_mix": (_death_mix, 0.0, out_of_unit | st.floats(0.0, 0.45) | st.floats(0.55, 1.0)),
    "sex_multiplier": (_sex_multiplier, 0.0, st.floats(-10, 0.0) | st.floats(3.4, 100)),
}


@pytest.mark.parametrize("name", sorted(CORRUPTIONS))
def test_each_corruption_is_flagged(bundle, name):
    corrupt, edge, _ = CORRUPTIONS[name]
    report = validate_bundle(corrupt(bundle, edge))
    assert report.errors or report.warnings, f"{name}={edge!r} not flagged"


@pytest.mark.property
@settings(max_examples=300, deadline=None)
@given(data=st.data())
def test_validator_fuzz(bundle, data):
    name = data.draw(st.sampled_from(sorted(CORRUPTIONS)), label="field")
    corrupt, _, values = CORRUPTIONS[name]
    value = data.draw(values, label="value")
    report = validate_bundle(corrupt(bundle, value))
    assert report.errors or report.warnings


def test_missing_pieces_are_errors(bundle):
    ae = bundle.adverse_events
    mix = {k: v for k, v in ae.class_mix.items() if k != INC_IV}
    report = validate_bundle(dataclasses.replace(
        bundle, adverse_events=dataclasses.replace(ae, class_mix=mix)))
    assert any("class mix missing" in e for e in report.errors)

    # without a drug cost the regimens are the fallback, so drop both
    drugs = {k: v for k, v in bundle.drug_costs.items() if k != INC_IV}
    regimens = tuple(r for r in bundle.regimens
                     if (r.population, r.cancer_type, r.stage) != INC_IV)
    report = validate_bundle(dataclasses.replace(bundle, drug_costs=drugs, regimens=regimens))
    assert any("no drug cost" in e for e in report.errors)

    units = {k: v for k, v in bundle.unit_costs.items() if k != "general_ward_admission"}
    report = validate_bundle(dataclasses.replace(bundle, unit_costs=units))
    assert any("general_ward_admission" in e for e in report.errors)


def test_none_class_must_carry_no_events(bundle):
    report = validate_bundle(_ae_rate(bundle, 0.5))
    assert report.ok
    ae = bundle.adverse_events
    rates = {**ae.rates, ("anemia", RegimenClass.NONE): 0.1}
    report = validate_bundle(dataclasses.replace(
        bundle, adverse_events=dataclasses.replace(ae, rates=rates)))
    assert any("none must be zero" in e for e in report.errors)


def test_implausible_life_expectancy_is_a_warning(bundle):
    # the printed male 15-19 expectancy of 5.40 is a typo for 59.40
    report = validate_bundle(_life_row(bundle, Sex.MALE, "15-19", 5.40))
    assert report.ok
    assert any("15-19" in w for w in report.warnings)


def _life_row(bundle, sex, age, expectancy):
    rows = tuple(LifeTableRow(r.sex, r.age_group, r.deaths, expectancy)
                 if (r.sex, r.age_group) == (sex, age) else r for r in bundle.life_table)
    return dataclasses.replace(bundle, life_table=rows)


def test_mi_ratio_far_from_counts_warns(bundle):
    report = validate_bundle(_epi("mi_ratio")(bundle, 0.6))
    assert report.ok and any("mi_ratio" in w for w in report.warnings)


def test_category_enum_is_closed():
    assert Category.parse("Surgery") is Category.SURGERY
