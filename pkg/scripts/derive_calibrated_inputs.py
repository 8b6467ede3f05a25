"""Regenerate the calibrated tables of a scenario bundle.

Writes drug_costs.csv, class_mix.csv and prevalent_death_mix.csv from the
published per-patient annual costs, drug shares and prevalent death burden.
Everything else in the bundle is read as-is.

    python3 scripts/derive_calibrated_inputs.py data/argentina-2023
"""

from __future__ import annotations

import argparse
import csv
import math
from pathlib import Path

from lcburden.aggregation import default_prevalent_death_mix
from lcburden.bundle import load_bundle
from lcburden.costing import (
    adverse_event_cost,
    compute_cost_cards,
    death_cost_card,
    phase_resource_cost,
)
from lcburden.domain import TUMOURS, Phase, Population, RegimenClass, StageClass, stage_class
from lcburden.epidemiology import calibrate_prevalence, decompose_cases, roll_forward

I, P = Population.INCIDENT, Population.PREVALENT

# published weighted annual cost per patient and drug share of that cost
PUBLISHED = {
    (I, "NSCLC", "I"): (3641, None),
    (I, "NSCLC", "II"): (8941, 0.58),
    (I, "NSCLC", "III"): (18140, 0.86),
    (I, "NSCLC", "IV"): (37356, 0.96),
    (I, "SCLC", "limited"): (4012, 0.37),
    (I, "SCLC", "extended"): (4129, 0.72),
    (P, "NSCLC", "I"): (11102, 0.83),
    (P, "NSCLC", "II"): (11102, 0.83),
    (P, "NSCLC", "III"): (14947, 0.93),
    (P, "NSCLC", "IV"): (30195, 0.96),
    (P, "SCLC", "limited"): (676, 0.19),
    (P, "SCLC", "extended"): (755, 0.52),
}

# regimen classes among treated patients, read off the named regimens
TREATED = {
    (I, "NSCLC", "I"): {},
    (I, "NSCLC", "II"): {"chemotherapy": 1.0},
    (I, "NSCLC", "III"): {"immunotherapy": 0.5, "chemotherapy": 0.5},
    (I, "NSCLC", "IV"): {"immunotherapy": 0.5, "chemotherapy": 0.2, "ALK": 0.1,
                         "antiEGFR": 0.2},
    (I, "SCLC", "limited"): {"chemotherapy": 1.0},
    (I, "SCLC", "extended"): {"immunotherapy": 0.73, "chemotherapy": 0.27},
    (P, "NSCLC", "I"): {"antiEGFR": 0.5, "immunotherapy": 0.2, "chemotherapy": 0.3},
    (P, "NSCLC", "II"): {"antiEGFR": 0.5, "immunotherapy": 0.2, "chemotherapy": 0.3},
    (P, "NSCLC", "III"): {"immunotherapy": 0.55, "chemotherapy": 0.3, "antiEGFR": 0.15},
    (P, "NSCLC", "IV"): {"immunotherapy": 0.5, "chemotherapy": 0.2, "antiEGFR": 0.2,
                         "ALK": 0.1},
    (P, "SCLC", "limited"): {"chemotherapy": 0.9, "immunotherapy": 0.1},
    (P, "SCLC", "extended"): {"chemotherapy": 1.0},
}

PREVALENT_DEATH_BURDEN = 46_763_479


def _key(raw):
    population, cancer_type, stage = raw
    return (population, *next(k for k in TUMOURS if (str(k[0]), str(k[1])) ==
                              (cancer_type, stage)))


def _write(path: Path, header, rows) -> None:
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def derive_costs(root: Path) -> None:
    # the loader needs both files; header-only stubs are enough to bootstrap
    for name, header in (("drug_costs.csv", "population,type,stage,cost_per_patient_year,"
                                            "drug_share_of_total\n"),
                         ("class_mix.csv", "population,type,stage,regimen_class,share\n")):
        if not (root / name).exists():
            (root / name).write_text(header, encoding="utf-8")
    bundle = load_bundle(root)
    shares = bundle.shares
    drug_rows, mix_rows = [], []
    for raw, (total, drug_share) in PUBLISHED.items():
        key = _key(raw)
        resources = math.fsum(
            shares.weigh(c) for phase in Phase
            for c in phase_resource_cost(bundle.profile(*key, phase), bundle.unit_costs).values())
        composition = {RegimenClass.parse(k): v for k, v in TREATED[raw].items()}
        full = shares.weigh(adverse_event_cost(composition, bundle.adverse_events))
        # untreated patients carry no adverse events; when resources alone
        # exceed the published non-drug share that share is out of reach and
        # every patient is taken as treated
        treated = 0.0
        if drug_share is not None and full > 0:
            headroom = (1.0 - drug_share) * total - resources
            treated = min(1.0, headroom / full) if headroom > 0 else 1.0
        ae = treated * full
        drug = max(0.0, total - resources - ae)
        drug_rows.append((*raw, round(drug, 4), "" if drug_share is None else drug_share))
        mix = {k: round(treated * v, 6) for k, v in composition.items()}
        mix[RegimenClass.NONE] = round(1.0 - sum(mix.values()), 6)
        mix_rows += [(*raw, str(k), v) for k, v in mix.items() if v > 0]
    _write(root / "drug_costs.csv", ["population", "type", "stage", "cost_per_patient_year",
                                     "drug_share_of_total", "currency"],
           [(*r, "USD") for r in drug_rows])
    _write(root / "class_mix.csv", ["population", "type", "stage", "regimen_class", "share"],
           mix_rows)


def derive_death_mix(root: Path) -> None:
    """Shift mass from the survival-hazard mix to metastatic cells until the
    weighted prevalent death burden matches the published value."""
    mix_path = root / "prevalent_death_mix.csv"
    if mix_path.exists():
        mix_path.unlink()
    bundle = load_bundle(root)
    epi = bundle.epi
    incident = decompose_cases(epi.incidence, bundle.stage_distribution, epi.sex_split_incident)
    raw = roll_forward(incident, bundle.survival, bundle.survival_sex_multipliers)
    _, factors = calibrate_prevalence(raw, epi)
    base = default_prevalent_death_mix(raw.scaled(factors.f1, factors.f2to5), bundle.survival)
    cards = compute_cost_cards(bundle)
    per_death = {k: v.weighted for k, v in death_cost_card(bundle, cards).prevalent.items()}
    metastatic = {k: v for k, v in base.items() if stage_class(*k) is StageClass.METASTATIC}
    meta_total = sum(metastatic.values())

    def mixed(alpha):
        return {k: (1 - alpha) * v + (alpha * metastatic.get(k, 0.0) / meta_total)
                for k, v in base.items()}

    target = PREVALENT_DEATH_BURDEN / (epi.deaths - (epi.incidence - epi.prevalence_1y))
    lo, hi = 0.0, 1.0
    for _ in range(200):
        mid = (lo + hi) / 2
        if math.fsum(m * per_death[k] for k, m in mixed(mid).items()) < target:
            lo = mid
        else:
            hi = mid
    mix = mixed((lo + hi) / 2)
    _write(mix_path, ["type", "stage", "share"],
           [(str(t), str(s), repr(v)) for (t, s), v in mix.items()])


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("bundle", type=Path)
    args = parser.parse_args()
    derive_costs(args.bundle)
    derive_death_mix(args.bundle)


if __name__ == "__main__":
    main()
