"""Scenario bundle: input data types, loading from disk and serialisation.

A bundle is a directory holding ``manifest.toml`` plus a fixed set of CSV
tables.  Money tables may be expressed in ARS or USD; everything is
normalised to USD at load time using the manifest exchange rate.
"""

from __future__ import annotations

import csv
import math
from collections.abc import Iterator, Mapping
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

try:  # Python >= 3.11
    import tomllib
except ModuleNotFoundError:  # pragma: no cover
    import tomli as tomllib

import tomli_w

from lcburden.domain import (
    RESOURCE_CATEGORIES,
    STAGES,
    TUMOURS,
    YEARS,
    CancerType,
    Category,
    Phase,
    Population,
    RegimenClass,
    Sex,
    Stage,
    StageClass,
)

MANIFEST = "manifest.toml"
MANDATORY_TABLES = (
    "epi.csv",
    "stage_distribution.csv",
    "survival.csv",
    "life_table.csv",
    "disability_weights.csv",
    "unit_costs.csv",
    "resource_profiles.csv",
    "drug_costs.csv",
    "ae_rates.csv",
    "ae_costs.csv",
    "class_mix.csv",
    "death_costs.csv",
)
OPTIONAL_TABLES = (
    "regimens.csv",
    "death_cost_overrides.csv",
    "prevalent_death_mix.csv",
    "survival_sex_multipliers.csv",
)

WARD_RESOURCE = "general_ward_admission"
PALLIATIVE_RESOURCE = "palliative_care"

# shares off by at most this much are rescaled to sum to one (with a warning)
RENORMALIZE_TOLERANCE = 1e-4
SHARE_TOLERANCE = 1e-9


class BundleError(Exception):
    """Raised when a bundle cannot be read or parsed."""

    def __init__(self, message: str, file: Optional[str] = None,
                 line: Optional[int] = None, column: Optional[str] = None):
        self.file, self.line, self.column = file, line, column
        where = ":".join(str(p) for p in (file, line) if p is not None)
        if column is not None:
            where = f"{where} [{column}]" if where else f"[{column}]"
        super().__init__(f"{where}: {message}" if where else message)


# -- money -----------------------------------------------------------------


@dataclass(frozen=True)
class SectorShares:
    public: float
    social_security: float
    private: float

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.public, self.social_security, self.private)

    def weigh(self, costs: "SectorCosts") -> float:
        """Coverage-weighted average of a per-sector value."""
        return (self.public * costs.public
                + self.social_security * costs.social_security
                + self.private * costs.private)


@dataclass(frozen=True)
class SectorCosts:
    """One USD value per health subsector."""

    public: float = 0.0
    social_security: float = 0.0
    private: float = 0.0

    @classmethod
    def uniform(cls, value: float) -> "SectorCosts":
        return cls(value, value, value)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.public, self.social_security, self.private)

    def __add__(self, other: "SectorCosts") -> "SectorCosts":
        return SectorCosts(self.public + other.public,
                           self.social_security + other.social_security,
                           self.private + other.private)

    def __mul__(self, k: float) -> "SectorCosts":
        return SectorCosts(self.public * k, self.social_security * k, self.private * k)

    __rmul__ = __mul__


ZERO = SectorCosts()


@dataclass(frozen=True)
class MoneyBySector:
    """Per-sector values plus their coverage-weighted average."""

    public: float
    social_security: float
    private: float
    weighted: float

    @classmethod
    def of(cls, costs: SectorCosts, shares: SectorShares) -> "MoneyBySector":
        return cls(costs.public, costs.social_security, costs.private, shares.weigh(costs))

    @property
    def sectors(self) -> SectorCosts:
        return SectorCosts(self.public, self.social_security, self.private)


# -- manifest and epidemiology ----------------------------------------------


@dataclass(frozen=True)
class MonteCarloDefaults:
    iterations: int = 10_000
    seed: int = 0
    percentiles: tuple[float, float] = (2.5, 97.5)


@dataclass(frozen=True)
class Denominators:
    gdp_usd: Optional[float] = None
    total_health_expenditure_usd: Optional[float] = None


@dataclass(frozen=True)
class ScenarioManifest:
    scenario_name: str
    reference_year: int
    exchange_rate: float
    sector_shares: SectorShares
    mc_defaults: MonteCarloDefaults = MonteCarloDefaults()
    denominators: Optional[Denominators] = None
    notes: tuple[str, ...] = ()


@dataclass(frozen=True)
class EpiInputs:
    incidence: float
    prevalence_1y: float
    prevalence_5y: float
    deaths: float
    mi_ratio: float
    sex_split_incident: float
    prevalence_3y: Optional[float] = None
    # male share of deaths per population; default to the incident split
    sex_split_incident_deaths: Optional[float] = None
    sex_split_prevalent_deaths: Optional[float] = None

    def male_share_of_deaths(self, population: Population) -> float:
        value = (self.sex_split_incident_deaths if population is Population.INCIDENT
                 else self.sex_split_prevalent_deaths)
        return self.sex_split_incident if value is None else value


@dataclass(frozen=True)
class StageDistribution:
    type_shares: Mapping[CancerType, float]
    stage_shares: Mapping[tuple[CancerType, Stage], float]

    def share(self, cancer_type: CancerType, stage: Stage) -> float:
        return self.type_shares[cancer_type] * self.stage_shares[(cancer_type, stage)]


@dataclass(frozen=True)
class SurvivalTable:
    """Cumulative survival S(type, stage, k) for k = 1..5 years after diagnosis."""

    probabilities: Mapping[tuple[CancerType, Stage], tuple[float, ...]]

    def __call__(self, cancer_type: CancerType, stage: Stage, year: int) -> float:
        return self.probabilities[(cancer_type, stage)][year - 1]

    def curve(self, cancer_type: CancerType, stage: Stage) -> tuple[float, ...]:
        return self.probabilities[(cancer_type, stage)]


@dataclass(frozen=True)
class LifeTableRow:
    sex: Sex
    age_group: str
    deaths: float
    life_expectancy: float


@dataclass(frozen=True)
class DisabilityWeights:
    weights: Mapping[tuple[Population, StageClass], float]

    def weight(self, population: Population, klass: StageClass) -> float:
        try:
            return self.weights[(population, klass)]
        except KeyError:
            raise KeyError(f"no disability weight for ({population}, {klass})") from None


# -- costs --------------------------------------------------------------------


@dataclass(frozen=True)
class UnitCost:
    resource: str
    category: Category
    costs: SectorCosts


@dataclass(frozen=True)
class ProfileRow:
    population: Population
    cancer_type: CancerType
    stage: Stage
    phase: Phase
    resource: str
    quantity: float


@dataclass(frozen=True)
class DrugCost:
    cost_per_patient_year: Optional[float] = None
    drug_share_of_total: Optional[float] = None


@dataclass(frozen=True)
class Regimen:
    population: Population
    cancer_type: CancerType
    stage: Stage
    name: str
    share_of_drug_cost: float
    cost_per_patient_year: float


@dataclass(frozen=True)
class AdverseEventInputs:
    rates: Mapping[tuple[str, RegimenClass], float]
    costs: Mapping[str, SectorCosts]
    class_mix: Mapping[tuple[Population, CancerType, Stage], Mapping[RegimenClass, float]]


@dataclass(frozen=True)
class DeathCostInputs:
    incident_ward_days: float
    treatment_fraction: float
    palliative_units: float
    prevalent_ward_days: float
    overrides: Mapping[tuple[CancerType, Stage], SectorCosts] = field(default_factory=dict)


CellKey = tuple[Population, CancerType, Stage]


@dataclass(frozen=True)
class ScenarioBundle:
    manifest: ScenarioManifest
    epi: EpiInputs
    stage_distribution: StageDistribution
    survival: SurvivalTable
    life_table: tuple[LifeTableRow, ...]
    disability_weights: DisabilityWeights
    unit_costs: Mapping[str, UnitCost]
    resource_profiles: tuple[ProfileRow, ...]
    drug_costs: Mapping[CellKey, DrugCost]
    adverse_events: AdverseEventInputs
    death_costs: DeathCostInputs
    regimens: tuple[Regimen, ...] = ()
    prevalent_death_mix: Optional[Mapping[tuple[CancerType, Stage], float]] = None
    survival_sex_multipliers: Optional[Mapping[Sex, float]] = None
    load_warnings: tuple[str, ...] = field(default=(), compare=False)
    source: Optional[Path] = field(default=None, compare=False)

    @property
    def shares(self) -> SectorShares:
        return self.manifest.sector_shares

    def profile(self, population: Population, cancer_type: CancerType, stage: Stage,
                phase: Optional[Phase] = None) -> list[ProfileRow]:
        return [r for r in self.resource_profiles
                if (r.population, r.cancer_type, r.stage) == (population, cancer_type, stage)
                and (phase is None or r.phase is phase)]

    def regimens_for(self, population: Population, cancer_type: CancerType,
                     stage: Stage) -> list[Regimen]:
        return [r for r in self.regimens
                if (r.population, r.cancer_type, r.stage) == (population, cancer_type, stage)]


# -- CSV parsing helpers ---------------------------------------------------------


class _Table:
    def __init__(self, root: Path, name: str, required: tuple[str, ...],
                 optional: tuple[str, ...] = ()):
        self.name = name
        self.path = root / name
        self.required = required
        self.optional = optional

    def rows(self) -> Iterator[tuple[int, dict[str, str]]]:
        try:
            handle = self.path.open(newline="", encoding="utf-8")
        except FileNotFoundError:
            raise BundleError("missing mandatory table", file=self.name) from None
        with handle:
            reader = csv.DictReader(handle)
            header = reader.fieldnames or []
            header = [h.strip() for h in header]
            reader.fieldnames = header
            missing = [c for c in self.required if c not in header]
            if missing:
                raise BundleError(f"header lacks columns {missing}", file=self.name, line=1)
            for row in reader:
                if not any((v or "").strip() for v in row.values()):
                    continue
                yield reader.line_num, {k: (v or "").strip() for k, v in row.items() if k}

    def error(self, message: str, line: int, column: Optional[str] = None) -> BundleError:
        return BundleError(message, file=self.name, line=line, column=column)

    def number(self, row: dict, column: str, line: int, *, optional: bool = False):
        raw = row.get(column, "")
        if raw == "":
            if optional:
                return None
            raise self.error("missing value", line, column)
        if "%" in raw:
            raise self.error(f"percent values are not accepted ({raw!r}); use decimals", line,
                             column)
        try:
            value = float(raw)
        except ValueError:
            raise self.error(f"not a number: {raw!r}", line, column) from None
        if not math.isfinite(value):
            raise self.error(f"non-finite value {raw!r}", line, column)
        return value

    def token(self, enum, row: dict, column: str, line: int):
        try:
            return enum.parse(row.get(column, ""))
        except ValueError as exc:
            raise self.error(str(exc), line, column) from None

    def tumour(self, row: dict, line: int) -> tuple[CancerType, Stage]:
        cancer_type = self.token(CancerType, row, "type", line)
        stage = self.token(Stage, row, "stage", line)
        if stage not in STAGES[cancer_type]:
            raise self.error(f"stage {stage} is not valid for {cancer_type}", line, "stage")
        return cancer_type, stage

    def money(self, row: dict, line: int, exchange_rate: float,
              columns=("public", "social", "private")) -> SectorCosts:
        values = [self.number(row, c, line) for c in columns]
        if "currency" in row:
            currency = row["currency"].upper()
            if currency == "":
                raise self.error("currency field absent", line, "currency")
            if currency == "ARS":
                values = [v / exchange_rate for v in values]
            elif currency != "USD":
                raise self.error(f"unknown currency {row['currency']!r}", line, "currency")
        return SectorCosts(*values)


def _renormalize(values: dict, label: str, warnings: list[str]) -> dict:
    total = math.fsum(values.values())
    if SHARE_TOLERANCE < abs(total - 1.0) <= RENORMALIZE_TOLERANCE:
        warnings.append(f"{label} summed to {total:.10f}; renormalized to 1")
        return {k: v / total for k, v in values.items()}
    return values


# -- loaders ---------------------------------------------------------------------


def _load_manifest(root: Path, warnings: list[str]) -> ScenarioManifest:
    path = root / MANIFEST
    try:
        data = tomllib.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise BundleError("missing manifest", file=MANIFEST) from None
    except tomllib.TOMLDecodeError as exc:
        raise BundleError(f"unparseable manifest: {exc}", file=MANIFEST) from None
    try:
        raw_shares = data["sector_shares"]
        shares = {k: float(raw_shares[k]) for k in ("public", "social_security", "private")}
        shares = _renormalize(shares, "sector shares", warnings)
        mc = data.get("mc_defaults", {})
        percentiles = tuple(float(p) for p in mc.get("percentiles", (2.5, 97.5)))
        if len(percentiles) != 2:
            raise BundleError("mc_defaults.percentiles must hold two values", file=MANIFEST)
        denominators = None
        if "denominators" in data:
            d = data["denominators"]
            denominators = Denominators(
                gdp_usd=float(d["gdp_usd"]) if "gdp_usd" in d else None,
                total_health_expenditure_usd=(float(d["total_health_expenditure_usd"])
                                              if "total_health_expenditure_usd" in d else None),
            )
        return ScenarioManifest(
            scenario_name=str(data["scenario_name"]),
            reference_year=int(data["reference_year"]),
            exchange_rate=float(data["exchange_rate"]),
            sector_shares=SectorShares(**shares),
            mc_defaults=MonteCarloDefaults(
                iterations=int(mc.get("iterations", 10_000)),
                seed=int(mc.get("seed", 0)),
                percentiles=percentiles,  # type: ignore[arg-type]
            ),
            denominators=denominators,
            notes=tuple(str(n) for n in data.get("provenance", {}).get("notes", ())),
        )
    except KeyError as exc:
        raise BundleError(f"manifest lacks key {exc.args[0]!r}", file=MANIFEST) from None
    except (TypeError, ValueError) as exc:
        raise BundleError(f"bad manifest value: {exc}", file=MANIFEST) from None


_EPI_REQUIRED = ("incidence", "prevalence_1y", "prevalence_5y", "deaths", "mi_ratio",
                 "sex_split_incident")
_EPI_OPTIONAL = ("prevalence_3y", "sex_split_incident_deaths", "sex_split_prevalent_deaths")


def _load_epi(root: Path) -> EpiInputs:
    table = _Table(root, "epi.csv", ("parameter", "value"))
    values: dict[str, float] = {}
    for line, row in table.rows():
        name = row["parameter"]
        if name not in _EPI_REQUIRED + _EPI_OPTIONAL:
            raise table.error(f"unknown parameter {name!r}", line, "parameter")
        values[name] = table.number(row, "value", line)
    missing = [p for p in _EPI_REQUIRED if p not in values]
    if missing:
        raise BundleError(f"missing parameters {missing}", file=table.name)
    return EpiInputs(**values)


def _load_stage_distribution(root: Path, warnings: list[str]) -> StageDistribution:
    table = _Table(root, "stage_distribution.csv", ("population", "type", "stage", "share"))
    type_shares: dict[CancerType, float] = {}
    stage_shares: dict[tuple[CancerType, Stage], float] = {}
    for line, row in table.rows():
        if table.token(Population, row, "population", line) is not Population.INCIDENT:
            raise table.error("only incident stage distributions are model inputs", line,
                              "population")
        share = table.number(row, "share", line)
        if row["stage"].lower() in ("all", "*"):
            type_shares[table.token(CancerType, row, "type", line)] = share
        else:
            stage_shares[table.tumour(row, line)] = share
    type_shares = _renormalize(type_shares, "type shares", warnings)
    for cancer_type in STAGES:
        sub = {k: v for k, v in stage_shares.items() if k[0] is cancer_type}
        stage_shares.update(_renormalize(sub, f"{cancer_type} stage shares", warnings))
    return StageDistribution(type_shares, stage_shares)


def _load_survival(root: Path) -> SurvivalTable:
    table = _Table(root, "survival.csv", ("type", "stage", "year", "probability"))
    points: dict[tuple[CancerType, Stage], dict[int, float]] = {}
    for line, row in table.rows():
        key = table.tumour(row, line)
        year = table.number(row, "year", line)
        if year not in YEARS:
            raise table.error(f"year must be one of {YEARS}", line, "year")
        points.setdefault(key, {})[int(year)] = table.number(row, "probability", line)
    curves = {}
    for key, by_year in points.items():
        if sorted(by_year) != list(YEARS):
            raise BundleError(f"survival for {key[0]} {key[1]} lacks years "
                              f"{sorted(set(YEARS) - set(by_year))}", file=table.name)
        curves[key] = tuple(by_year[k] for k in YEARS)
    return SurvivalTable(curves)


def _load_life_table(root: Path) -> tuple[LifeTableRow, ...]:
    table = _Table(root, "life_table.csv", ("sex", "age_group", "deaths", "life_expectancy"))
    return tuple(
        LifeTableRow(table.token(Sex, row, "sex", line), row["age_group"],
                     table.number(row, "deaths", line),
                     table.number(row, "life_expectancy", line))
        for line, row in table.rows()
    )


def _load_disability_weights(root: Path) -> DisabilityWeights:
    table = _Table(root, "disability_weights.csv", ("population", "stage_class", "weight"))
    weights = {}
    for line, row in table.rows():
        key = (table.token(Population, row, "population", line),
               table.token(StageClass, row, "stage_class", line))
        weights[key] = table.number(row, "weight", line)
    return DisabilityWeights(weights)


def _load_unit_costs(root: Path, rate: float) -> dict[str, UnitCost]:
    table = _Table(root, "unit_costs.csv",
                   ("resource", "category", "public", "social", "private", "currency"))
    costs = {}
    for line, row in table.rows():
        category = table.token(Category, row, "category", line)
        if category not in RESOURCE_CATEGORIES:
            raise table.error(f"category {category} cannot be used for a resource", line,
                              "category")
        if row["resource"] in costs:
            raise table.error(f"duplicate resource {row['resource']!r}", line, "resource")
        costs[row["resource"]] = UnitCost(row["resource"], category,
                                          table.money(row, line, rate))
    return costs


def _load_profiles(root: Path, unit_costs: Mapping[str, UnitCost]) -> tuple[ProfileRow, ...]:
    table = _Table(root, "resource_profiles.csv",
                   ("population", "type", "stage", "phase", "resource", "quantity"))
    rows = []
    for line, row in table.rows():
        if row["resource"] not in unit_costs:
            raise table.error(f"unknown resource {row['resource']!r}", line, "resource")
        cancer_type, stage = table.tumour(row, line)
        rows.append(ProfileRow(table.token(Population, row, "population", line),
                               cancer_type, stage, table.token(Phase, row, "phase", line),
                               row["resource"], table.number(row, "quantity", line)))
    return tuple(rows)


def _cell(table: _Table, row: dict, line: int) -> CellKey:
    return (table.token(Population, row, "population", line), *table.tumour(row, line))


def _load_drug_costs(root: Path, rate: float) -> dict[CellKey, DrugCost]:
    table = _Table(root, "drug_costs.csv",
                   ("population", "type", "stage", "cost_per_patient_year",
                    "drug_share_of_total"))
    out = {}
    for line, row in table.rows():
        cost = table.number(row, "cost_per_patient_year", line, optional=True)
        if cost is not None and row.get("currency", "USD").upper() == "ARS":
            cost /= rate
        elif "currency" in row and row["currency"] == "":
            raise table.error("currency field absent", line, "currency")
        out[_cell(table, row, line)] = DrugCost(
            cost, table.number(row, "drug_share_of_total", line, optional=True))
    return out


def _load_regimens(root: Path, rate: float) -> tuple[Regimen, ...]:
    table = _Table(root, "regimens.csv",
                   ("population", "type", "stage", "regimen", "share_of_drug_cost",
                    "cost_per_patient_year"))
    if not table.path.exists():
        return ()
    out = []
    for line, row in table.rows():
        cost = table.number(row, "cost_per_patient_year", line)
        if row.get("currency", "USD").upper() == "ARS":
            cost /= rate
        population, cancer_type, stage = _cell(table, row, line)
        out.append(Regimen(population, cancer_type, stage, row["regimen"],
                           table.number(row, "share_of_drug_cost", line), cost))
    return tuple(out)


def _load_adverse_events(root: Path, rate: float, warnings: list[str]) -> AdverseEventInputs:
    rates_t = _Table(root, "ae_rates.csv", ("event", "regimen_class", "rate"))
    rates = {}
    for line, row in rates_t.rows():
        klass = rates_t.token(RegimenClass, row, "regimen_class", line)
        rates[(row["event"], klass)] = rates_t.number(row, "rate", line)
    costs_t = _Table(root, "ae_costs.csv", ("event", "public", "social", "private"))
    costs = {row["event"]: costs_t.money(row, line, rate) for line, row in costs_t.rows()}
    for event, _ in rates:
        if event not in costs:
            raise BundleError(f"adverse event {event!r} has a rate but no cost",
                              file=costs_t.name)
    mix_t = _Table(root, "class_mix.csv", ("population", "type", "stage", "regimen_class",
                                           "share"))
    mix: dict[CellKey, dict[RegimenClass, float]] = {}
    for line, row in mix_t.rows():
        mix.setdefault(_cell(mix_t, row, line), {})[
            mix_t.token(RegimenClass, row, "regimen_class", line)] = mix_t.number(row, "share",
                                                                                  line)
    mix = {k: _renormalize(v, f"class mix {'/'.join(map(str, k))}", warnings)
           for k, v in mix.items()}
    return AdverseEventInputs(rates, costs, mix)


def _load_death_costs(root: Path, rate: float) -> DeathCostInputs:
    table = _Table(root, "death_costs.csv", ("population", "component", "value"))
    known = {
        (Population.INCIDENT, "ward_days"): "incident_ward_days",
        (Population.PREVALENT, "treatment_fraction"): "treatment_fraction",
        (Population.PREVALENT, "palliative_units"): "palliative_units",
        (Population.PREVALENT, "ward_days"): "prevalent_ward_days",
    }
    values = {}
    for line, row in table.rows():
        key = (table.token(Population, row, "population", line), row["component"])
        if key not in known:
            raise table.error(f"unknown death-cost component {row['component']!r} for "
                              f"{key[0]}", line, "component")
        values[known[key]] = table.number(row, "value", line)
    missing = sorted(set(known.values()) - set(values))
    if missing:
        raise BundleError(f"missing components {missing}", file=table.name)
    overrides = {}
    over_t = _Table(root, "death_cost_overrides.csv",
                    ("type", "stage", "public", "social", "private"))
    if over_t.path.exists():
        for line, row in over_t.rows():
            overrides[over_t.tumour(row, line)] = over_t.money(row, line, rate)
    return DeathCostInputs(overrides=overrides, **values)


def _load_prevalent_death_mix(root: Path, warnings: list[str]):
    table = _Table(root, "prevalent_death_mix.csv", ("type", "stage", "share"))
    if not table.path.exists():
        return None
    mix = {table.tumour(row, line): table.number(row, "share", line)
           for line, row in table.rows()}
    return _renormalize(mix, "prevalent death mix", warnings)


def _load_sex_multipliers(root: Path):
    table = _Table(root, "survival_sex_multipliers.csv", ("sex", "multiplier"))
    if not table.path.exists():
        return None
    return {table.token(Sex, row, "sex", line): table.number(row, "multiplier", line)
            for line, row in table.rows()}


def load_bundle(path) -> ScenarioBundle:
    """Parse a bundle directory into a :class:`ScenarioBundle`.

    Raises :class:`BundleError` for missing files, unparseable rows and
    unknown tokens.  Domain invariants are checked separately by
    :func:`lcburden.validation.validate_bundle`.
    """
    root = Path(path)
    if not root.is_dir():
        raise BundleError(f"bundle directory not found: {root}")
    for name in MANDATORY_TABLES:
        if not (root / name).exists():
            raise BundleError("missing mandatory table", file=name)
    warnings: list[str] = []
    manifest = _load_manifest(root, warnings)
    rate = manifest.exchange_rate
    if not rate > 0:
        raise BundleError("exchange_rate must be positive", file=MANIFEST)
    unit_costs = _load_unit_costs(root, rate)
    return ScenarioBundle(
        manifest=manifest,
        epi=_load_epi(root),
        stage_distribution=_load_stage_distribution(root, warnings),
        survival=_load_survival(root),
        life_table=_load_life_table(root),
        disability_weights=_load_disability_weights(root),
        unit_costs=unit_costs,
        resource_profiles=_load_profiles(root, unit_costs),
        drug_costs=_load_drug_costs(root, rate),
        adverse_events=_load_adverse_events(root, rate, warnings),
        death_costs=_load_death_costs(root, rate),
        regimens=_load_regimens(root, rate),
        prevalent_death_mix=_load_prevalent_death_mix(root, warnings),
        survival_sex_multipliers=_load_sex_multipliers(root),
        load_warnings=tuple(warnings),
        source=root,
    )


# -- writer ----------------------------------------------------------------------


def _write_csv(path: Path, header: list[str], rows) -> None:
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow(["" if v is None else (repr(v) if isinstance(v, float) else str(v))
                             for v in row])


def save_bundle(bundle: ScenarioBundle, path) -> Path:
    """Write ``bundle`` to ``path`` in canonical form (all money in USD)."""
    root = Path(path)
    root.mkdir(parents=True, exist_ok=True)
    m = bundle.manifest
    doc: dict = {
        "scenario_name": m.scenario_name,
        "reference_year": m.reference_year,
        "exchange_rate": m.exchange_rate,
        "sector_shares": {"public": m.sector_shares.public,
                          "social_security": m.sector_shares.social_security,
                          "private": m.sector_shares.private},
        "mc_defaults": {"iterations": m.mc_defaults.iterations, "seed": m.mc_defaults.seed,
                        "percentiles": list(m.mc_defaults.percentiles)},
    }
    if m.denominators is not None:
        doc["denominators"] = {k: v for k, v in vars(m.denominators).items() if v is not None}
    if m.notes:
        doc["provenance"] = {"notes": list(m.notes)}
    (root / MANIFEST).write_text(tomli_w.dumps(doc), encoding="utf-8")

    epi = bundle.epi
    _write_csv(root / "epi.csv", ["parameter", "value"],
               [(k, float(v)) for k, v in vars(epi).items() if v is not None])
    sd = bundle.stage_distribution
    _write_csv(root / "stage_distribution.csv", ["population", "type", "stage", "share"],
               [("incident", t, "all", v) for t, v in sd.type_shares.items()]
               + [("incident", t, s, v) for (t, s), v in sd.stage_shares.items()])
    _write_csv(root / "survival.csv", ["type", "stage", "year", "probability"],
               [(t, s, k, p) for (t, s), curve in bundle.survival.probabilities.items()
                for k, p in zip(YEARS, curve)])
    _write_csv(root / "life_table.csv", ["sex", "age_group", "deaths", "life_expectancy"],
               [(r.sex, r.age_group, r.deaths, r.life_expectancy) for r in bundle.life_table])
    _write_csv(root / "disability_weights.csv", ["population", "stage_class", "weight"],
               [(p, c, w) for (p, c), w in bundle.disability_weights.weights.items()])
    _write_csv(root / "unit_costs.csv",
               ["resource", "category", "public", "social", "private", "currency"],
               [(u.resource, u.category, *u.costs.as_tuple(), "USD")
                for u in bundle.unit_costs.values()])
    _write_csv(root / "resource_profiles.csv",
               ["population", "type", "stage", "phase", "resource", "quantity"],
               [(r.population, r.cancer_type, r.stage, r.phase, r.resource, r.quantity)
                for r in bundle.resource_profiles])
    _write_csv(root / "drug_costs.csv",
               ["population", "type", "stage", "cost_per_patient_year", "drug_share_of_total"],
               [(*k, d.cost_per_patient_year, d.drug_share_of_total)
                for k, d in bundle.drug_costs.items()])
    if bundle.regimens:
        _write_csv(root / "regimens.csv",
                   ["population", "type", "stage", "regimen", "share_of_drug_cost",
                    "cost_per_patient_year"],
                   [(r.population, r.cancer_type, r.stage, r.name, r.share_of_drug_cost,
                     r.cost_per_patient_year) for r in bundle.regimens])
    ae = bundle.adverse_events
    _write_csv(root / "ae_rates.csv", ["event", "regimen_class", "rate"],
               [(e, c, r) for (e, c), r in ae.rates.items()])
    _write_csv(root / "ae_costs.csv", ["event", "public", "social", "private", "currency"],
               [(e, *c.as_tuple(), "USD") for e, c in ae.costs.items()])
    _write_csv(root / "class_mix.csv", ["population", "type", "stage", "regimen_class", "share"],
               [(*k, c, s) for k, mix in ae.class_mix.items() for c, s in mix.items()])
    dc = bundle.death_costs
    _write_csv(root / "death_costs.csv", ["population", "component", "value"], [
        ("incident", "ward_days", dc.incident_ward_days),
        ("prevalent", "treatment_fraction", dc.treatment_fraction),
        ("prevalent", "palliative_units", dc.palliative_units),
        ("prevalent", "ward_days", dc.prevalent_ward_days),
    ])
    if dc.overrides:
        _write_csv(root / "death_cost_overrides.csv",
                   ["type", "stage", "public", "social", "private", "currency"],
                   [(t, s, *c.as_tuple(), "USD") for (t, s), c in dc.overrides.items()])
    if bundle.prevalent_death_mix is not None:
        _write_csv(root / "prevalent_death_mix.csv", ["type", "stage", "share"],
                   [(t, s, v) for (t, s), v in bundle.prevalent_death_mix.items()])
    if bundle.survival_sex_multipliers is not None:
        _write_csv(root / "survival_sex_multipliers.csv", ["sex", "multiplier"],
                   list(bundle.survival_sex_multipliers.items()))
    return root


def tumours_missing(mapping: Mapping, population: Optional[Population] = None) -> list:
    """Return the (type, stage) or (population, type, stage) keys absent from ``mapping``."""
    if population is None:
        return [k for k in TUMOURS if k not in mapping]
    return [(population, *k) for k in TUMOURS if (population, *k) not in mapping]
