"""Report tables and their CSV, JSON and Markdown renderings.

CSV and JSON carry full float precision and the same numbers.  Markdown is
for reading next to the published tables: counts are rounded to integers,
burden to millions with two decimals and per-patient costs to cents.
"""

from __future__ import annotations

import csv
import io
import json
import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from lcburden.aggregation import TABLE_COLUMNS, composition_breakdown, health_rows, table_rows
from lcburden.domain import POPULATIONS, SECTORS, SEXES, STAGES, TUMOURS, YEARS, Population
from lcburden.model import ModelResult
from lcburden.uncertainty import SimulationSummary

FORMATS = ("csv", "json", "md")


@dataclass(frozen=True)
class Table:
    name: str
    columns: tuple[str, ...]
    rows: list[tuple]
    metadata: Mapping[str, object] = field(default_factory=dict)
    # per-column Markdown formatter; unformatted columns use str()
    md_format: Mapping[str, Callable[[float], str]] = field(default_factory=dict)


def _count(x: float) -> str:
    return f"{x:,.0f}"


def _millions(x: float) -> str:
    return f"{x / 1e6:,.2f}"


def _cents(x: float) -> str:
    return f"{x:,.2f}"


def _share(x: float) -> str:
    return f"{x:.4f}"


def _csv_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return "" if math.isnan(v) else repr(v)
    return str(v)


def _json_value(v):
    if isinstance(v, float) and math.isnan(v):
        return None
    return v if isinstance(v, (int, float, bool)) or v is None else str(v)


def render_csv(table: Table) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([_csv_value(v) for v in row])
    return buffer.getvalue()


def render_json(table: Table) -> str:
    doc = {
        "table": table.name,
        "metadata": {k: _json_value(v) if not isinstance(v, (list, tuple)) else list(v)
                     for k, v in table.metadata.items()},
        "columns": list(table.columns),
        "rows": [{c: _json_value(v) for c, v in zip(table.columns, row)} for row in table.rows],
    }
    return json.dumps(doc, indent=2) + "\n"


def render_md(table: Table) -> str:
    lines = [f"## {table.name}", ""]
    for key, value in table.metadata.items():
        lines.append(f"- {key}: {value}")
    if table.metadata:
        lines.append("")
    lines.append("| " + " | ".join(table.columns) + " |")
    lines.append("|" + "|".join("---" for _ in table.columns) + "|")
    for row in table.rows:
        cells = []
        for column, value in zip(table.columns, row):
            if isinstance(value, float) and math.isnan(value):
                cells.append("-")
            elif isinstance(value, float) and column in table.md_format:
                cells.append(table.md_format[column](value))
            else:
                cells.append(str(value))
        lines.append("| " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"


RENDERERS = {"csv": render_csv, "json": render_json, "md": render_md}


def write_table(table: Table, out_dir, formats: Sequence[str] = FORMATS) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for fmt in formats:
        path = out / f"{table.name}.{fmt}"
        path.write_text(RENDERERS[fmt](table), encoding="utf-8")
        written.append(path)
    return written


# -- table builders --------------------------------------------------------------


def burden_summary(result: ModelResult) -> Table:
    md = {c: (_count if c.startswith("cases") else _millions) for c in TABLE_COLUMNS}
    rows = [(label, *(values.get(c, math.nan) for c in TABLE_COLUMNS))
            for label, values in table_rows(result.report).items()]
    return Table("burden_summary", ("row", *TABLE_COLUMNS), rows, md_format=md)


def _card_table(result: ModelResult, population: Population, name: str) -> Table:
    """Per-patient cards plus case-weighted subtotals per type and overall."""
    columns = ("type", "stage", *(str(s) for s in SECTORS), "weighted")
    rows = []
    cases = {(t, s): result.cases.tumour(population, t, s) for t, s in TUMOURS}

    def average(keys):
        n = math.fsum(cases[k] for k in keys)
        cards = [result.cards[(population, *k)] for k in keys]
        sectors = [math.fsum(cases[k] * c.sectors.as_tuple()[i] for k, c in zip(keys, cards)) / n
                   if n > 0 else math.nan for i in range(3)]
        weighted = (math.fsum(cases[k] * c.weighted for k, c in zip(keys, cards)) / n
                    if n > 0 else math.nan)
        return (*sectors, weighted)

    for cancer_type, stages in STAGES.items():
        for stage in stages:
            card = result.cards[(population, cancer_type, stage)]
            rows.append((str(cancer_type), str(stage), *card.sectors.as_tuple(), card.weighted))
        rows.append((str(cancer_type), "subtotal",
                     *average([(cancer_type, s) for s in stages])))
    rows.append(("all", "total", *average(list(TUMOURS))))
    return Table(name, columns, rows, md_format={c: _cents for c in columns[2:]})


def incident_cost_cards(result: ModelResult) -> Table:
    return _card_table(result, Population.INCIDENT, "incident_cost_cards")


def prevalent_cost_cards(result: ModelResult) -> Table:
    return _card_table(result, Population.PREVALENT, "prevalent_cost_cards")


def sector_burden(result: ModelResult) -> Table:
    columns = ("row", "public", "social_security", "private", "total")
    rows = [(label, values["cost_public"], values["cost_social_security"],
             values["cost_private"], values["cost_total"])
            for label, values in table_rows(result.report).items()]
    return Table("sector_burden", columns, rows,
                 md_format={c: _count for c in columns[1:]})


def health_loss_summary(result: ModelResult) -> Table:
    columns = ("measure", "male", "female", "total")
    rows = [(name, v["male"], v["female"], v["total"])
            for name, v in health_rows(result.health_loss).items()]
    return Table("health_loss_summary", columns, rows, md_format={c: _count for c in columns[1:]})


def cost_composition(result: ModelResult) -> Table:
    columns = ("population", "type", "stage", "category", *(str(s) for s in SECTORS),
               "weighted", "defined")
    rows = []
    for (population, t, s), comp in composition_breakdown(result.cards).items():
        for category, shares in comp.shares.items():
            rows.append((str(population), str(t), str(s), str(category),
                         *(shares[str(x)] for x in SECTORS), shares["weighted"],
                         comp.defined))
    return Table("cost_composition", columns, rows,
                 md_format={c: _share for c in columns[4:8]})


def prevalence_by_year(result: ModelResult) -> Table:
    columns = ("type", "stage", "sex", "year", "raw_survivors", "calibrated_survivors")
    rows = []
    for (t, s, sex), curve in result.raw_prevalence.survivors.items():
        calibrated = result.calibrated_prevalence.survivors[(t, s, sex)]
        for k in YEARS:
            rows.append((str(t), str(s), str(sex), k, curve[k - 1], calibrated[k - 1]))
    f = result.calibration
    meta: dict[str, object] = {"f1": f.f1, "f2to5": f.f2to5}
    if f.residual_3y is not None:
        meta["residual_3y"] = f.residual_3y
    return Table("prevalence_by_year", columns, rows, metadata=meta,
                 md_format={"raw_survivors": _cents, "calibrated_survivors": _cents})


def case_matrix(result: ModelResult) -> Table:
    columns = ("population", "type", "stage", "sex", "cases")
    rows = [(str(p), str(t), str(s), str(sex), result.cases[(p, t, s, sex)])
            for p in POPULATIONS for t, s in TUMOURS for sex in SEXES]
    return Table("case_matrix", columns, rows, md_format={"cases": _cents})


def burden_intervals(summary: SimulationSummary) -> Table:
    columns = ("row", "column", "deterministic", "mean", "lower", "upper", "sd")
    rows = [(row, column, summary.deterministic[(row, column)], c.mean, c.lower, c.upper, c.sd)
            for (row, column), c in summary.cells.items()]

    meta = {"iterations": summary.iterations, "seed": summary.seed,
            "percentiles": list(summary.percentiles)}
    return Table("burden_intervals", columns, rows, metadata=meta,
                 md_format={c: _cents for c in columns[2:]})


RUN_TABLES = (burden_summary, incident_cost_cards, prevalent_cost_cards, sector_burden,
              health_loss_summary, cost_composition)
INTERMEDIATE_TABLES = (prevalence_by_year, case_matrix)
