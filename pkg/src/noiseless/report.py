"""Report documents and their text (rich) and structured (YAML) renderings."""

from collections.abc import Mapping
from typing import Any, TextIO

import yaml
from rich.console import Console
from rich.markup import escape
from rich.table import Table

from .model import DataVectorSpec, Diagnostic, PrivacyBound, central_moments
from .planner import PlanReport

Document = dict[str, Any]


def rounded(value: float | None, digits: int) -> float | None:
    """Round to ``digits`` significant digits; YAML then prints no more than that."""
    if value is None:
        return None
    return float(f"{value:.{digits}g}")


def diagnostics_document(diagnostics: tuple[Diagnostic, ...]) -> list[dict[str, str]]:
    return [{"code": d.code, "message": d.message} for d in diagnostics]


def bound_document(bound: PrivacyBound, digits: int) -> Document:
    return {
        "source": bound.source.value,
        "epsilon": rounded(bound.epsilon, digits),
        "delta": rounded(bound.delta, digits),
        "vacuous": bound.vacuous,
        "preconditions_ok": bound.preconditions_ok,
        "diagnostics": diagnostics_document(bound.diagnostics),
    }


def moments_document(spec: DataVectorSpec, digits: int) -> Document:
    records = []
    for position, record in enumerate(spec.records):
        m = central_moments(record)
        records.append(
            {
                "record": record.label(position),
                "family": record.family.value,
                "count": record.count,
                "mean": rounded(m.mean, digits),
                "variance": rounded(m.variance, digits),
                "abs_third_central": rounded(m.abs_third_central, digits),
                "fourth_central": rounded(m.fourth_central, digits),
            }
        )
    totals = spec.totals
    return {
        "n": spec.n,
        "sensitivity": rounded(spec.sensitivity, digits),
        "dependency_bound": spec.dependency_bound,
        "total_variance": rounded(spec.total_variance, digits),
        "sum_abs_third": rounded(totals.abs_third, digits),
        "sum_fourth": rounded(totals.fourth, digits),
        "records": records,
    }


def plan_document(report: PlanReport, digits: int) -> Document:
    noise = None
    if report.noise_plan is not None:
        plan = report.noise_plan
        noise = {
            "noise_family": plan.noise_family.value,
            "noise_variance": rounded(plan.noise_variance, digits),
            "laplace_scale": rounded(plan.laplace_scale, digits),
            "resulting_epsilon": rounded(plan.resulting_epsilon, digits),
            "baseline_laplace_variance": rounded(plan.baseline_laplace_variance, digits),
            "regime": plan.regime.value,
        }
    document = {
        "chosen_path": report.chosen_path.value,
        "bound": bound_document(report.bounds, digits),
        "noise_plan": noise,
        "baseline_laplace_variance": rounded(report.baseline_laplace_variance, digits),
        "compromised": list(report.compromised),
        "diagnostics": diagnostics_document(report.diagnostics),
    }
    if report.supplementary is not None:
        document["supplementary"] = bound_document(report.supplementary, digits)
    return document


def write_structured(document: Document, stream: TextIO) -> None:
    stream.write(yaml.safe_dump(document, sort_keys=False, allow_unicode=True))


def _cell(value: Any, digits: int) -> str:
    if value is None:
        return "-"
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        return f"{value:.{digits}g}"
    if isinstance(value, list):
        return ", ".join(_cell(v, digits) for v in value) or "-"
    return escape(str(value))


def _style_for(key: str, value: Any) -> str:
    if key == "verdict":
        return "pass" if value == "PASS" else "fail"
    if key == "vacuous" and value:
        return "vacuous"
    return "value"


def _rows_table(title: str, rows: list[Mapping[str, Any]], digits: int, style: str) -> Table:
    table = Table(title=title, title_style="title", header_style="key")
    for column in rows[0]:
        table.add_column(column)
    for row in rows:
        table.add_row(*(_cell(v, digits) for v in row.values()), style=style)
    return table


def render_text(document: Document, console: Console, title: str, digits: int) -> None:
    """Scalars in one key/value table; nested sections and row lists in their own."""
    summary = Table(title=title, title_style="title", show_header=False)
    summary.add_column(style="key")
    summary.add_column()
    sections = []
    for key, value in document.items():
        if isinstance(value, Mapping):
            sections.append((key, value))
        elif isinstance(value, list) and value and isinstance(value[0], Mapping):
            sections.append((key, value))
        elif key == "diagnostics":
            continue
        else:
            summary.add_row(key, _cell(value, digits), style=_style_for(key, value))
    console.print(summary)
    for key, value in sections:
        if isinstance(value, Mapping):
            render_text(dict(value), console, key, digits)
        else:
            style = "warning" if key == "diagnostics" else "value"
            console.print(_rows_table(key, value, digits, style))


def emit(
    document: Document,
    structured: bool,
    console: Console,
    title: str,
    digits: int,
) -> None:
    if structured:
        write_structured(document, console.file)
    else:
        render_text(document, console, title, digits)
