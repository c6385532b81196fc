"""Run reports: deterministic JSON output, schema checks and plot-data export."""

from __future__ import annotations

import csv
import json
import logging

from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from functools import lru_cache
from importlib.resources import files as resource_files
from pathlib import Path
from typing import Any

import jsonschema  # type: ignore[import-untyped]
import numpy as np
import scipy

from group_kstab.config import ProblemValidationError, Settings, write_file_atomic
from group_kstab.errors import KStabError
from group_kstab.problem import ProblemSpec
from group_kstab.utils import canonical_json

logger = logging.getLogger(__name__)

REPORT_SCHEMA_VERSION = "1.0"
SECTIONS = ("root_system", "chamber", "analysis", "soliton", "kenergy")
PLOT_SELECTORS = ("polytope", "barycenters", "cone-rays", "descent-trace")
TRACE_COLUMNS = ("iteration", "value", "kenergy", "grad_norm", "step", "min_eig")

# Settings that change how fast a run is, never what it computes.
_RUNTIME_SETTINGS = ("threads",)


class UnknownSelector(ProblemValidationError):
    """Raised for a plot-export selector outside the supported set."""

    pass


class MissingReportData(ProblemValidationError):
    """Raised when a report lacks the section a plot export needs."""

    pass


def provenance(settings: Settings) -> dict[str, Any]:
    from group_kstab import __version__

    values = settings.to_dict()
    for key in _RUNTIME_SETTINGS:
        values.pop(key, None)
    return {
        "package": "group-kstability",
        "version": __version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "settings": values,
    }


@dataclass
class RunReport:
    """Everything one pipeline run produced, ready for canonical JSON."""

    problem: ProblemSpec
    settings: Settings
    analyses: tuple[str, ...] = ()
    sections: dict[str, dict[str, Any]] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)
    errors: list[KStabError] = field(default_factory=list)
    timings: dict[str, float] = field(default_factory=dict)
    exit_code: int = 0

    def to_dict(self, *, include_timings: bool = True) -> dict[str, Any]:
        data: dict[str, Any] = {
            "schema_version": REPORT_SCHEMA_VERSION,
            "problem": {
                "name": self.problem.name,
                "input_hash": self.problem.input_hash,
                "analyses": list(self.analyses or self.problem.analyses),
            },
            "provenance": provenance(self.settings),
            "warnings": list(self.warnings),
            "errors": [e.to_dict() for e in self.errors],
            "exit_code": self.exit_code,
        }
        for key in SECTIONS:
            data[key] = self.sections.get(key)
        if include_timings:
            data["timings"] = {
                "threads": self.settings.threads,
                "seconds": dict(self.timings),
            }
        return data

    def to_json(self, *, include_timings: bool = True) -> str:
        return canonical_json(self.to_dict(include_timings=include_timings))

    def write(self, path: Path) -> None:
        path.parent.mkdir(parents=True, exist_ok=True)
        text = self.to_json()
        write_file_atomic(path, lambda f: f.write(text))
        logger.debug("Wrote report %s", path)


@lru_cache(maxsize=1)
def report_schema() -> dict[str, Any]:
    text = (resource_files("group_kstab") / "schemas" / "report.schema.json").read_text()
    schema: dict[str, Any] = json.loads(text)
    return schema


def validate_report(data: Any) -> None:
    """Check a decoded report against the bundled report schema.

    Raises:
        ProblemValidationError: At the first schema violation
    """
    validator = jsonschema.Draft202012Validator(report_schema())
    errors = sorted(
        validator.iter_errors(data), key=lambda e: [str(p) for p in e.absolute_path]
    )
    if errors:
        first = errors[0]
        location = "/".join(str(p) for p in first.absolute_path) or "<root>"
        raise ProblemValidationError(
            f"Report invalid at {location}: {first.message}", errors=len(errors)
        )


def strip_timings(data: Mapping[str, Any]) -> dict[str, Any]:
    return {key: value for key, value in data.items() if key != "timings"}


def _floats(record: Mapping[str, Any]) -> list[float]:
    return [float(x) for x in record["float"]]


def _coordinate_header(rank: int) -> list[str]:
    return [f"y{k + 1}" for k in range(rank)]


def _section(report: Mapping[str, Any], key: str, selector: str) -> dict[str, Any]:
    section = report.get(key)
    if not section:
        raise MissingReportData(
            f"Report has no {key} section for the {selector} export", selector=selector
        )
    return dict(section)


def _polytope_rows(report: Mapping[str, Any]) -> tuple[list[str], list[list[Any]]]:
    chamber = _section(report, "chamber", "polytope")
    vertices = [_floats(v) for v in chamber["vertices"]]
    rank = len(vertices[0]) if vertices else 0
    header = ["kind", "index", "start", "end", *_coordinate_header(rank)]
    rows: list[list[Any]] = [
        ["vertex", i, "", "", *coordinates] for i, coordinates in enumerate(vertices)
    ]
    rows.extend(
        ["edge", i, start, end, *([""] * rank)]
        for i, (start, end) in enumerate(chamber["edges"])
    )
    return header, rows


def _barycenter_rows(report: Mapping[str, Any]) -> tuple[list[str], list[list[Any]]]:
    analysis = _section(report, "analysis", "barycenters")
    points = [
        ("bar", _floats(analysis["bar"])),
        ("bar_tilde", _floats(analysis["bar_tilde"])),
        ("4rho", _floats(analysis["four_rho"])),
    ]
    soliton = report.get("soliton") or {}
    if soliton.get("bar_X") is not None:
        points.append(("bar_X", [float(x) for x in soliton["bar_X"]["value"]]))
    header = ["label", *_coordinate_header(len(points[0][1]))]
    return header, [[label, *coordinates] for label, coordinates in points]


def _cone_ray_rows(report: Mapping[str, Any]) -> tuple[list[str], list[list[Any]]]:
    chamber = _section(report, "chamber", "cone-rays")
    rows: list[list[Any]] = [
        ["ray", f"alpha{i + 1}", *_floats(ray)]
        for i, ray in enumerate(chamber["xi_rays"])
    ]
    rows.extend(
        ["line", f"t{k + 1}", *_floats(direction)]
        for k, direction in enumerate(chamber["toric_directions"])
    )
    rank = len(chamber["vertices"][0]["float"])
    return ["kind", "label", *_coordinate_header(rank)], rows


def _trace_rows(report: Mapping[str, Any]) -> tuple[list[str], list[list[Any]]]:
    kenergy = _section(report, "kenergy", "descent-trace")
    minimize = kenergy.get("minimize")
    if not minimize:
        raise MissingReportData(
            "Report has no minimization trace; rerun kenergy with --minimize",
            selector="descent-trace",
        )
    rows = [[row.get(column, "") for column in TRACE_COLUMNS] for row in minimize["trace"]]
    return list(TRACE_COLUMNS), rows


_EXPORTS = {
    "polytope": ("polytope.csv", _polytope_rows),
    "barycenters": ("barycenters.csv", _barycenter_rows),
    "cone-rays": ("cone_rays.csv", _cone_ray_rows),
    "descent-trace": ("descent_trace.csv", _trace_rows),
}


def check_selectors(what: Sequence[str]) -> tuple[str, ...]:
    unknown = sorted(set(what) - set(PLOT_SELECTORS))
    if unknown:
        raise UnknownSelector(
            f"Unknown export selectors: {', '.join(unknown)} "
            f"(choose from {', '.join(PLOT_SELECTORS)})",
            selectors=unknown,
        )
    return tuple(s for s in PLOT_SELECTORS if s in what)


def export_plot_data(
    report: Mapping[str, Any], what: Sequence[str], outdir: Path
) -> list[Path]:
    """Write one CSV per selector into ``outdir`` and return their paths.

    Raises:
        UnknownSelector: For selectors outside PLOT_SELECTORS
        MissingReportData: If the report lacks the section a selector reads
    """
    selectors = check_selectors(what)
    outdir.mkdir(parents=True, exist_ok=True)
    written = []
    for selector in selectors:
        filename, build = _EXPORTS[selector]
        header, rows = build(report)
        path = outdir / filename

        def write_csv(f: Any, header: list[str] = header, rows: list[list[Any]] = rows) -> None:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)

        write_file_atomic(path, write_csv)
        logger.debug("Exported %d %s rows to %s", len(rows), selector, path)
        written.append(path)
    return written
