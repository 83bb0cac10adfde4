"""Serialization of experiment reports."""

import csv
import io
import json
from pathlib import Path

from stablelab.config import ReportFormatEnum
from stablelab.exceptions import OutputError
from stablelab.experiments.artifacts import format_cell
from stablelab.experiments.schemas import ExperimentReport

REPORT_FILE = "report.json"
CHECKS_FILE = "checks.csv"
CHECKS_HEADER = ("name", "status", "anchor", "reference", "tolerance", "values")


def _to_json(report: ExperimentReport) -> str:
    return report.model_dump_json(indent=2) + "\n"


def _to_csv(report: ExperimentReport) -> str:
    stream = io.StringIO()
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CHECKS_HEADER)
    for check in report.checks:
        writer.writerow(
            [
                check.name,
                check.status.value,
                check.anchor,
                check.reference or "",
                format_cell(check.tolerance),
                json.dumps(check.values, separators=(",", ":")),
            ]
        )
    return stream.getvalue()


def _to_human(report: ExperimentReport) -> str:
    lines = [
        f"experiment: {report.experiment}",
        f"status: {'PASS' if report.passed else 'FAIL'}",
        f"wall clock: {report.wall_clock:.2f} s",
    ]
    for check in report.checks:
        line = f"[{check.status.value}] {check.name}: {check.anchor}"
        if check.tolerance is not None:
            line += f" (tolerance {check.tolerance:g})"
        lines.append(line)
    lines += [f"artifact: {name}" for name in report.artifacts]
    return "\n".join(lines) + "\n"


def emit_report(report: ExperimentReport, fmt: ReportFormatEnum | str) -> str:
    """Serialize a report.

    JSON is the canonical format, keys in declaration order and without the wall
    clock. CSV has one line per check, the values as compact JSON. The human format
    starts with the experiment name.
    """
    fmt = ReportFormatEnum(fmt)
    if fmt == ReportFormatEnum.json:
        return _to_json(report)
    if fmt == ReportFormatEnum.csv:
        return _to_csv(report)
    return _to_human(report)


def write_report(report: ExperimentReport, output_dir: Path) -> list[str]:
    """Write report.json and checks.csv.

    Returns:
        list[str]: The written file names.

    Raises:
        OutputError: If a file cannot be written.

    """
    names = []
    for name, fmt in ((REPORT_FILE, "json"), (CHECKS_FILE, "csv")):
        path = Path(output_dir) / name
        try:
            with path.open("w", newline="") as stream:
                stream.write(emit_report(report, fmt))
        except OSError as e:
            raise OutputError(path, e.strerror or str(e)) from e
        names.append(name)
    return names
