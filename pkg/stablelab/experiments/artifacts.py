"""Writers for CSV artifacts."""

import csv
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import Any

import numpy as np

from stablelab.exceptions import OutputError
from stablelab.utils import format_float


def format_cell(value: Any) -> str:
    """Format a CSV cell, floats with 17 significant digits."""
    if isinstance(value, bool | np.bool_):
        return str(bool(value)).lower()
    if isinstance(value, float | np.floating):
        return format_float(float(value))
    if value is None:
        return ""
    return str(value)


def write_csv(
    output_dir: Path, name: str, header: Sequence[str], rows: Iterable[Sequence[Any]]
) -> str:
    """Write a comma separated file with a header line and LF line endings.

    Args:
        output_dir (Path): Destination directory, created when missing.
        name (str): File name.
        header (Sequence[str]): Column names.
        rows (Iterable[Sequence[Any]]): One sequence of cells per line.

    Returns:
        str: The file name, as listed in the report artifacts.

    Raises:
        OutputError: If the directory or the file cannot be written.

    """
    path = Path(output_dir) / name
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="") as stream:
            writer = csv.writer(stream, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([format_cell(v) for v in row])
    except OSError as e:
        raise OutputError(path, e.strerror or str(e)) from e
    return name
