"""Plain text checkpoints of nodal values on a 2D grid."""

import math
from collections.abc import Mapping
from pathlib import Path

import numpy as np

from stablelab.exceptions import DomainError, OutputError
from stablelab.utils import format_float


def write_grid_checkpoint(
    path: Path, header: Mapping[str, float | int], values: np.ndarray
) -> Path:
    """Write a header line of key=value tokens followed by the row-major values.

    The header also records rows and cols. Integers are written as such, floats with
    17 significant digits, one row of the array per line.

    Raises:
        OutputError: If the file cannot be written.

    """
    path = Path(path)
    values = np.asarray(values, dtype=float)
    if values.ndim != 2:
        raise DomainError(f"Checkpoints hold 2D arrays, got {values.ndim} axes")
    tokens = [
        f"{key}={v if isinstance(v, int) else format_float(float(v))}"
        for key, v in header.items()
    ]
    tokens += [f"rows={values.shape[0]}", f"cols={values.shape[1]}"]
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="\n") as stream:
            stream.write(" ".join(tokens) + "\n")
            for row in values:
                stream.write(" ".join(format_float(float(v)) for v in row) + "\n")
    except OSError as e:
        raise OutputError(path, e.strerror or str(e)) from e
    return path


def _parse(token: str) -> float:
    """Invert format_float: null stands for a non-finite value."""
    return math.nan if token == "null" else float(token)


def read_grid_checkpoint(path: Path) -> tuple[dict[str, float], np.ndarray]:
    """Read a checkpoint written by write_grid_checkpoint.

    Non-finite values, written as null, are read back as NaN.

    Returns:
        tuple[dict[str, float], np.ndarray]: Header values without rows and cols,
            and the array of nodal values.

    Raises:
        DomainError: If the header or a value is malformed, or the value count is
            wrong.

    """
    with Path(path).open() as stream:
        first = stream.readline().split()
        body = stream.read().split()
    try:
        header = {key: _parse(v) for key, v in (t.split("=", 1) for t in first)}
        rows, cols = int(header.pop("rows")), int(header.pop("cols"))
    except (KeyError, ValueError) as e:
        raise DomainError(f"Malformed checkpoint header in {path}") from e
    if len(body) != rows * cols:
        raise DomainError(
            f"Checkpoint {path} holds {len(body)} values, expected {rows * cols}"
        )
    try:
        values = np.array([_parse(v) for v in body]).reshape(rows, cols)
    except ValueError as e:
        raise DomainError(f"Malformed checkpoint value in {path}: {e}") from e
    return header, values
