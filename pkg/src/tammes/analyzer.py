"""Pairwise-angle statistics for weight matrices (rows are neurons/filters)."""
from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import asdict, dataclass, field

import numpy as np

from .core import (
    TammesError,
    TooFewPoints,
    angle_matrix,
    as_points,
    cosine_matrix,
    min_pairwise_angle,
    pointset_from_dict,
)


class ParseError(TammesError):
    def __init__(self, line: int, column: int, message: str = "not a number"):
        self.line, self.column = line, column
        super().__init__(f"line {line}, column {column}: {message}")


class RaggedRows(TammesError):
    def __init__(self, line: int, expected: int, got: int):
        self.line = line
        super().__init__(f"line {line} has {got} values, expected {expected}")


@dataclass
class AngleStats:
    n: int
    d: int
    min_angle_deg: float
    mean_abs_cosine: float
    count_above_threshold: int
    histogram: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def _is_number(text: str) -> bool:
    try:
        float(text)
    except ValueError:
        return False
    return True


def parse_csv(text: str) -> np.ndarray:
    """One vector per line; a non-numeric first line is taken as a header."""
    rows = []
    width = None
    for lineno, record in enumerate(csv.reader(io.StringIO(text)), start=1):
        if not record or all(not c.strip() for c in record):
            continue
        cells = [c.strip() for c in record]
        if lineno == 1 and not all(_is_number(c) for c in cells):
            continue
        values = []
        for col, cell in enumerate(cells, start=1):
            try:
                values.append(float(cell))
            except ValueError:
                raise ParseError(lineno, col, f"cannot parse {cell!r} as a number") from None
        if width is None:
            width = len(values)
        elif len(values) != width:
            raise RaggedRows(lineno, width, len(values))
        rows.append(values)
    if not rows:
        raise TooFewPoints(0)
    return np.array(rows, dtype=np.float64)


def load_weight_matrix(source, fmt: str = "csv") -> np.ndarray:
    """Read a weight matrix from a path, an open text file, or a string of content.

    ``fmt`` is ``"csv"`` or ``"json"`` (the point-set JSON layout).
    """
    if hasattr(source, "read"):
        text = source.read()
    elif isinstance(source, (str, os.PathLike)) and os.path.exists(source):
        with open(source) as fh:
            text = fh.read()
    else:
        text = str(source)

    if fmt == "csv":
        points = parse_csv(text)
    elif fmt in ("json", "pointset-json"):
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as err:
            raise ParseError(err.lineno, err.colno, err.msg) from None
        points = pointset_from_dict(obj)
    else:
        raise TammesError(f"unknown input format {fmt!r}")
    if points.shape[0] < 2:
        raise TooFewPoints(points.shape[0])
    return points


def cosine_histogram(values: np.ndarray, bins: int) -> list[tuple[float, float, int]]:
    """Count ``values`` in ``bins`` equal bins over [-1, 1].

    A value on an interior edge goes to the lower bin; -1 goes to the first
    bin and +1 to the last.
    """
    if bins < 1:
        raise TammesError(f"bins must be positive, got {bins}")
    edges = np.linspace(-1.0, 1.0, bins + 1)
    idx = np.clip(np.searchsorted(edges, values, side="left") - 1, 0, bins - 1)
    counts = np.bincount(idx, minlength=bins)
    return [(float(edges[k]), float(edges[k + 1]), int(counts[k])) for k in range(bins)]


def angle_stats(points, threshold: float = 0.2, bins: int = 40) -> AngleStats:
    """Statistics over the ``n(n-1)/2`` unordered pairs of rows."""
    arr = as_points(points)
    n, d = arr.shape
    if n < 2:
        raise TooFewPoints(n)
    cos = cosine_matrix(arr)
    pairs = cos[np.triu_indices(n, 1)]
    return AngleStats(
        n=n,
        d=d,
        min_angle_deg=math.degrees(min_pairwise_angle(angle_matrix(cos))),
        mean_abs_cosine=float(np.abs(pairs).mean()),
        count_above_threshold=int(np.count_nonzero(pairs > threshold)),
        histogram=cosine_histogram(pairs, bins),
    )


def histogram_csv(stats: AngleStats) -> str:
    lines = ["bin_lo,bin_hi,count"]
    lines += [f"{lo!r},{hi!r},{count}" for lo, hi, count in stats.histogram]
    return "\n".join(lines) + "\n"


def matrix_csv(points) -> str:
    arr = as_points(points)
    return "".join(",".join(repr(float(v)) for v in row) + "\n" for row in arr)
