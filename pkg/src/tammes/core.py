"""Pairwise geometry of point sets on the unit hypersphere.

A point set is an ``(n, d)`` float64 array whose rows are (unnormalized)
vectors. Angles are radians everywhere in this package; degrees only appear
in reports and on the command line.
"""
from __future__ import annotations

import json
from typing import IO

import numpy as np

#: Off-diagonal cosines are clamped into [-1 + COS_EPS, 1 - COS_EPS].
COS_EPS = 1e-7
#: Rows with norm at or below this are treated as zero.
MIN_NORM = 1e-30


class TammesError(ValueError):
    """Base class for errors raised by this package."""


class ZeroNormRow(TammesError):
    def __init__(self, row: int, layer: int | None = None):
        self.row = row
        self.layer = layer
        where = f"row {row}" if layer is None else f"layer {layer}, row {row}"
        super().__init__(f"{where} has zero norm and cannot be normalized")


class TooFewPoints(TammesError):
    def __init__(self, n: int):
        self.n = n
        super().__init__(f"pairwise operations need at least 2 points, got {n}")


def as_points(points) -> np.ndarray:
    """Coerce ``points`` into a 2-D float64 array."""
    arr = np.asarray(points, dtype=np.float64)
    if arr.ndim != 2:
        raise TammesError(f"expected an (n, d) matrix, got shape {arr.shape}")
    return arr


def _require_pairs(arr: np.ndarray) -> None:
    if arr.shape[0] < 2:
        raise TooFewPoints(arr.shape[0])


def row_norms(points) -> np.ndarray:
    """Euclidean norm of every row; raises ZeroNormRow on a degenerate row."""
    arr = as_points(points)
    norms = np.sqrt(np.einsum("ij,ij->i", arr, arr))
    bad = np.flatnonzero(~(norms > MIN_NORM))
    if bad.size:
        raise ZeroNormRow(int(bad[0]))
    return norms


def normalize_rows(points) -> np.ndarray:
    arr = as_points(points)
    return arr / row_norms(arr)[:, None]


def _clamped_gram(unit: np.ndarray) -> np.ndarray:
    cos = unit @ unit.T
    # exact symmetry: keep the upper triangle and mirror it
    cos = np.triu(cos, 1)
    cos = cos + cos.T
    np.clip(cos, -1.0 + COS_EPS, 1.0 - COS_EPS, out=cos)
    np.fill_diagonal(cos, 1.0)
    return cos


def cosine_matrix(points) -> np.ndarray:
    """Pairwise cosine similarities of the normalized rows.

    Off-diagonal entries are clamped to ``[-1 + COS_EPS, 1 - COS_EPS]`` and the
    diagonal is exactly 1. The result is bitwise symmetric.
    """
    arr = as_points(points)
    _require_pairs(arr)
    return _clamped_gram(normalize_rows(arr))


def angle_matrix(cos: np.ndarray) -> np.ndarray:
    theta = np.arccos(np.asarray(cos, dtype=np.float64))
    np.fill_diagonal(theta, 0.0)
    return theta


def _masked_diagonal(mat: np.ndarray, fill: float) -> np.ndarray:
    out = np.array(mat, dtype=np.float64, copy=True)
    np.fill_diagonal(out, fill)
    return out


def row_min_angles(theta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-row minimum off-diagonal angle and the lowest index attaining it."""
    theta = np.asarray(theta, dtype=np.float64)
    _require_pairs(theta)
    masked = _masked_diagonal(theta, np.inf)
    # np.argmin returns the first occurrence, which is the tie-break we want
    idx = np.argmin(masked, axis=1)
    return masked[np.arange(len(idx)), idx], idx


def min_pairwise_angle(theta: np.ndarray) -> float:
    mins, _ = row_min_angles(theta)
    return float(mins.min())


def min_angle_of(points) -> float:
    """Minimum pairwise angle (radians) of a raw point set."""
    return min_pairwise_angle(angle_matrix(cosine_matrix(points)))


def min_angle_deg(points) -> float:
    return float(np.degrees(min_angle_of(points)))


# -- PointSet JSON ----------------------------------------------------------

def pointset_to_dict(points) -> dict:
    arr = as_points(points)
    n, d = arr.shape
    return {"d": int(d), "n": int(n), "points": arr.tolist()}


def pointset_from_dict(obj: dict) -> np.ndarray:
    """Parse the ``{"d", "n", "points"}`` mapping. Extra keys are ignored."""
    try:
        rows = obj["points"]
    except (KeyError, TypeError):
        raise TammesError("point set JSON needs a 'points' field") from None
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise TammesError("'points' must be a list of lists")
    widths = {len(r) for r in rows}
    if len(widths) > 1:
        raise TammesError("'points' rows have differing lengths")
    arr = np.array(rows, dtype=np.float64).reshape(len(rows), widths.pop() if widths else 0)
    n, d = obj.get("n", arr.shape[0]), obj.get("d", arr.shape[1])
    if (n, d) != arr.shape:
        raise TammesError(f"declared shape ({n}, {d}) does not match points {arr.shape}")
    return arr


def dump_pointset(points, fp: IO[str]) -> None:
    json.dump(pointset_to_dict(points), fp)


def load_pointset(fp: IO[str]) -> np.ndarray:
    return pointset_from_dict(json.load(fp))
