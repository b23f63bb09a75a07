"""Regular simplex: the exact arrangement when ``d >= n - 1``."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import TammesError, as_points, normalize_rows


class DimensionTooSmall(TammesError):
    def __init__(self, n: int, d: int):
        self.n, self.d = n, d
        super().__init__(f"a regular simplex of {n} points needs d >= {n - 1}, got d = {d}")


@dataclass(frozen=True)
class SimplexReport:
    max_cosine_deviation: float
    sum_norm: float
    rank_check_residual: float

    def worst(self) -> float:
        return max(self.max_cosine_deviation, self.sum_norm, self.rank_check_residual)


def _zero_sum_basis(n: int) -> np.ndarray:
    """Orthonormal basis (as columns) of ``{x in R^n : sum(x) = 0}``.

    Classical Gram-Schmidt over ``e_k - e_n`` for ``k = 1 .. n-1``.
    """
    basis = np.zeros((n, n - 1))
    for k in range(n - 1):
        v = np.zeros(n)
        v[k], v[-1] = 1.0, -1.0
        for j in range(k):
            v -= (basis[:, j] @ v) * basis[:, j]
        basis[:, k] = v / np.linalg.norm(v)
    return basis


def regular_simplex(n: int, d: int) -> np.ndarray:
    """``n`` unit vectors in ``R^d`` with all pairwise cosines ``-1/(n-1)``."""
    if n < 2:
        raise TammesError(f"a simplex needs at least 2 points, got {n}")
    if d < n - 1:
        raise DimensionTooSmall(n, d)
    centred = np.eye(n) - 1.0 / n
    centred /= np.linalg.norm(centred, axis=1, keepdims=True)
    coords = centred @ _zero_sum_basis(n)
    out = np.zeros((n, d))
    out[:, : n - 1] = coords
    return out


def verify_simplex(points, n_probes: int = 5, seed: int = 0) -> SimplexReport:
    """Measure how far a point set is from the regular simplex.

    The Gram matrix ``C`` of a regular simplex has eigenvalue 0 on the
    all-ones vector and ``n/(n-1)`` on its orthogonal complement. Both are
    checked by applying ``C`` to probe vectors; the reported residual is the
    worst of the two.
    """
    unit = normalize_rows(as_points(points))
    n = unit.shape[0]
    sum_norm = float(np.linalg.norm(unit.sum(axis=0)))
    if n < 2:
        return SimplexReport(0.0, sum_norm, 0.0)
    gram = unit @ unit.T
    target = -1.0 / (n - 1)
    iu = np.triu_indices(n, 1)
    max_dev = float(np.abs(gram[iu] - target).max())

    ones = np.ones(n)
    residual = float(np.linalg.norm(gram @ ones)) / np.sqrt(n)
    rng = np.random.default_rng(seed)
    lam = n / (n - 1)
    for _ in range(n_probes if n > 1 else 0):
        x = rng.standard_normal(n)
        x -= x.mean()
        x /= np.linalg.norm(x)
        residual = max(residual, float(np.linalg.norm(gram @ x - lam * x)))
    return SimplexReport(max_dev, sum_norm, residual)
