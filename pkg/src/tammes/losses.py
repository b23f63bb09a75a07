"""Loss functions for spreading points on the hypersphere.

Every loss takes the raw ``(n, d)`` weight matrix and returns a
:class:`LossEval` holding the scalar value and the gradient with respect to
the *unnormalized* rows. All losses depend on directions only, so each
gradient row is orthogonal to its weight row.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .core import (
    COS_EPS,
    TammesError,
    ZeroNormRow,
    _require_pairs,
    as_points,
    row_norms,
)

log = logging.getLogger(__name__)

#: Chordal distances below this are floored in the potential-energy losses.
DIST_FLOOR = 1e-7


class DomainError(TammesError):
    pass


class LossEval(NamedTuple):
    value: float
    grad: np.ndarray


@dataclass(frozen=True)
class LossKind:
    """A loss selector: ``mma``, ``cosine``, ``rf`` (with exponent ``s``),
    ``log`` or ``orthogonal`` (with coefficient ``lam``)."""

    name: str
    s: float = 2.0
    lam: float = 1.0

    NAMES = ("mma", "cosine", "rf", "log", "orthogonal")

    def __post_init__(self):
        if self.name not in self.NAMES:
            raise TammesError(f"unknown loss {self.name!r}; choose from {self.NAMES}")
        if self.name == "rf" and not self.s > 0:
            raise TammesError(f"Riesz-Fisher exponent must be positive, got {self.s}")
        if self.name == "orthogonal" and not self.lam >= 0:
            raise TammesError(f"orthogonal coefficient must be nonnegative, got {self.lam}")

    @property
    def label(self) -> str:
        return f"rf(s={self.s:g})" if self.name == "rf" else self.name


MMA = LossKind("mma")
COSINE = LossKind("cosine")
LOG = LossKind("log")


def riesz_fisher(s: float = 2.0) -> LossKind:
    return LossKind("rf", s=s)


def orthogonal(lam: float = 1.0) -> LossKind:
    return LossKind("orthogonal", lam=lam)


def _prepare(points):
    w = as_points(points)
    _require_pairs(w)
    norms = row_norms(w)
    unit = w / norms[:, None]
    return w, norms, unit


def _tangent(grad_unit: np.ndarray, unit: np.ndarray, norms: np.ndarray) -> np.ndarray:
    """Chain a gradient w.r.t. normalized rows back to the raw rows.

    Applies ``(I - u u^T) / |w|`` row by row.
    """
    radial = np.einsum("ij,ij->i", grad_unit, unit)
    return (grad_unit - radial[:, None] * unit) / norms[:, None]


def _selected_pair_grad(unit, norms, rows, cols, coef):
    """Gradient of ``sum_k coef[k] * cos(u_rows[k], u_cols[k])`` w.r.t. raw rows.

    d cos_ij / d w_i = (u_j - cos_ij u_i) / |w_i|, and symmetrically for w_j.
    """
    grad_unit = np.zeros_like(unit)
    np.add.at(grad_unit, rows, coef[:, None] * unit[cols])
    np.add.at(grad_unit, cols, coef[:, None] * unit[rows])
    return _tangent(grad_unit, unit, norms)


def _nearest(unit):
    """Clamped cosine to, and index of, each row's most similar other row.

    Selecting the largest cosine is the same as selecting the smallest angle;
    ``argmax`` keeps the lowest index on ties.
    """
    gram = unit @ unit.T
    np.fill_diagonal(gram, -np.inf)
    idx = np.argmax(gram, axis=1)
    cos = gram[np.arange(len(idx)), idx]
    return np.clip(cos, -1.0 + COS_EPS, 1.0 - COS_EPS), idx


def mma_loss_grad(points) -> LossEval:
    """Negative mean of each row's minimum angle to any other row.

    Only the arg-min pair of each row carries gradient (lowest index on
    ties), and both of its endpoints receive it.
    """
    w, norms, unit = _prepare(points)
    n = w.shape[0]
    cos, idx = _nearest(unit)
    sin = np.sqrt(1.0 - cos * cos)
    # d theta = -d cos / sin, and the loss carries -1/n
    coef = 1.0 / (n * sin)
    grad = _selected_pair_grad(unit, norms, np.arange(n), idx, coef)
    return LossEval(-float(np.arccos(cos).mean()), grad)


def cosine_loss_grad(points) -> LossEval:
    """Mean of each row's maximum cosine similarity to any other row."""
    w, norms, unit = _prepare(points)
    n = w.shape[0]
    cos, idx = _nearest(unit)
    coef = np.full(n, 1.0 / n)
    grad = _selected_pair_grad(unit, norms, np.arange(n), idx, coef)
    return LossEval(float(cos.mean()), grad)


def _squared_chords(unit):
    """Squared chordal distances ``|u_i - u_j|^2 = 2 - 2 u_i.u_j``.

    The diagonal is set to 1 so that it vanishes from log sums and never
    divides by zero. Off-diagonal entries at or below the floor are clamped to
    it and reported in the returned mask.
    """
    sq = unit @ unit.T
    sq *= -2.0
    sq += 2.0
    np.fill_diagonal(sq, 1.0)
    floored = sq <= DIST_FLOOR**2
    if floored.any():
        sq[floored] = DIST_FLOOR**2
    return sq, floored


def _pairwise_pull(weight, unit):
    """``sum_j weight_ij (u_i - u_j)`` for every row i."""
    return weight.sum(axis=1)[:, None] * unit - weight @ unit


def riesz_fisher_loss_grad(points, s: float = 2.0) -> LossEval:
    """Mean inverse-power potential ``|u_i - u_j|^-s`` over ordered pairs."""
    if not s > 0:
        raise TammesError(f"Riesz-Fisher exponent must be positive, got {s}")
    w, norms, unit = _prepare(points)
    n = w.shape[0]
    sq, floored = _squared_chords(unit)
    pot = sq ** (-0.5 * s)
    scale = 1.0 / (n * (n - 1))
    # diagonal entries of pot are exactly 1
    value = (float(pot.sum()) - n) * scale
    # each unordered pair appears twice in the ordered sum
    weight = pot / sq
    weight *= -2.0 * s * scale
    np.fill_diagonal(weight, 0.0)
    if floored.any():
        weight[floored] = 0.0
    grad_unit = _pairwise_pull(weight, unit)
    return LossEval(value, _tangent(grad_unit, unit, norms))


def log_loss_grad(points) -> LossEval:
    """Mean negative log chordal distance over ordered pairs."""
    w, norms, unit = _prepare(points)
    n = w.shape[0]
    sq, floored = _squared_chords(unit)
    scale = 1.0 / (n * (n - 1))
    value = -0.5 * float(np.log(sq).sum()) * scale
    weight = np.reciprocal(sq)
    weight *= -2.0 * scale
    np.fill_diagonal(weight, 0.0)
    if floored.any():
        weight[floored] = 0.0
    grad_unit = _pairwise_pull(weight, unit)
    return LossEval(value, _tangent(grad_unit, unit, norms))


def orthogonal_loss_grad(points, lam: float = 1.0) -> LossEval:
    """``lam / 2 * ||U U^T - I||_F^2`` on the row-normalized matrix ``U``."""
    w, norms, unit = _prepare(points)
    resid = unit @ unit.T - np.eye(w.shape[0])
    value = 0.5 * lam * float(np.sum(resid * resid))
    grad_unit = 2.0 * lam * resid @ unit
    return LossEval(value, _tangent(grad_unit, unit, norms))


def loss_grad(kind: LossKind, points) -> LossEval:
    if kind.name == "mma":
        return mma_loss_grad(points)
    if kind.name == "cosine":
        return cosine_loss_grad(points)
    if kind.name == "rf":
        return riesz_fisher_loss_grad(points, kind.s)
    if kind.name == "log":
        return log_loss_grad(points)
    return orthogonal_loss_grad(points, kind.lam)


def mma_regularization(layers: Sequence[np.ndarray], lam: float) -> tuple[float, list[np.ndarray]]:
    """``lam * sum_l mma_loss(W_l)`` and the per-layer gradients.

    Layers with fewer than two rows have no pairwise angle; they contribute
    zero and a warning is logged.
    """
    return layer_regularization(MMA, layers, lam)


def layer_regularization(kind: LossKind, layers: Sequence[np.ndarray], lam: float):
    """Apply any loss as a layer regularizer, scaled by ``lam``.

    For ``orthogonal`` the coefficient is taken from ``lam`` rather than the
    kind so that every regularizer uses the same scaling convention.
    """
    if kind.name == "orthogonal":
        kind = LossKind("orthogonal", lam=1.0)
    total = 0.0
    grads = []
    for k, weights in enumerate(layers):
        weights = as_points(weights)
        if weights.shape[0] < 2:
            log.warning("layer %d has %d row(s); it contributes nothing", k, weights.shape[0])
            grads.append(np.zeros_like(weights))
            continue
        if lam == 0:
            grads.append(np.zeros_like(weights))
            continue
        try:
            value, grad = loss_grad(kind, weights)
        except ZeroNormRow as err:
            raise ZeroNormRow(err.row, layer=k) from None
        total += lam * value
        grads.append(lam * grad)
    return total, grads


# -- closed-form per-pair gradient norms ------------------------------------

def pair_gradient_norm(kind: LossKind, theta: float, w_norm: float = 1.0) -> float:
    """Norm of the gradient of one pair's loss term w.r.t. one endpoint."""
    if not 0.0 < theta < math.pi:
        raise DomainError(f"angle must lie strictly inside (0, pi), got {theta}")
    if not w_norm > 0:
        raise DomainError(f"w_norm must be positive, got {w_norm}")
    if kind.name == "mma":
        return 1.0 / w_norm
    if kind.name == "cosine":
        return math.sin(theta) / w_norm
    half = 0.5 * theta
    chord = 2.0 * math.sin(half)
    if kind.name == "rf":
        return kind.s / w_norm * math.cos(half) / chord ** (kind.s + 1)
    if kind.name == "log":
        return math.cos(half) / (w_norm * chord)
    raise DomainError(f"no closed-form pair gradient for {kind.name!r}")


def gradient_norm_curve(kind: LossKind, thetas, w_norm: float = 1.0) -> list[tuple[float, float]]:
    return [(float(t), pair_gradient_norm(kind, float(t), w_norm)) for t in thetas]


def gradient_curve_table(s: float = 1.0, samples: int = 500, w_norm: float = 1.0):
    """Rows ``(theta_deg, cosine, mma, rf, log)`` at angles spread uniformly
    over [0.5, 179.5] degrees."""
    if samples < 1:
        raise DomainError("need at least one sample")
    degs = np.linspace(0.5, 179.5, samples) if samples > 1 else np.array([90.0])
    kinds = (COSINE, MMA, riesz_fisher(s), LOG)
    table = []
    for deg in degs:
        theta = math.radians(float(deg))
        table.append((float(deg), *(pair_gradient_norm(k, theta, w_norm) for k in kinds)))
    return table
