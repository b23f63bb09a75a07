"""Heavy-ball gradient descent with plateau learning-rate decay.

Replays the benchmark protocol: standard-normal initialisation, momentum
0.9, learning rate 0.1 divided by 5 whenever the loss stagnates, 10000
full-gradient iterations. Points are never renormalised between steps.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .core import TammesError, min_angle_of, pointset_to_dict
from .losses import MMA, LossKind, loss_grad


class NonFiniteLoss(TammesError):
    def __init__(self, iteration: int, partial: "SolveResult | None" = None):
        self.iteration = iteration
        self.partial = partial
        super().__init__(f"loss or gradient became non-finite at iteration {iteration}")


@dataclass(frozen=True)
class OptimizerConfig:
    n: int
    d: int
    loss: LossKind = MMA
    iterations: int = 10000
    lr0: float = 0.1
    momentum: float = 0.9
    plateau_patience: int = 1000
    plateau_factor: float = 0.2
    plateau_threshold: float = 1e-6
    lr_floor: float = 1e-5
    seed: int = 0
    trace_every: int = 100

    def __post_init__(self):
        if self.n < 2 or self.d < 1:
            raise TammesError(f"need n >= 2 and d >= 1, got n={self.n}, d={self.d}")
        if self.iterations < 1 or self.plateau_patience < 1 or self.trace_every < 1:
            raise TammesError("iterations, patience and trace_every must be positive")
        if not self.lr0 > 0 or not self.lr_floor > 0:
            raise TammesError("learning rates must be positive")
        if not 0 <= self.momentum < 1:
            raise TammesError(f"momentum must lie in [0, 1), got {self.momentum}")
        if not 0 < self.plateau_factor < 1:
            raise TammesError(f"plateau factor must lie in (0, 1), got {self.plateau_factor}")
        if self.plateau_threshold < 0:
            raise TammesError("plateau threshold must be nonnegative")
        if not 0 <= self.seed < 2**64:
            raise TammesError("seed must be an unsigned 64-bit integer")


@dataclass(frozen=True)
class SolveResult:
    final_points: np.ndarray
    final_min_angle: float
    loss_trace: list = field(default_factory=list)
    lr_trace: list = field(default_factory=list)
    seed: int = 0

    @property
    def min_angle_deg(self) -> float:
        return math.degrees(self.final_min_angle)

    def to_dict(self) -> dict:
        out = pointset_to_dict(self.final_points)
        out.update(
            min_angle_deg=self.min_angle_deg,
            loss_trace=[[int(i), float(v)] for i, v in self.loss_trace],
            lr_trace=[[int(i), float(v)] for i, v in self.lr_trace],
            seed=int(self.seed),
        )
        return out


@dataclass(frozen=True)
class SGDState:
    points: np.ndarray
    velocity: np.ndarray
    lr: float
    momentum: float


def init_points(n: int, d: int, seed: int) -> np.ndarray:
    """``n x d`` i.i.d. standard normals.

    Uses numpy's PCG64 bit generator seeded with ``seed`` and its ziggurat
    normal sampler, so a given seed always yields the same matrix.
    """
    if n < 2 or d < 1:
        raise TammesError(f"need n >= 2 and d >= 1, got n={n}, d={d}")
    rng = np.random.Generator(np.random.PCG64(seed))
    return rng.standard_normal((n, d))


def sgd_step(state: SGDState, grad: np.ndarray) -> SGDState:
    velocity = state.momentum * state.velocity - state.lr * grad
    return replace(state, points=state.points + velocity, velocity=velocity)


def solve(config: OptimizerConfig, init: np.ndarray | None = None) -> SolveResult:
    """Minimise ``config.loss`` from a standard-normal start (or ``init``)."""
    points = init_points(config.n, config.d, config.seed) if init is None else np.array(init, dtype=np.float64)
    if points.shape != (config.n, config.d):
        raise TammesError(f"init has shape {points.shape}, expected ({config.n}, {config.d})")
    state = SGDState(points, np.zeros_like(points), config.lr0, config.momentum)
    loss_trace: list[tuple[int, float]] = []
    lr_trace: list[tuple[int, float]] = [(0, config.lr0)]
    best = math.inf
    stale = 0

    def partial() -> SolveResult:
        return SolveResult(state.points, math.nan, loss_trace, lr_trace, config.seed)

    if not np.isfinite(points).all():
        raise NonFiniteLoss(0, partial())

    for it in range(config.iterations):
        value, grad = loss_grad(config.loss, state.points)
        if not (math.isfinite(value) and np.isfinite(grad).all()):
            raise NonFiniteLoss(it, partial())
        if it % config.trace_every == 0:
            loss_trace.append((it, value))

        if value < best - config.plateau_threshold:
            best = value
            stale = 0
        else:
            stale += 1
            if stale >= config.plateau_patience:
                stale = 0
                lr = max(state.lr * config.plateau_factor, config.lr_floor)
                if lr != state.lr:
                    state = replace(state, lr=lr)
                    lr_trace.append((it, lr))

        state = sgd_step(state, grad)
        if not np.isfinite(state.points).all():
            raise NonFiniteLoss(it, partial())

    value, _ = loss_grad(config.loss, state.points)
    loss_trace.append((config.iterations, value))
    return SolveResult(state.points, min_angle_of(state.points), loss_trace, lr_trace, config.seed)
