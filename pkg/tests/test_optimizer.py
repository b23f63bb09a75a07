import math

import numpy as np
import pytest

from tammes.core import min_angle_of
from tammes.losses import COSINE, LOG, MMA, riesz_fisher
from tammes.optimizer import (
    NonFiniteLoss,
    OptimizerConfig,
    SGDState,
    init_points,
    sgd_step,
    solve,
)


def test_init_points_deterministic():
    a = init_points(5, 3, 42)
    assert np.array_equal(a, init_points(5, 3, 42))
    assert not np.array_equal(a, init_points(5, 3, 43))


def test_init_points_moments():
    w = init_points(1000, 4, 7)
    # independent check of the sample moments
    mean = w.sum(axis=0) / len(w)
    var = ((w - mean) ** 2).sum(axis=0) / (len(w) - 1)
    assert (np.abs(mean) < 0.15).all()
    assert ((var > 0.8) & (var < 1.2)).all()


def test_init_points_full_seed_range():
    assert init_points(2, 2, 2**64 - 1).shape == (2, 2)


def _state(momentum=0.9, lr=0.1):
    w = np.arange(6.0).reshape(3, 2)
    return SGDState(w, np.zeros_like(w), lr, momentum)


def test_sgd_zero_gradient_is_a_no_op():
    s = _state()
    out = sgd_step(s, np.zeros_like(s.points))
    assert np.array_equal(out.points, s.points)


def test_sgd_without_momentum_is_gradient_descent():
    s = _state(momentum=0.0)
    g = np.ones_like(s.points)
    np.testing.assert_array_equal(sgd_step(s, g).points, s.points - 0.1 * g)


def test_sgd_heavy_ball_second_step():
    s = _state()
    g = np.full_like(s.points, 0.5)
    s1 = sgd_step(s, g)
    s2 = sgd_step(s1, g)
    np.testing.assert_allclose(s2.points - s1.points, -0.1 * g * 1.9, rtol=1e-12)


def test_config_validation():
    with pytest.raises(ValueError):
        OptimizerConfig(n=1, d=3)
    with pytest.raises(ValueError):
        OptimizerConfig(n=3, d=3, momentum=1.0)
    with pytest.raises(ValueError):
        OptimizerConfig(n=3, d=3, plateau_factor=1.5)


def test_solve_is_deterministic():
    cfg = OptimizerConfig(n=8, d=3, iterations=300, seed=9)
    a, b = solve(cfg), solve(cfg)
    assert np.array_equal(a.final_points, b.final_points)
    assert a.loss_trace == b.loss_trace and a.lr_trace == b.lr_trace
    assert a.to_dict() == b.to_dict()


@pytest.mark.parametrize("kind", [MMA, COSINE, riesz_fisher(2.0), LOG], ids=str)
def test_trace_bookkeeping(kind):
    cfg = OptimizerConfig(n=10, d=3, loss=kind, iterations=1500, plateau_patience=100, seed=3)
    res = solve(cfg)
    lrs = [lr for _, lr in res.lr_trace]
    assert all(a >= b for a, b in zip(lrs, lrs[1:]))
    assert min(lrs) >= cfg.lr_floor
    best = np.minimum.accumulate([v for _, v in res.loss_trace])
    assert (np.diff(best) <= 0).all()
    assert res.final_min_angle == min_angle_of(res.final_points)
    assert res.loss_trace[-1][0] == cfg.iterations


def test_plateau_decays_to_the_floor():
    cfg = OptimizerConfig(n=4, d=3, iterations=3000, plateau_patience=50, seed=1)
    res = solve(cfg)
    assert len(res.lr_trace) > 3
    assert res.lr_trace[-1][1] == cfg.lr_floor


@pytest.mark.parametrize("n, d, target", [(4, 3, 109.4), (5, 4, 104.4), (6, 5, 101.4)])
def test_mma_reaches_simplex(n, d, target):
    res = solve(OptimizerConfig(n=n, d=d, seed=1))
    assert res.min_angle_deg >= target
    u = res.final_points / np.linalg.norm(res.final_points, axis=1, keepdims=True)
    off = (u @ u.T)[~np.eye(n, dtype=bool)]
    assert np.abs(off + 1 / (n - 1)).max() < 5e-3


def test_near_coincident_pair():
    eps = 1e-4
    init = np.array([[1.0, 0.0], [math.cos(eps), math.sin(eps)]])
    mma = solve(OptimizerConfig(n=2, d=2, loss=MMA, iterations=2000), init=init)
    assert mma.min_angle_deg >= 179.0
    # diagnostic only: the cosine loss has a vanishing gradient near zero angle
    cos = solve(OptimizerConfig(n=2, d=2, loss=COSINE, iterations=2000), init=init)
    print(f"cosine from 1e-4 rad: {cos.min_angle_deg:.3f} deg")


def test_non_finite_init_raises_with_partial_trace():
    init = np.array([[1.0, 0.0], [np.nan, 1.0]])
    with pytest.raises(NonFiniteLoss) as info:
        solve(OptimizerConfig(n=2, d=2, iterations=5), init=init)
    assert info.value.iteration == 0
    assert info.value.partial is not None


def test_solve_result_json_layout():
    res = solve(OptimizerConfig(n=3, d=2, iterations=10, seed=5))
    out = res.to_dict()
    assert set(out) == {"d", "n", "points", "min_angle_deg", "loss_trace", "lr_trace", "seed"}
    assert out["n"] == 3 and out["d"] == 2 and out["seed"] == 5
    assert out["min_angle_deg"] == math.degrees(min_angle_of(np.array(out["points"])))
