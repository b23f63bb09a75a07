"""Toy classifier trained with and without angular-diversity regularizers.

A ReLU network on a 2-D, 3-class Gaussian mixture, trained with manual
backpropagation and momentum SGD. The regularizer is added to the task loss
over the weight matrices (biases excluded); its gradient is added to the
backprop gradient of each regularized matrix.
"""
from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .analyzer import AngleStats, angle_stats
from .core import TammesError
from .losses import LOG, MMA, LossKind, layer_regularization, orthogonal, riesz_fisher
from .optimizer import NonFiniteLoss

log = logging.getLogger(__name__)

REGULARIZERS = ("none", "mma", "orthogonal", "rf", "log")
# rf: larger coefficients diverge on the 64-neuron 2-D input layer
DEFAULT_LAMBDA = {"none": 0.0, "mma": 0.07, "orthogonal": 1e-4, "rf": 1e-5, "log": 1.0}

N_CLASSES = 3
N_TRAIN, N_TEST = 1000, 500


@dataclass(frozen=True)
class DemoConfig:
    reg: str = "mma"
    lam: float | None = None
    s: float = 2.0
    include_output_layer: bool = True
    epochs: int = 200
    lr: float = 0.05
    momentum: float = 0.9
    batch_size: int = 64
    seed: int = 0
    hidden: tuple[int, ...] = (64, 64)

    def __post_init__(self):
        if self.reg not in REGULARIZERS:
            raise TammesError(f"unknown regularizer {self.reg!r}; choose from {REGULARIZERS}")
        if self.lam is not None and self.lam < 0:
            raise TammesError("lambda must be nonnegative")
        if self.epochs < 1 or self.batch_size < 1 or not self.lr > 0:
            raise TammesError("epochs, batch size and learning rate must be positive")
        if not 0 <= self.momentum < 1:
            raise TammesError("momentum must lie in [0, 1)")

    @property
    def coefficient(self) -> float:
        return DEFAULT_LAMBDA[self.reg] if self.lam is None else self.lam

    @property
    def kind(self) -> LossKind | None:
        return {
            "none": None,
            "mma": MMA,
            "orthogonal": orthogonal(1.0),
            "rf": riesz_fisher(self.s),
            "log": LOG,
        }[self.reg]


@dataclass
class Network:
    weights: list[np.ndarray]
    biases: list[np.ndarray]

    def copy(self) -> "Network":
        return Network([w.copy() for w in self.weights], [b.copy() for b in self.biases])


@dataclass
class DemoReport:
    train_accuracy: float
    test_accuracy: float
    per_layer_min_angle_deg: list
    per_layer_count_above_02: list
    loss_curve: list
    network: Network | None = field(default=None, repr=False, compare=False)

    def to_dict(self) -> dict:
        out = asdict(self)
        out.pop("network")
        return out


def _rng(seed: int, stream: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, stream])))


def make_dataset(seed: int = 0):
    """Three isotropic Gaussians (sd 0.9) centred on a radius-2 circle at
    0, 120 and 240 degrees.

    Returns ``(x_train, y_train), (x_test, y_test)``. Class sizes are 334, 333,
    333 for training and 167, 167, 166 for test; rows are grouped by class.
    """
    rng = _rng(seed, 0)
    angles = np.radians([0.0, 120.0, 240.0])
    means = 2.0 * np.column_stack([np.cos(angles), np.sin(angles)])

    def draw(total):
        counts = [total // N_CLASSES + (k < total % N_CLASSES) for k in range(N_CLASSES)]
        x = np.concatenate([means[k] + 0.9 * rng.standard_normal((c, 2)) for k, c in enumerate(counts)])
        y = np.repeat(np.arange(N_CLASSES), counts)
        return x, y

    return draw(N_TRAIN), draw(N_TEST)


def init_network(sizes, seed: int) -> Network:
    """Standard-normal weights scaled by ``1/sqrt(fan_in)``; zero biases."""
    rng = _rng(seed, 1)
    weights = [rng.standard_normal((out, fan_in)) / math.sqrt(fan_in) for fan_in, out in zip(sizes[:-1], sizes[1:])]
    biases = [np.zeros(out) for out in sizes[1:]]
    return Network(weights, biases)


def forward(net: Network, x: np.ndarray) -> np.ndarray:
    h = x
    for w, b in zip(net.weights[:-1], net.biases[:-1]):
        h = np.maximum(h @ w.T + b, 0.0)
    return h @ net.weights[-1].T + net.biases[-1]


def _softmax_xent(logits, y):
    shifted = logits - logits.max(axis=1, keepdims=True)
    logp = shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    m = len(y)
    loss = -float(logp[np.arange(m), y].mean())
    dlogits = np.exp(logp)
    dlogits[np.arange(m), y] -= 1.0
    return loss, dlogits / m


def task_loss_grad(net: Network, x: np.ndarray, y: np.ndarray):
    """Mean softmax cross-entropy and its gradients by backpropagation."""
    acts = [x]
    pre = []
    h = x
    for w, b in zip(net.weights[:-1], net.biases[:-1]):
        z = h @ w.T + b
        pre.append(z)
        h = np.maximum(z, 0.0)
        acts.append(h)
    logits = h @ net.weights[-1].T + net.biases[-1]
    loss, delta = _softmax_xent(logits, y)

    gw = [None] * len(net.weights)
    gb = [None] * len(net.biases)
    for k in range(len(net.weights) - 1, -1, -1):
        gw[k] = delta.T @ acts[k]
        gb[k] = delta.sum(axis=0)
        if k:
            delta = (delta @ net.weights[k]) * (pre[k - 1] > 0)
    return loss, gw, gb


def regularized_layers(net: Network, include_output: bool) -> list[int]:
    last = len(net.weights) - 1
    return [k for k in range(len(net.weights)) if k < last or include_output]


def regularizer(net: Network, kind: LossKind | None, lam: float, include_output: bool):
    """Regularizer value and a full-length list of weight gradients (zeros
    for unregularized layers)."""
    grads = [np.zeros_like(w) for w in net.weights]
    if kind is None:
        return 0.0, grads
    which = regularized_layers(net, include_output)
    value, layer_grads = layer_regularization(kind, [net.weights[k] for k in which], lam)
    for k, g in zip(which, layer_grads):
        grads[k] = g
    return value, grads


def objective_grad(net: Network, x, y, kind, lam, include_output):
    """Task loss plus regularizer, with gradients for every weight and bias."""
    loss, gw, gb = task_loss_grad(net, x, y)
    reg, rw = regularizer(net, kind, lam, include_output)
    return loss + reg, [a + b for a, b in zip(gw, rw)], gb


def accuracy(net: Network, x, y) -> float:
    return float(np.mean(np.argmax(forward(net, x), axis=1) == y))


def layer_angle_report(net: Network, threshold: float = 0.2) -> list[AngleStats | None]:
    """Angle statistics of every weight matrix; ``None`` for single-row layers."""
    out = []
    for k, w in enumerate(net.weights):
        if w.shape[0] < 2:
            log.warning("layer %d has a single neuron; no pairwise angles", k)
            out.append(None)
        else:
            out.append(angle_stats(w, threshold))
    return out


def train_mlp(config: DemoConfig, data=None) -> DemoReport:
    (x_train, y_train), (x_test, y_test) = make_dataset(config.seed) if data is None else data
    sizes = [x_train.shape[1], *config.hidden, N_CLASSES]
    net = init_network(sizes, config.seed)
    kind, lam = config.kind, config.coefficient
    vel_w = [np.zeros_like(w) for w in net.weights]
    vel_b = [np.zeros_like(b) for b in net.biases]
    shuffle = _rng(config.seed, 2)
    curve = []
    m = len(y_train)

    for epoch in range(1, config.epochs + 1):
        order = shuffle.permutation(m)
        task_total = 0.0
        for start in range(0, m, config.batch_size):
            batch = order[start : start + config.batch_size]
            task, gw, gb = task_loss_grad(net, x_train[batch], y_train[batch])
            if not math.isfinite(task):
                raise NonFiniteLoss(epoch)
            _, rw = regularizer(net, kind, lam, config.include_output_layer)
            task_total += task * len(batch)
            for k in range(len(net.weights)):
                vel_w[k] = config.momentum * vel_w[k] - config.lr * (gw[k] + rw[k])
                vel_b[k] = config.momentum * vel_b[k] - config.lr * gb[k]
                net.weights[k] = net.weights[k] + vel_w[k]
                net.biases[k] = net.biases[k] + vel_b[k]
            if not all(np.isfinite(w).all() for w in net.weights):
                raise NonFiniteLoss(epoch)
        reg_value, _ = regularizer(net, kind, lam, config.include_output_layer)
        task_mean = task_total / m
        if not (math.isfinite(task_mean) and math.isfinite(reg_value)):
            raise NonFiniteLoss(epoch)
        curve.append((epoch, task_mean, reg_value))

    stats = layer_angle_report(net)
    return DemoReport(
        train_accuracy=accuracy(net, x_train, y_train),
        test_accuracy=accuracy(net, x_test, y_test),
        per_layer_min_angle_deg=[None if s is None else s.min_angle_deg for s in stats],
        per_layer_count_above_02=[None if s is None else s.count_above_threshold for s in stats],
        loss_curve=curve,
        network=net,
    )
